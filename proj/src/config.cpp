// Copyright 2026 The graphmfg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "graphmfg/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "graphmfg/errors.hpp"

namespace graphmfg {

namespace {

using nlohmann::json;

// Input iterator that publishes how far the parser has read.
class CountingIterator {
 public:
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  CountingIterator(const char* p, const char** cursor) : p_(p), cursor_(cursor) {}
  reference operator*() const { return *p_; }
  CountingIterator& operator++() {
    *cursor_ = ++p_;
    return *this;
  }
  CountingIterator operator++(int) {
    CountingIterator old = *this;
    ++*this;
    return old;
  }
  bool operator==(const CountingIterator& o) const { return p_ == o.p_; }
  bool operator!=(const CountingIterator& o) const { return p_ != o.p_; }

 private:
  const char* p_;
  const char** cursor_;
};

struct Position {
  int line = 0;
  int column = 0;
};

Position position_at(const std::string& text, std::size_t offset) {
  Position p{1, 1};
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

// SAX pass recording the position of every value by JSON pointer.
class PositionRecorder : public nlohmann::json_sax<json> {
 public:
  PositionRecorder(const std::string& text, const char** cursor)
      : text_(text), cursor_(cursor) {}

  bool null() override { return scalar(); }
  bool boolean(bool) override { return scalar(); }
  bool number_integer(number_integer_t) override { return scalar(); }
  bool number_unsigned(number_unsigned_t) override { return scalar(); }
  bool number_float(number_float_t, const string_t&) override { return scalar(); }
  bool string(string_t&) override { return scalar(); }
  bool binary(binary_t&) override { return scalar(); }
  bool start_object(std::size_t) override {
    record(consumed());
    frames_.push_back({false, 0, ""});
    return true;
  }
  bool key(string_t& k) override {
    frames_.back().key = k;
    return true;
  }
  bool end_object() override { return close(); }
  bool start_array(std::size_t) override {
    record(consumed());
    frames_.push_back({true, 0, ""});
    return true;
  }
  bool end_array() override { return close(); }
  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception&) override {
    return false;
  }

  const std::map<std::string, Position>& positions() const { return map_; }

 private:
  struct Frame {
    bool array;
    std::size_t index;
    std::string key;
  };

  bool scalar() {
    record(token_start(consumed()));
    advance();
    return true;
  }
  bool close() {
    frames_.pop_back();
    advance();
    return true;
  }
  void advance() {
    if (!frames_.empty() && frames_.back().array) ++frames_.back().index;
  }
  // Offset of the last character read; the cursor sits one past it.
  std::size_t consumed() const {
    const auto offset = static_cast<std::size_t>(*cursor_ - text_.data());
    return offset == 0 ? 0 : offset - 1;
  }
  // First character of the scalar token ending at or just before `k`; numbers
  // are reported after one character of lookahead.
  std::size_t token_start(std::size_t k) const {
    const auto in_word = [](char c) {
      return std::isalnum(static_cast<unsigned char>(c)) || c == '+' ||
             c == '-' || c == '.';
    };
    if (k > 0 && text_[k] != '"' && !in_word(text_[k])) --k;
    if (text_[k] == '"') {
      while (k > 0) {
        --k;
        if (text_[k] != '"') continue;
        std::size_t slashes = 0;
        while (k > slashes && text_[k - 1 - slashes] == '\\') ++slashes;
        if (slashes % 2 == 0) break;
      }
      return k;
    }
    while (k > 0 && in_word(text_[k - 1])) --k;
    return k;
  }
  void record(std::size_t offset) {
    std::string path;
    for (const Frame& f : frames_) {
      path += "/" + (f.array ? std::to_string(f.index) : f.key);
    }
    map_.emplace(path, position_at(text_, offset));
  }

  const std::string& text_;
  const char** cursor_;
  std::vector<Frame> frames_;
  std::map<std::string, Position> map_;
};

class Document {
 public:
  Document(std::string text, std::string source)
      : text_(std::move(text)), source_(std::move(source)) {
    try {
      root_ = json::parse(text_);
    } catch (const json::parse_error& e) {
      const Position p = position_at(text_, e.byte == 0 ? 0 : e.byte - 1);
      throw ConfigError(prefix(p) + "invalid JSON: " + e.what(), p.line,
                        p.column);
    }
    const char* cursor = text_.data();
    PositionRecorder rec(text_, &cursor);
    json::sax_parse(CountingIterator(text_.data(), &cursor),
                    CountingIterator(text_.data() + text_.size(), &cursor), &rec);
    positions_ = rec.positions();
  }

  const json& root() const { return root_; }

  [[noreturn]] void fail(const std::string& pointer, const std::string& what) const {
    std::string p = pointer;
    for (;;) {
      const auto it = positions_.find(p);
      if (it != positions_.end()) {
        throw ConfigError(prefix(it->second) + what, it->second.line,
                          it->second.column);
      }
      if (p.empty()) break;
      p = p.substr(0, p.rfind('/'));
    }
    throw ConfigError(source_ + ": " + what);
  }

 private:
  std::string prefix(const Position& p) const {
    return (source_.empty() ? std::string("<config>") : source_) + ":" +
           std::to_string(p.line) + ":" + std::to_string(p.column) + ": ";
  }

  std::string text_;
  std::string source_;
  json root_;
  std::map<std::string, Position> positions_;
};

// Typed accessors that report the value's position on failure.
class Reader {
 public:
  Reader(const Document& doc, const json& node, std::string pointer)
      : doc_(doc), node_(node), pointer_(std::move(pointer)) {}

  const json& node() const { return node_; }
  const std::string& pointer() const { return pointer_; }
  [[noreturn]] void fail(const std::string& what) const { doc_.fail(pointer_, what); }

  void require_object(const std::set<std::string>& allowed) const {
    if (!node_.is_object()) fail("expected an object");
    for (const auto& [k, v] : node_.items()) {
      if (!allowed.count(k)) child(k).fail("unknown key \"" + k + "\"");
    }
  }
  bool has(const std::string& k) const { return node_.contains(k); }
  Reader child(const std::string& k) const {
    return Reader(doc_, node_.at(k), pointer_ + "/" + k);
  }
  Reader child(std::size_t i) const {
    return Reader(doc_, node_.at(i), pointer_ + "/" + std::to_string(i));
  }
  Reader required(const std::string& k) const {
    if (!node_.contains(k)) fail("missing key \"" + k + "\"");
    return child(k);
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    const double x = node_.get<double>();
    if (!std::isfinite(x)) fail("expected a finite number");
    return x;
  }
  long long integer() const {
    if (!node_.is_number_integer()) fail("expected an integer");
    return node_.get<long long>();
  }
  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }
  std::size_t array_size() const {
    if (!node_.is_array()) fail("expected an array");
    return node_.size();
  }

  double number_or(const std::string& k, double d) const {
    return has(k) ? child(k).number() : d;
  }
  int positive_int_or(const std::string& k, int d) const {
    if (!has(k)) return d;
    const long long v = child(k).integer();
    if (v < 1 || v > 100000000) child(k).fail("expected a positive integer");
    return static_cast<int>(v);
  }
  double positive_or(const std::string& k, double d) const {
    if (!has(k)) return d;
    const double v = child(k).number();
    if (!(v > 0.0)) child(k).fail("expected a positive number");
    return v;
  }

 private:
  const Document& doc_;
  const json& node_;
  std::string pointer_;
};

int size_param(const Reader& params, const std::string& k, int min) {
  const Reader r = params.required(k);
  const long long v = r.integer();
  if (v < min || v > 4096) {
    r.fail(k + " must be an integer in [" + std::to_string(min) + ", 4096]");
  }
  return static_cast<int>(v);
}

WeightedGraph read_graph(const Reader& r) {
  if (r.has("generator")) {
    r.require_object({"generator", "params"});
    const std::string gen = r.child("generator").string();
    const Reader params = r.required("params");
    if (gen == "torus") {
      params.require_object({"d", "k"});
      const int d = size_param(params, "d", 1);
      const int k = size_param(params, "k", 2);
      if (std::pow(static_cast<double>(k), d) > 4096) {
        params.fail("torus has more than 4096 vertices");
      }
      return torus_graph(d, k);
    }
    params.require_object({"n", "omega"});
    const int n = size_param(params, "n", 2);
    const double omega = params.positive_or("omega", 1.0);
    if (gen == "cycle") {
      if (n < 3) params.child("n").fail("cycle needs n >= 3");
      return cycle_graph(n, omega);
    }
    if (gen == "path") return path_graph(n, omega);
    if (gen == "complete") return complete_graph(n, omega);
    r.child("generator").fail("unknown generator \"" + gen +
                              "\" (cycle, path, complete, torus)");
  }
  r.require_object({"n", "edges"});
  const int n = size_param(r, "n", 2);
  const Reader edges = r.required("edges");
  const std::size_t count = edges.array_size();
  std::vector<std::tuple<int, int, double>> list;
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < count; ++e) {
    const Reader edge = edges.child(e);
    const std::string label = "edge " + std::to_string(e + 1);
    if (edge.array_size() != 3) edge.fail(label + ": expected [i, j, omega]");
    const long long i = edge.child(std::size_t{0}).integer();
    const long long j = edge.child(std::size_t{1}).integer();
    const std::string name = label + " (" + std::to_string(i) + ", " + std::to_string(j) + ")";
    if (i < 1 || i > n || j < 1 || j > n) edge.fail(name + ": vertex out of range 1.." + std::to_string(n));
    if (i == j) edge.fail(name + ": self-loops are not allowed");
    const Reader w = edge.child(std::size_t{2});
    if (!w.node().is_number()) w.fail(name + ": weight must be a number");
    const double omega = w.node().get<double>();
    if (!std::isfinite(omega) || omega <= 0.0) {
      std::ostringstream os;
      os << name << ": weight must be positive and finite, got " << omega;
      w.fail(os.str());
    }
    if (!seen.insert({std::min(i, j), std::max(i, j)}).second) {
      edge.fail(name + ": duplicate edge");
    }
    list.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), omega);
  }
  try {
    WeightedGraph g(n, list);
    g.description = "custom n=" + std::to_string(n);
    const std::vector<int> dist = g.hop_distances(0);
    if (std::find(dist.begin(), dist.end(), -1) != dist.end()) {
      edges.fail("graph is not connected");
    }
    return g;
  } catch (const DomainError& e) {
    edges.fail(e.what());
  }
}

ModelParams read_model(const Reader& r) {
  r.require_object({"family", "p0", "cF", "cT", "beta"});
  ModelParams m;
  const std::string family = r.required("family").string();
  if (family == "quadratic") {
    m.family = Family::kQuadratic;
    if (r.has("p0") && r.child("p0").number() != 2.0) {
      r.child("p0").fail("the quadratic family has p0 = 2");
    }
  } else if (family == "power") {
    m.family = Family::kPower;
    m.p0 = r.required("p0").number();
    if (!(m.p0 > 1.0)) r.child("p0").fail("p0 must exceed 1");
  } else {
    r.child("family").fail("unknown family \"" + family + "\" (quadratic, power)");
  }
  m.cF = r.number_or("cF", 1.0);
  m.cT = r.number_or("cT", 1.0);
  if (m.cF < 0.0) r.child("cF").fail("cF must be nonnegative");
  if (m.cT < 0.0) r.child("cT").fail("cT must be nonnegative");
  m.beta = r.number_or("beta", 0.0);
  if (m.beta < 0.0) r.child("beta").fail("beta must be nonnegative");
  return m;
}

std::vector<int> read_sizes(const Reader& r) {
  std::vector<int> out;
  for (std::size_t i = 0; i < r.array_size(); ++i) {
    const long long k = r.child(i).integer();
    if (k < 2 || k > 4096) r.child(i).fail("torus size must be in [2, 4096]");
    out.push_back(static_cast<int>(k));
  }
  if (out.empty()) r.fail("empty sweep");
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  const Document doc(text, source);
  const Reader root(doc, doc.root(), "");
  root.require_object({"name", "graph", "model", "horizon", "initial", "suites",
                       "options", "tolerances", "nash", "output"});
  ExperimentConfig c;
  c.source = source;
  c.name = root.has("name") ? root.child("name").string() : "experiment";
  c.graph = read_graph(root.required("graph"));
  c.model = read_model(root.required("model"));
  {
    const Reader h = root.required("horizon");
    c.horizon = h.number();
    if (!(c.horizon > 0.0)) h.fail("horizon must be positive");
  }
  const int n = c.graph.size();

  const Reader initial = root.required("initial");
  if (initial.array_size() == 0) initial.fail("at least one initial point");
  for (std::size_t k = 0; k < initial.array_size(); ++k) {
    const Reader pt = initial.child(k);
    pt.require_object({"t", "mu"});
    InitialPoint ip;
    ip.t = pt.number_or("t", 0.0);
    if (ip.t < 0.0 || ip.t >= c.horizon) {
      pt.child("t").fail("t must lie in [0, horizon)");
    }
    const Reader mu = pt.required("mu");
    if (mu.array_size() != static_cast<std::size_t>(n)) {
      mu.fail("mu must have " + std::to_string(n) + " entries");
    }
    ip.mu.resize(n);
    for (int i = 0; i < n; ++i) {
      ip.mu(i) = mu.child(static_cast<std::size_t>(i)).number();
      if (!(ip.mu(i) > 0.0)) {
        mu.child(static_cast<std::size_t>(i)).fail("mu entries must be positive");
      }
    }
    if (std::abs(ip.mu.sum() - 1.0) > 1e-12) mu.fail("mu must sum to 1");
    c.initial.push_back(std::move(ip));
  }

  std::set<std::string> suites;
  if (root.has("suites")) {
    const Reader s = root.child("suites");
    for (std::size_t k = 0; k < s.array_size(); ++k) {
      const std::string name = s.child(k).string();
      if (name == "all") {
        suites.insert(kSuiteNames.begin(), kSuiteNames.end());
      } else if (std::find(kSuiteNames.begin(), kSuiteNames.end(), name) !=
                 kSuiteNames.end()) {
        suites.insert(name);
      } else {
        s.child(k).fail("unknown suite \"" + name +
                        "\" (interiority, mfg, master, hjb, nash, all)");
      }
    }
  } else {
    suites.insert(kSuiteNames.begin(), kSuiteNames.end());
  }
  for (const auto& s : kSuiteNames) {
    if (suites.count(s)) c.suites.push_back(s);
  }

  if (root.has("options")) {
    const Reader o = root.child("options");
    o.require_object({"steps", "tol", "max_iter", "damping", "direct_steps",
                      "direct_grad_tol", "h_t", "convexity_chords", "seed", "mc_paths", "threads"});
    c.solver.steps = o.positive_int_or("steps", c.solver.steps);
    if (c.solver.steps < 8) o.child("steps").fail("steps must be at least 8");
    c.solver.tol = o.positive_or("tol", c.solver.tol);
    c.solver.max_iter = o.positive_int_or("max_iter", c.solver.max_iter);
    c.solver.damping = o.positive_or("damping", c.solver.damping);
    if (c.solver.damping > 1.0) o.child("damping").fail("damping must be in (0, 1]");
    c.direct_steps = o.positive_int_or("direct_steps", c.direct_steps);
    c.direct_grad_tol = o.positive_or("direct_grad_tol", c.direct_grad_tol);
    c.h_t = o.positive_or("h_t", c.h_t);
    c.convexity_chords = o.positive_int_or("convexity_chords", c.convexity_chords);
    if (o.has("seed")) {
      const long long s = o.child("seed").integer();
      if (s < 0) o.child("seed").fail("seed must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    }
    c.mc_paths = o.positive_int_or("mc_paths", c.mc_paths);
    if (c.mc_paths < 2) o.child("mc_paths").fail("mc_paths must be at least 2");
    c.threads = o.positive_int_or("threads", c.threads);
  }
  if (root.has("tolerances")) {
    const Reader t = root.child("tolerances");
    t.require_object({"mfg", "master", "hjb", "equality", "gap"});
    c.tol_mfg = t.positive_or("mfg", c.tol_mfg);
    c.tol_master = t.positive_or("master", c.tol_master);
    c.tol_hjb = t.positive_or("hjb", c.tol_hjb);
    c.tol_equality = t.positive_or("equality", c.tol_equality);
    c.tol_gap = t.positive_or("gap", c.tol_gap);
  }
  if (root.has("nash")) {
    const Reader nash = root.child("nash");
    nash.require_object({"torus_sweep"});
    if (nash.has("torus_sweep")) {
      const Reader ts = nash.child("torus_sweep");
      ts.require_object({"d", "k", "amplitude"});
      TorusSweep sweep;
      if (ts.has("d") && ts.child("d").integer() != 1) {
        ts.child("d").fail("the admissibility sweep is one-dimensional");
      }
      sweep.k = read_sizes(ts.required("k"));
      sweep.amplitude = ts.number_or("amplitude", sweep.amplitude);
      if (std::abs(sweep.amplitude) >= 1.0) {
        ts.child("amplitude").fail("amplitude must be in (-1, 1)");
      }
      c.torus_sweep = sweep;
    }
  }
  const bool nash = std::find(c.suites.begin(), c.suites.end(), "nash") != c.suites.end();
  if (nash && !c.seed) {
    (root.has("options") ? root.child("options") : root)
        .fail("the nash suite runs Monte Carlo and needs options.seed");
  }
  if (nash && c.model.beta != 0.0) {
    root.child("model").fail("the nash suite needs beta = 0");
  }
  c.output_dir = root.has("output") ? root.child("output").string() : "out/" + c.name;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

WeightedGraph parse_graph(const std::string& text) {
  const Document doc(text, "<graph>");
  return read_graph(Reader(doc, doc.root(), ""));
}

std::vector<GeneratorInfo> list_generators() {
  return {
      {"path", "n >= 2, omega = 1", "path P_n with uniform weight omega"},
      {"cycle", "n >= 3, omega = 1", "cycle C_n with uniform weight omega"},
      {"complete", "n >= 2, omega = 1", "complete graph K_n with uniform weight omega"},
      {"torus", "d >= 1, k >= 2",
       "d-dimensional torus grid with k^d vertices, mesh h = 1/k and "
       "nearest-neighbour weight omega = 1/h^2"},
  };
}

std::vector<std::string> expand_torus_sweep(const TorusSweep& sweep) {
  std::vector<std::string> out;
  for (int k : sweep.k) {
    std::ostringstream os;
    os << "torus d=" << sweep.d << " k=" << k << " h=" << 1.0 / k
       << " omega=" << static_cast<double>(k) * k;
    out.push_back(os.str());
  }
  return out;
}

}  // namespace graphmfg
