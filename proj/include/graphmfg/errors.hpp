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

#ifndef GRAPHMFG_ERRORS_HPP_
#define GRAPHMFG_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace graphmfg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Invalid argument outside the mathematical domain (negative density,
// non-skew edge field, derivative requested at the simplex boundary, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NonPositiveDensity : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, int iterations, double gap)
      : Error(what), iterations_(iterations), gap_(gap) {}
  int iterations() const { return iterations_; }
  double gap() const { return gap_; }

 private:
  int iterations_;
  double gap_;
};

class SingularShooting : public Error {
 public:
  SingularShooting(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

class LineSearchStall : public Error {
 public:
  LineSearchStall(const std::string& what, double best_objective)
      : Error(what), best_objective_(best_objective) {}
  double best_objective() const { return best_objective_; }

 private:
  double best_objective_;
};

// Configuration problems; `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, int column = 0)
      : Error(what), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace graphmfg

#endif  // GRAPHMFG_ERRORS_HPP_
