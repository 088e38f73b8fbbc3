// Copyright 2026 The pqs Authors
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

#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pqs {

/// Operator fails a structural precondition (non-Hermitian, wrong trace).
class InvalidOperator : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bloch vector outside the unit ball, or outside the x-z plane where required.
class InvalidState : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Time or angle argument outside the domain of a closed-form expression.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at a pole of an invariant function (alpha at the ground state,
/// beta at the excited-projector limit).
class SingularPoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The pre- and post-selection assign zero joint likelihood to the event.
class IncompatibleSelection : public std::runtime_error {
 public:
  explicit IncompatibleSelection(const std::string& what,
                                 std::optional<double> t_us = std::nullopt)
      : std::runtime_error(t_us ? what + " (t = " + std::to_string(*t_us) + " us)" : what),
        t_us_(t_us) {}

  std::optional<double> time_us() const { return t_us_; }

 private:
  std::optional<double> t_us_;
};

class EstimationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No trajectory survived post-selection.
class EmptySelection : public std::runtime_error {
 public:
  EmptySelection(const std::string& what, double acceptance_rate)
      : std::runtime_error(what), acceptance_rate_(acceptance_rate) {}

  double acceptance_rate() const { return acceptance_rate_; }

 private:
  double acceptance_rate_;
};

}  // namespace pqs
