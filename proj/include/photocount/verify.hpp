// Copyright 2026 The photocount Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <string>
#include <vector>

namespace photocount {

struct CheckResult {
  std::string name;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass() const { return error <= tolerance; }
};

struct SuiteResult {
  std::string name;
  std::vector<CheckResult> checks;

  double max_error() const;
  bool pass() const;
};

struct VerifyOptions {
  int bound_draws = 100;
  int random_liouvillians = 10;
  unsigned seed = 2026;
  // Test fixture: negate the coherence factor inside the bound-chain suite.
  bool flip_c_tilde_sign = false;
};

// Closed forms against the numeric pipeline (zero spin decoherence).
SuiteResult verify_oracle_vs_engine(const VerifyOptions& opts = {});
// Symbolic propagators and integrals against nested quadrature.
SuiteResult verify_quadrature_vs_symbolic(const VerifyOptions& opts = {});
// Ordering and bounds of the optical limits on random parameter draws; errors are violations.
SuiteResult verify_bound_chain(const VerifyOptions& opts = {});

std::vector<SuiteResult> run_verification(const VerifyOptions& opts = {});

}  // namespace photocount
