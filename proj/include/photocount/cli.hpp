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

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "photocount/imperfections.hpp"
#include "photocount/protocols.hpp"

namespace photocount::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvariant = 1;
inline constexpr int kExitConfig = 2;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sweepable parameter keys.
const std::vector<std::string>& axis_keys();

struct Grid {
  double a = 0.0, b = 0.0;
  int n = 0;
  bool log = false;

  std::vector<double> values() const;
  std::string str() const;
};

// "a:b:n" or "a:b:n:log"; strictly monotone.
Grid parse_grid(const std::string& text);

struct RunConfig {
  ProtocolConfig protocol;
  DiffusionSpec diffusion;
  PhaseErrorSpec phase;
  DistanceModel distance;
  bool absolute_units = false;  // rates in Hz and times in s, scaled by gamma1_hz
  double gamma1_hz = 1e8;
  std::string axis;             // empty when not sweeping
  std::optional<Grid> grid;
  int workers = 1;
  std::string out;
  std::string preset;

  void validate() const;
};

// Preset names fig2 ... fig7.
const std::vector<std::string>& preset_names();
RunConfig preset(const std::string& name, std::optional<Protocol> protocol = std::nullopt);

// Sectioned key = value text. Keys override `base`; without a base the emitter rates and window length
// are required. Errors name the key and, where known, the line.
RunConfig parse_config(const std::string& text, const std::optional<RunConfig>& base = std::nullopt);
RunConfig load_config(const std::string& path, const std::optional<RunConfig>& base = std::nullopt);
// Full echo in the same format; parse_config(echo_config(c)) reproduces c.
std::string echo_config(const RunConfig& config);

// Applies one axis value to a copy of the configuration (L uses the distance model).
RunConfig apply_axis(const RunConfig& config, const std::string& axis, double value);

struct SweepRow {
  std::string axis;
  double value = 0.0;
  double eta_gen = 0.0, F_gen = 0.0, C_gen = 0.0;
  double p0 = 0.0, p1 = 0.0, p2 = 0.0, p11 = 0.0, p3plus = 0.0;
  double residual = 0.0;
};

inline constexpr const char* kSweepHeader = "axis,value,eta_gen,F_gen,C_gen,p0,p1,p2,p11,p3plus,residual";

SweepRow evaluate_point(const RunConfig& config, const std::string& axis, double value, bool oracle_only = false);
std::vector<SweepRow> run_sweep(const RunConfig& config, bool oracle_only = false);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// JSON report of one run.
struct SimulateResult {
  std::string json;
  bool invariants_ok = true;  // positivity and completeness of the conditional states
};

SimulateResult simulate(const RunConfig& config, bool oracle_only = false);
std::string simulate_report(const RunConfig& config, bool oracle_only = false);

// Locale-independent shortest round-trip formatting.
std::string format_number(double v);

// Entry point shared by the executable and the tests.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace photocount::cli
