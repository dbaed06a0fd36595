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


#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "photocount/cli.hpp"
#include "photocount/oracles.hpp"
#include "photocount/verify.hpp"

namespace py = pybind11;
using namespace photocount;

namespace {

cli::RunConfig make_config(const std::string& config_text, const std::string& preset_name,
                           std::optional<std::string> protocol) {
  std::optional<Protocol> p;
  if (protocol) p = protocol_from_name(*protocol);
  std::optional<cli::RunConfig> base;
  if (!preset_name.empty()) base = cli::preset(preset_name, p);
  cli::RunConfig c = cli::parse_config(config_text, base);
  if (p) c.protocol.protocol = *p;
  c.validate();
  return c;
}

py::tuple counts_key(const CountVector& n) {
  py::tuple t(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) t[i] = n[i];
  return t;
}

}  // namespace

PYBIND11_MODULE(_photocount, m) {
  m.doc() = "Photon-count conditioned evolution and heralded entanglement protocols";
  m.attr("__version__") = cli::kVersion;

  py::register_exception<cli::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);
  py::register_exception<TermOverflowError>(m, "TermOverflowError", PyExc_RuntimeError);

  m.def("preset_names", &cli::preset_names);
  m.def("axis_keys", &cli::axis_keys);

  m.def(
      "echo_config",
      [](const std::string& text, const std::string& preset, std::optional<std::string> protocol) {
        return cli::echo_config(make_config(text, preset, protocol));
      },
      py::arg("config") = "", py::arg("preset") = "", py::arg("protocol") = py::none());

  m.def(
      "simulate_json",
      [](const std::string& text, const std::string& preset, std::optional<std::string> protocol, bool oracle_only) {
        const cli::RunConfig c = make_config(text, preset, protocol);
        py::gil_scoped_release release;
        return cli::simulate_report(c, oracle_only);
      },
      py::arg("config") = "", py::arg("preset") = "", py::arg("protocol") = py::none(), py::arg("oracle_only") = false);

  m.def(
      "sweep_csv",
      [](const std::string& text, const std::string& preset, std::optional<std::string> protocol,
         const std::string& axis, const std::string& grid, int workers, bool oracle_only) {
        cli::RunConfig c = make_config(text, preset, protocol);
        c.axis = axis;
        c.grid = cli::parse_grid(grid);
        c.workers = workers;
        c.validate();
        py::gil_scoped_release release;
        return cli::sweep_csv(cli::run_sweep(c, oracle_only));
      },
      py::arg("config") = "", py::arg("preset") = "", py::arg("protocol") = py::none(), py::arg("axis"),
      py::arg("grid"), py::arg("workers") = 1, py::arg("oracle_only") = false);

  m.def(
      "conditional_states",
      [](const std::string& text, const std::string& preset, std::optional<std::string> protocol) {
        const cli::RunConfig c = make_config(text, preset, protocol);
        ProtocolRun run;
        {
          py::gil_scoped_release release;
          run = run_protocol(c.protocol);
        }
        py::dict states;
        for (const auto& [n, rho] : run.ensemble.states) states[counts_key(n)] = Matrix(rho.matrix());
        py::dict out;
        out["states"] = states;
        out["rho_full"] = run.rho_full;
        out["truncation_residual"] = run.ensemble.truncation_residual;
        out["eta_gen"] = run.merit.eta_gen;
        out["F_gen"] = run.merit.F_gen;
        out["C_gen"] = run.merit.C_gen;
        out["t_f"] = run.t_f;
        return out;
      },
      py::arg("config") = "", py::arg("preset") = "", py::arg("protocol") = py::none());

  m.def(
      "optical_limits",
      [](double gamma1, double gamma2, double gamma_star1, double gamma_star2, double delta) {
        const ProtocolComparison c = compare_optical_limits(gamma1, gamma2, gamma_star1, gamma_star2, delta);
        py::dict d;
        d["M12"] = c.M12;
        d["F_N"] = c.F_N;
        d["F_T"] = c.F_T;
        d["F_P"] = c.F_P;
        d["C_N"] = c.C_N;
        d["C_T"] = c.C_T;
        d["C_P"] = c.C_P;
        d["upper_bound"] = c.upper_bound;
        return d;
      },
      py::arg("gamma1"), py::arg("gamma2"), py::arg("gamma_star1"), py::arg("gamma_star2"), py::arg("delta") = 0.0);

  m.def("wavepacket_overlap", &wavepacket_overlap_closed_form, py::arg("gamma1"), py::arg("gamma2"),
        py::arg("Gamma1"), py::arg("Gamma2"), py::arg("delta"));

  m.def(
      "verify",
      [](bool inject_sign_error) {
        VerifyOptions opts;
        opts.flip_c_tilde_sign = inject_sign_error;
        std::vector<SuiteResult> suites;
        {
          py::gil_scoped_release release;
          suites = run_verification(opts);
        }
        py::list out;
        for (const auto& s : suites) out.append(py::make_tuple(s.name, s.max_error(), s.pass()));
        return out;
      },
      py::arg("inject_sign_error") = false);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> all{"photocount"};
        all.insert(all.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : all) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
