// Copyright 2026 The qflag Authors
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


// qflag: batch experiment runner. Exit codes: 0 success, 2 configuration
// error, 3 numerical failure, 1 anything else.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qflag/experiment/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
  std::string config;
  std::string experiment;
  std::string device;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::string layout;
  std::string out;
  std::optional<int> workers;
  std::optional<int> replicas;
  std::string fault_qubits;
  std::string input;
  std::string circuit;
  std::string scan_csv;
  bool fit = false;
  bool no_mitigation = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  sub->add_option("--device", o.device, "device name or file");
  sub->add_option("--seed", o.seed, "base seed");
  sub->add_option("--shots", o.shots, "shots per setting (tomography) or protocol shots");
  sub->add_option("--layout", o.layout, "layout name (A, B, C) or comma-separated physical qubits");
  sub->add_option("--out", o.out, "report path; - or unset writes to stdout");
  sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--replicas", o.replicas, "seed replicas")->check(CLI::PositiveNumber);
}

qflag::ExperimentConfig build_config(const Overrides& o, const std::string& command) {
  qflag::ExperimentConfig cfg;
  if (!o.config.empty()) cfg = qflag::load_config(o.config);
  if (!o.experiment.empty()) {
    cfg.kind = qflag::experiment_kind_from_name(o.experiment);
  } else if (o.config.empty()) {
    if (command == "protocol") cfg.kind = qflag::ExperimentKind::HardwareProtocol;
    if (command == "tomo") cfg.kind = qflag::ExperimentKind::Tomo;
    if (command == "fit") cfg.kind = qflag::ExperimentKind::Fit;
    if (command == "route") cfg.kind = qflag::ExperimentKind::Route;
  }
  if (qflag::command_for(cfg.kind) != command) {
    throw qflag::ConfigError("experiment '" + std::string(qflag::experiment_kind_name(cfg.kind)) +
                             "' is run by '" + std::string(qflag::command_for(cfg.kind)) + "', not '" + command + "'");
  }
  if (!o.device.empty()) cfg.device = o.device;
  if (o.seed) cfg.seed = *o.seed;
  if (o.shots) cfg.shots = *o.shots;
  if (!o.layout.empty()) qflag::set_layout(cfg, o.layout);
  if (o.out == "-") {
    cfg.out.clear();
  } else if (!o.out.empty()) {
    cfg.out = o.out;
  }
  if (o.workers) cfg.workers = *o.workers;
  if (o.replicas) cfg.replicas = *o.replicas;
  if (!o.fault_qubits.empty()) qflag::set_fault_qubits(cfg, o.fault_qubits);
  if (!o.input.empty()) cfg.input = o.input;
  if (!o.circuit.empty()) cfg.circuit = o.circuit;
  if (o.fit) cfg.fit = true;
  if (o.no_mitigation) cfg.mitigation = false;
  return cfg;
}

void write_scan_csv(const nlohmann::json& fit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw qflag::ConfigError("cannot write '" + path + "'");
  out << "p,residual\n";
  char line[64];
  for (const auto& point : fit.at("scan")) {
    std::snprintf(line, sizeof line, "%.3f,%.17g\n", point[0].get<double>(), point[1].get<double>());
    out << line;
  }
}

void print_summary(const nlohmann::json& report, const std::string& path) {
  std::string msg = report["experiment"].get<std::string>() + ": wrote " + path;
  const nlohmann::json& s = report["summary"];
  if (s.contains("fidelity")) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "; fidelity %.4f +/- %.4f", s["fidelity"]["mean"].get<double>(),
                  s["fidelity"]["std"].get<double>());
    msg += buf;
  }
  if (report["fit"].is_object()) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "; p_opt %.5f", report["fit"]["p_opt"].get<double>());
    msg += buf;
  }
  std::cout << msg << "\n";
}

int run(const Overrides& o, const std::string& command) {
  const qflag::ExperimentConfig cfg = build_config(o, command);
  const nlohmann::json report = qflag::run_experiment(cfg);
  if (!o.scan_csv.empty()) {
    if (!report["fit"].is_object()) throw qflag::ConfigError("--scan-csv needs a report with a fit");
    write_scan_csv(report["fit"], o.scan_csv);
  }
  if (cfg.out.empty()) {
    std::cout << qflag::report_text(report);
  } else {
    qflag::write_report(report, cfg.out);
    print_summary(report, cfg.out);
  }
  return 0;
}

nlohmann::json read_report(const std::string& path) {
  try {
    return nlohmann::json::parse(qflag::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw qflag::ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qflag: flag-qubit error-correction experiments in simulation"};
  app.set_version_flag("--version", std::string(qflag::kVersion));
  app.require_subcommand(1);

  Overrides o;
  std::string report_a, report_b;

  CLI::App* simulate = app.add_subcommand("simulate", "prep, prep-plus-idles or prep-plus-stabilizer");
  add_common(simulate, o);
  simulate->add_option("--experiment", o.experiment, "experiment kind");
  simulate->add_option("--fault-qubits", o.fault_qubits, "1-based fault qubit pair for the fit, e.g. 1,5");
  simulate->add_flag("--fit", o.fit, "fit the depolarizing channel to the reconstructed state");
  simulate->add_flag("--no-mitigation", o.no_mitigation, "skip readout mitigation");
  simulate->add_option("--scan-csv", o.scan_csv, "also write the fit scan as CSV");

  CLI::App* route = app.add_subcommand("route", "route a circuit onto a device");
  add_common(route, o);
  route->add_option("--circuit", o.circuit, "built-in circuit name, fixture:<name> or .qasm path");

  CLI::App* tomo = app.add_subcommand("tomo", "state tomography of a circuit");
  add_common(tomo, o);
  tomo->add_option("--circuit", o.circuit, "built-in circuit name, fixture:<name> or .qasm path");
  tomo->add_flag("--no-mitigation", o.no_mitigation, "skip readout mitigation");

  CLI::App* fit = app.add_subcommand("fit", "fit the depolarizing channel to a report's density matrix");
  add_common(fit, o);
  fit->add_option("--input", o.input, "report holding results.density_matrix");
  fit->add_option("--fault-qubits", o.fault_qubits, "1-based fault qubit pair, e.g. 1,5");
  fit->add_option("--scan-csv", o.scan_csv, "also write the scan as CSV");

  CLI::App* protocol = app.add_subcommand("protocol", "ideal-protocol or hardware-protocol");
  add_common(protocol, o);
  protocol->add_option("--experiment", o.experiment, "experiment kind");

  CLI::App* diff = app.add_subcommand("report-diff", "compare two reports");
  diff->add_option("a", report_a, "first report")->required()->check(CLI::ExistingFile);
  diff->add_option("b", report_b, "second report")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (diff->parsed()) {
      std::cout << qflag::format_diff(qflag::report_diff(read_report(report_a), read_report(report_b)));
      return 0;
    }
    for (CLI::App* sub : {simulate, route, tomo, fit, protocol}) {
      if (sub->parsed()) return run(o, sub->get_name());
    }
  } catch (const qflag::NumericalError& e) {
    std::cerr << "qflag: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const qflag::ConfigError& e) {
    std::cerr << "qflag: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qflag::DeviceSchemaError& e) {
    std::cerr << "qflag: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qflag::SourceError& e) {
    std::cerr << "qflag: config error: circuit: " << e.what() << "\n";
    return kExitConfig;
  } catch (const qflag::ResourceLimitError& e) {
    std::cerr << "qflag: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qflag: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "qflag: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
