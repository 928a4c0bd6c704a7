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


#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qflag/circuit/schedule.hpp"
#include "qflag/code513/code.hpp"
#include "qflag/experiment/config.hpp"
#include "qflag/fit/fit.hpp"
#include "qflag/flag/protocol.hpp"
#include "qflag/noise/device.hpp"
#include "qflag/noise/model.hpp"
#include "qflag/qasm/qasm.hpp"
#include "qflag/tomography/tomography.hpp"
#include "qflag/transpile/fixtures.hpp"
#include "qflag/transpile/route.hpp"
#include "qflag/version.hpp"

namespace qflag {

inline constexpr int kReportSchemaVersion = 1;

/// Mean and sample standard deviation (0 for a single value).
inline nlohmann::json stat_json(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = v.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  return {{"mean", mean}, {"std", sd}, {"values", v}};
}

/// Logical circuit plus the roles of its qubits.
struct ExperimentCircuit {
  Circuit circuit;
  std::vector<int> data;
  std::vector<int> ancillas;
  std::string condition;
};

/// A routed circuit and its compact copy on the touched physical qubits.
struct PlacedCircuit {
  RoutedCircuit routed;
  std::vector<int> active;  // sorted physical qubits; slot i of `compact`
  Circuit compact;
  std::vector<int> data;      // compact slots
  std::vector<int> ancillas;  // compact slots
};

namespace detail {

inline ExperimentCircuit named_circuit(const std::string& spec) {
  ExperimentCircuit ec;
  if (spec == "prep" || spec == "prep+stab-ZXIXZ") {
    ec.circuit = ideal_circuit(spec);
    ec.data = {0, 1, 2, 3, 4};
    if (spec != "prep") {
      ec.ancillas = {5, 6};
      ec.condition = "00";
    }
    return ec;
  }
  if (spec.rfind("fixture:", 0) == 0) {
    const Fixture* f = nullptr;
    try {
      f = &fixture(spec.substr(8));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    ec.circuit = f->circuit;
    ec.data.assign(f->final_permutation.begin(), f->final_permutation.begin() + 5);
    if (f->final_permutation.size() == 7) {
      ec.ancillas = {f->final_permutation[5], f->final_permutation[6]};
      ec.condition = "00";
    }
    return ec;
  }
  if (spec.find(':') != std::string::npos) throw ConfigError("unknown circuit '" + spec + "'");
  ec.circuit = load_qasm(spec);
  return ec;
}

inline ExperimentCircuit build_circuit(const ExperimentConfig& cfg) {
  ExperimentCircuit ec;
  switch (cfg.kind) {
    case ExperimentKind::Prep:
    case ExperimentKind::PrepPlusIdles: {
      const PrepCircuit p = prep_minus_logical(cfg.prep);
      ec.circuit = p.circuit;
      ec.data = p.output_order;
      if (cfg.kind == ExperimentKind::PrepPlusIdles) {
        ec.circuit.barrier();
        for (int k = 0; k < cfg.idle_cycles; ++k) {
          for (int q = 0; q < 5; ++q) ec.circuit.id(q);
          ec.circuit.barrier();
        }
        ec.circuit.metadata().name += "+idles";
      }
      return ec;
    }
    case ExperimentKind::PrepPlusStabilizer: {
      const Fixture& f = fixture("melbourne-stab-ZXIXZ");
      ec.circuit = f.circuit;
      ec.data.assign(f.final_permutation.begin(), f.final_permutation.begin() + 5);
      ec.ancillas = {f.final_permutation[5], f.final_permutation[6]};
      ec.condition = cfg.condition;
      return ec;
    }
    case ExperimentKind::Tomo:
    case ExperimentKind::Route: {
      ec = named_circuit(cfg.circuit);
      if (!cfg.data_qubits.empty()) ec.data = cfg.data_qubits;
      if (!cfg.ancillas.empty()) ec.ancillas = cfg.ancillas;
      if (!cfg.condition.empty()) ec.condition = cfg.condition;
      return ec;
    }
    default: break;
  }
  throw ConfigError("experiment kind has no single circuit");
}

inline PlacedCircuit place(const ExperimentCircuit& ec, const DeviceModel& device, const std::vector<int>& layout) {
  PlacedCircuit pc;
  try {
    pc.routed = route(ec.circuit, CouplingGraph(device), layout);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("cannot place circuit: ") + e.what());
  }
  std::set<int> used(layout.begin(), layout.end());
  for (const Instruction& in : pc.routed.circuit.instructions()) used.insert(in.qubits.begin(), in.qubits.end());
  pc.active.assign(used.begin(), used.end());
  std::vector<int> slot(static_cast<std::size_t>(device.num_qubits), -1);
  for (std::size_t i = 0; i < pc.active.size(); ++i) slot[static_cast<std::size_t>(pc.active[i])] = static_cast<int>(i);
  pc.compact = Circuit(static_cast<int>(pc.active.size()), pc.routed.circuit.num_clbits());
  pc.compact.metadata() = pc.routed.circuit.metadata();
  for (Instruction in : pc.routed.circuit.instructions()) {
    for (int& q : in.qubits) q = slot[static_cast<std::size_t>(q)];
    pc.compact.append(std::move(in));
  }
  const int width = ec.circuit.num_qubits();
  auto to_slot = [&](int l) {
    if (l < 0 || l >= width) throw ConfigError("qubit " + std::to_string(l) + " is outside the circuit");
    return slot[static_cast<std::size_t>(pc.routed.final_permutation[static_cast<std::size_t>(l)])];
  };
  for (int l : ec.data) pc.data.push_back(to_slot(l));
  for (int l : ec.ancillas) pc.ancillas.push_back(to_slot(l));
  return pc;
}

inline NoiseModel make_noise(const ExperimentConfig& cfg, const DeviceModel* device, const std::vector<int>& slots,
                             int width) {
  if (cfg.depolarizing) return NoiseModel::uniform_depolarizing(width, cfg.depolarizing->p1, cfg.depolarizing->p2);
  if (device == nullptr || !(cfg.noise.gates || cfg.noise.idle || cfg.noise.readout)) return NoiseModel();
  return NoiseModel(device->restricted(slots), NoiseOptions{cfg.noise.gates, cfg.noise.idle, cfg.noise.readout});
}

inline nlohmann::json circuit_section(const PlacedCircuit& pc, const ExperimentConfig& cfg, const DeviceModel& device,
                                      int logical_qubits) {
  return {{"name", pc.routed.circuit.metadata().name},
          {"logical_qubits", logical_qubits},
          {"physical_qubits", pc.active},
          {"layout", cfg.layout},
          {"final_permutation", pc.routed.final_permutation},
          {"swap_count", pc.routed.swap_count},
          {"cnot_depth", cnot_depth(pc.routed.circuit)},
          {"gate_counts", gate_counts(pc.routed.circuit)},
          {"estimated_runtime_us", estimate_runtime(pc.routed.circuit, device)}};
}

inline DensityMatrix density_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("density matrix must be a nonempty array");
  const auto dim = static_cast<Eigen::Index>(j.size());
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const nlohmann::json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      throw ConfigError("density matrix must be square");
    }
    for (Eigen::Index c = 0; c < dim; ++c) {
      const nlohmann::json& e = row[static_cast<std::size_t>(c)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
        throw ConfigError("density matrix entries must be [re, im] pairs");
      }
      m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
    }
  }
  return DensityMatrix::unchecked(std::move(m));
}

inline void run_tomography(const ExperimentConfig& cfg, const DeviceModel& device, nlohmann::json& report) {
  const ExperimentCircuit ec = build_circuit(cfg);
  if (ec.data.empty()) throw ConfigError("tomography needs at least one data qubit");
  if (ec.ancillas.size() != ec.condition.size()) throw ConfigError("condition needs one character per ancilla");
  if (cfg.kind == ExperimentKind::Tomo && static_cast<int>(cfg.layout.size()) != ec.circuit.num_qubits()) {
    throw ConfigError("layout has " + std::to_string(cfg.layout.size()) + " entries for a " +
                      std::to_string(ec.circuit.num_qubits()) + "-qubit circuit");
  }
  const PlacedCircuit pc = place(ec, device, cfg.layout);
  const int width = pc.compact.num_qubits();
  const NoiseModel noise = make_noise(cfg, &device, pc.active, width);
  const TomographyCondition cond{pc.ancillas, ec.condition};
  const std::vector<BasisSetting> settings = tomo_settings(static_cast<int>(pc.data.size()));
  std::vector<int> readout = pc.data;
  readout.insert(readout.end(), pc.ancillas.begin(), pc.ancillas.end());

  // Prep kinds target |-><sub>L</sub>; generic tomography targets the
  // noiseless conditioned state of the same circuit.
  const bool code_target = is_prep_kind(cfg.kind);
  DensityMatrix target;
  if (code_target) {
    target = DensityMatrix::from_pure(minus_logical_state());
  } else {
    target = reconstruct(collect(pc.compact, pc.data, cond, settings, 0, NoiseModel(), 0, cfg.workers));
  }
  if (code_target && pc.data.size() != 5) throw ConfigError("code-state experiments need 5 data qubits");

  std::vector<double> f_raw, f_mit, f_primary, acc;
  nlohmann::json replicas = nlohmann::json::array();
  Matrix mean = Matrix::Zero(target.dim(), target.dim());
  std::optional<TomographyDataset> first;
  for (int r = 0; r < cfg.replicas; ++r) {
    const std::uint64_t seed = subseed(cfg.seed, static_cast<std::uint64_t>(r));
    TomographyDataset ds = collect(pc.compact, pc.data, cond, settings, cfg.shots, noise, subseed(seed, 0), cfg.workers);
    const DensityMatrix raw = reconstruct(ds);
    nlohmann::json rep{{"seed", seed}, {"accepted_fraction", ds.accepted_fraction()}};
    acc.push_back(ds.accepted_fraction());
    f_raw.push_back(fidelity(target, raw));
    rep["fidelity_unmitigated"] = f_raw.back();
    const DensityMatrix* primary = &raw;
    DensityMatrix mit;
    if (cfg.mitigation) {
      const CalibrationMatrix cal =
          build_calibration(noise, readout, cfg.calibration_shots.value_or(cfg.shots), subseed(seed, 1));
      ds = mitigate(ds, cal);
      mit = reconstruct(ds);
      f_mit.push_back(fidelity(target, mit));
      rep["fidelity_mitigated"] = f_mit.back();
      primary = &mit;
    }
    f_primary.push_back(fidelity(target, *primary));
    mean += primary->matrix();
    if (r == 0 && cfg.include_counts) first = std::move(ds);
    replicas.push_back(std::move(rep));
  }
  mean /= static_cast<double>(cfg.replicas);
  const DensityMatrix avg = DensityMatrix::unchecked(mean);

  report["circuit"] = circuit_section(pc, cfg, device, ec.circuit.num_qubits());
  report["circuit"]["data_qubits"] = pc.data;
  report["circuit"]["ancillas"] = pc.ancillas;
  nlohmann::json summary{{"replicas", cfg.replicas},
                         {"accepted_fraction", stat_json(acc)},
                         {"fidelity", stat_json(f_primary)},
                         {"fidelity_unmitigated", stat_json(f_raw)}};
  if (cfg.mitigation) summary["fidelity_mitigated"] = stat_json(f_mit);
  report["summary"] = summary;
  report["replicas"] = replicas;
  nlohmann::json results{{"target", code_target ? "minus-logical" : "noiseless-conditioned"},
                         {"condition", ec.condition},
                         {"density_matrix", to_json(avg)}};
  if (first) results["counts"] = to_json(*first);
  report["results"] = results;

  if (cfg.fit) {
    if (pc.data.size() != 5) throw ConfigError("the fit needs a 5-qubit state");
    const FitResult fr = fit_p(avg, DensityMatrix::from_pure(minus_logical_state()),
                               {cfg.fault_qubits.first - 1, cfg.fault_qubits.second - 1},
                               fit_objective_from_name(cfg.objective), cfg.workers);
    report["fit"] = to_json(fr);
  }
}

inline void run_protocol(const ExperimentConfig& cfg, const DeviceModel* device, nlohmann::json& report) {
  const bool hardware = cfg.kind == ExperimentKind::HardwareProtocol;
  const int width = hardware ? 11 : 7;
  std::vector<int> slots = cfg.layout;
  if (device != nullptr && slots.empty()) {
    throw ConfigError("protocol on a device needs a " + std::to_string(width) + "-qubit layout");
  }
  if (device != nullptr) {
    for (int q : slots) {
      if (q >= device->num_qubits) throw ConfigError("layout qubit " + std::to_string(q) + " is not on the device");
    }
  }
  const NoiseModel noise = make_noise(cfg, device, slots, width);
  ProtocolOptions opts;
  opts.first_generator = cfg.first_generator;
  opts.prep = prep_variant_from_name(cfg.prep);
  opts.workers = cfg.workers;

  // First circuit of every shot: preparation and one flagged extraction.
  const PrepCircuit prep = prep_minus_logical(opts.prep);
  Circuit first(width, 2);
  first.compose(prep.circuit);
  first.compose(flagged_syndrome_circuit(five_qubit_code(), cfg.first_generator, prep.output_order, 5, 6).circuit);
  nlohmann::json circ{{"name", std::string(hardware ? "hardware" : "ideal") + "-protocol"},
                      {"logical_qubits", width},
                      {"layout", cfg.layout},
                      {"cnot_depth", cnot_depth(first)},
                      {"gate_counts", gate_counts(first)},
                      {"estimated_runtime_us", nullptr}};
  if (device != nullptr) circ["estimated_runtime_us"] = estimate_runtime(first, device->restricted(slots));
  report["circuit"] = circ;

  std::vector<double> fid, raw, acc, acc_fid;
  nlohmann::json replicas = nlohmann::json::array();
  for (int r = 0; r < cfg.replicas; ++r) {
    const std::uint64_t seed = subseed(cfg.seed, static_cast<std::uint64_t>(r));
    const ProtocolResult res =
        hardware ? run_hardware_protocol(noise, cfg.shots, seed, opts) : run_ideal_protocol(noise, cfg.shots, seed, opts);
    fid.push_back(res.logical_fidelity);
    raw.push_back(res.raw_fidelity);
    acc.push_back(res.accepted_fraction);
    acc_fid.push_back(res.accepted_logical_fidelity);
    replicas.push_back(to_json(res));
  }
  report["summary"] = {{"replicas", cfg.replicas},
                       {"accepted_fraction", stat_json(acc)},
                       {"fidelity", stat_json(fid)},
                       {"fidelity_uncorrected", stat_json(raw)},
                       {"fidelity_accepted", stat_json(acc_fid)}};
  report["replicas"] = replicas;
}

inline void run_route(const ExperimentConfig& cfg, const DeviceModel& device, nlohmann::json& report) {
  const ExperimentCircuit ec = build_circuit(cfg);
  if (static_cast<int>(cfg.layout.size()) != ec.circuit.num_qubits()) {
    throw ConfigError("layout has " + std::to_string(cfg.layout.size()) + " entries for a " +
                      std::to_string(ec.circuit.num_qubits()) + "-qubit circuit");
  }
  const PlacedCircuit pc = place(ec, device, cfg.layout);
  report["circuit"] = circuit_section(pc, cfg, device, ec.circuit.num_qubits());
  nlohmann::json equivalent = nullptr;
  if (pc.active.size() <= 8) equivalent = verify_equivalence(ec.circuit, pc.routed);
  report["summary"] = {{"swap_count", pc.routed.swap_count},
                       {"cnot_depth", cnot_depth(pc.routed.circuit)},
                       {"layout_score", layout_score(ec.circuit, device, cfg.layout)}};
  report["results"] = {{"equivalent", equivalent}, {"routed_qasm", serialize_qasm(pc.routed.circuit)}};
}

inline void run_fit(const ExperimentConfig& cfg, nlohmann::json& report) {
  const std::string text = read_file(cfg.input);
  nlohmann::json in;
  try {
    in = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("input report is not valid JSON: " + std::string(e.what()));
  }
  const nlohmann::json* dm = nullptr;
  if (in.is_object() && in.contains("results") && in["results"].is_object() && in["results"].contains("density_matrix")) {
    dm = &in["results"]["density_matrix"];
  } else if (in.is_object() && in.contains("density_matrix")) {
    dm = &in["density_matrix"];
  } else {
    throw ConfigError("input report has no density matrix");
  }
  const DensityMatrix rho = density_from_json(*dm);
  if (rho.num_qubits() != 5) throw ConfigError("the fit needs a 5-qubit state");
  const FitResult fr = fit_p(rho, DensityMatrix::from_pure(minus_logical_state()),
                             {cfg.fault_qubits.first - 1, cfg.fault_qubits.second - 1},
                             fit_objective_from_name(cfg.objective), cfg.workers);
  report["circuit"] = nullptr;
  report["summary"] = {{"p_opt", fr.p_opt},
                       {"per_pauli_error_rate", fr.per_pauli_error_rate},
                       {"residual", fr.residual}};
  report["results"] = {{"input", cfg.input},
                       {"input_hash", fnv1a64_hex(text)},
                       {"input_experiment", in.value("experiment", std::string())}};
  report["fit"] = to_json(fr);
}

}  // namespace detail

/// Runs the configured experiment and returns its report. Throws ConfigError
/// for invalid configurations and NumericalError when a numerical step fails.
inline nlohmann::json run_experiment(const ExperimentConfig& raw_cfg) {
  const ExperimentConfig cfg = finalize_config(raw_cfg);
  nlohmann::json report;
  report["schema_version"] = kReportSchemaVersion;
  nlohmann::json modules = nlohmann::json::object();
  for (std::string_view m : kModules) modules[std::string(m)] = std::string(kVersion);
  report["tool"] = {{"name", "qflag"}, {"version", std::string(kVersion)}, {"modules", modules}};
  report["command"] = std::string(command_for(cfg.kind));
  report["experiment"] = std::string(experiment_kind_name(cfg.kind));
  nlohmann::json echo = to_json(cfg);
  echo.erase("workers");  // execution detail; results do not depend on it
  echo.erase("out");
  report["config"] = echo;
  report["config_hash"] = fnv1a64_hex(echo.dump());

  std::optional<DeviceModel> device;
  report["device"] = nullptr;
  if (!cfg.device.empty()) {
    const std::filesystem::path path = resolve_device_path(cfg.device);
    device = load_device(path.string());
    report["device"] = {{"name", device->name}, {"file", path.filename().string()}, {"hash", device->source_hash}};
  }
  if (!cfg.layout.empty() && device) {
    for (int q : cfg.layout) {
      if (q >= device->num_qubits) throw ConfigError("layout qubit " + std::to_string(q) + " is not on the device");
    }
  }

  switch (cfg.kind) {
    case ExperimentKind::Prep:
    case ExperimentKind::PrepPlusIdles:
    case ExperimentKind::PrepPlusStabilizer:
    case ExperimentKind::Tomo: detail::run_tomography(cfg, *device, report); break;
    case ExperimentKind::IdealProtocol:
    case ExperimentKind::HardwareProtocol: detail::run_protocol(cfg, device ? &*device : nullptr, report); break;
    case ExperimentKind::Route: detail::run_route(cfg, *device, report); break;
    case ExperimentKind::Fit: detail::run_fit(cfg, report); break;
  }
  if (!report.contains("results")) report["results"] = nlohmann::json::object();
  if (!report.contains("replicas")) report["replicas"] = nlohmann::json::array();
  if (!report.contains("fit")) report["fit"] = nullptr;
  return report;
}

/// Serialized report text (2-space indent, trailing newline).
inline std::string report_text(const nlohmann::json& report) { return report.dump(2) + "\n"; }

/// Writes the report, creating missing parent directories.
inline void write_report(const nlohmann::json& report, const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write report '" + path + "'");
  out << report_text(report);
  if (!out) throw ConfigError("failed writing report '" + path + "'");
}

// --- report comparison -------------------------------------------------------

struct DiffEntry {
  std::string path;
  std::optional<double> a;
  std::optional<double> b;

  std::optional<double> delta() const {
    if (a && b) return *b - *a;
    return std::nullopt;
  }
};

namespace detail {

inline void flatten_numbers(const nlohmann::json& j, const std::string& prefix, std::map<std::string, double>& out) {
  if (j.is_number()) {
    out[prefix] = j.get<double>();
  } else if (j.is_boolean()) {
    out[prefix] = j.get<bool>() ? 1.0 : 0.0;
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten_numbers(v, prefix.empty() ? k : prefix + "." + k, out);
  }
  // Arrays (replica values, scans, layouts) are not compared element-wise.
}

}  // namespace detail

/// Numeric leaves of the summary, circuit and fit sections of two reports
/// of the same command, with b - a deltas. Throws ConfigError on a kind
/// mismatch.
inline std::vector<DiffEntry> report_diff(const nlohmann::json& a, const nlohmann::json& b) {
  for (const nlohmann::json* r : {&a, &b}) {
    if (!r->is_object() || !r->contains("command") || !(*r)["command"].is_string()) {
      throw ConfigError("not a qflag report");
    }
  }
  if (a["command"] != b["command"]) {
    throw ConfigError("cannot compare a '" + a["command"].get<std::string>() + "' report with a '" +
                      b["command"].get<std::string>() + "' report");
  }
  std::map<std::string, double> fa, fb;
  for (const char* section : {"summary", "circuit", "fit"}) {
    if (a.contains(section)) detail::flatten_numbers(a[section], section, fa);
    if (b.contains(section)) detail::flatten_numbers(b[section], section, fb);
  }
  std::vector<DiffEntry> out;
  auto ia = fa.begin(), ib = fb.begin();
  while (ia != fa.end() || ib != fb.end()) {
    if (ib == fb.end() || (ia != fa.end() && ia->first < ib->first)) {
      out.push_back({ia->first, ia->second, std::nullopt});
      ++ia;
    } else if (ia == fa.end() || ib->first < ia->first) {
      out.push_back({ib->first, std::nullopt, ib->second});
      ++ib;
    } else {
      out.push_back({ia->first, ia->second, ib->second});
      ++ia;
      ++ib;
    }
  }
  return out;
}

/// One line per entry: path, a, b, delta ("-" where absent).
inline std::string format_diff(const std::vector<DiffEntry>& diff) {
  auto num = [](const std::optional<double>& v) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *v);
    return std::string(buf);
  };
  std::size_t width = 4;
  for (const DiffEntry& e : diff) width = std::max(width, e.path.size());
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-*s %14s %14s %14s\n", static_cast<int>(width), "path", "a", "b", "delta");
  out += line;
  for (const DiffEntry& e : diff) {
    std::snprintf(line, sizeof line, "%-*s %14s %14s %14s\n", static_cast<int>(width), e.path.c_str(),
                  num(e.a).c_str(), num(e.b).c_str(), num(e.delta()).c_str());
    out += line;
  }
  return out;
}

}  // namespace qflag
