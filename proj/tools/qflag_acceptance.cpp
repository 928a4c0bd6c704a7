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


// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exit status is 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "qflag/circuit/schedule.hpp"
#include "qflag/code513/code.hpp"
#include "qflag/experiment/experiment.hpp"
#include "qflag/fit/fit.hpp"
#include "qflag/flag/extraction.hpp"
#include "qflag/flag/protocol.hpp"
#include "qflag/qasm/qasm.hpp"
#include "qflag/tomography/tomography.hpp"
#include "qflag/transpile/fixtures.hpp"
#include "qflag/transpile/route.hpp"

namespace qflag {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const DeviceModel& device(const std::string& name) {
  static std::map<std::string, DeviceModel> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, load_device(resolve_device_path(name).string())).first;
  return it->second;
}

// 1. Every preparation variant yields |-_L> exactly.
Outcome code_state_exactness() {
  double worst_f = 1, worst_g = 0, worst_x = 0;
  for (PrepVariant v : kPrepVariants) {
    const PrepCircuit p = prep_minus_logical(v);
    const DensityMatrix out = *simulate_density(p.circuit).final_density;
    const DensityMatrix data = partial_trace(out, p.output_order);
    worst_f = std::min(worst_f, fidelity(minus_logical_state(), data));
    const CodestateReport rep = verify_codestate(data);
    for (double g : rep.generators) worst_g = std::max(worst_g, std::abs(g - 1));
    worst_x = std::max(worst_x, std::abs(rep.logical_x + 1));
  }
  return {worst_f >= 1 - 1e-9 && worst_g <= 1e-9 && worst_x <= 1e-9,
          fmt("min fidelity %.12f, max |<g>-1| %.1e, max |<X_L>+1| %.1e", worst_f, worst_g, worst_x)};
}

// 2. The weight-<=1 lookup decoder is a bijection onto the syndromes.
Outcome perfect_code_decoder() {
  std::set<int> seen;
  bool ok = decode(syndrome_of(PauliString(5))) == PauliString(5);
  int identity_ok = ok ? 1 : 0;
  for (int q = 0; q < 5; ++q) {
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      const PauliString e = PauliString::single(5, q, p);
      const int s = syndrome_index(syndrome_of(e));
      ok = ok && s != 0 && seen.insert(s).second && decode(syndrome_from_index(s)) == e;
      identity_ok += decode(syndrome_of(e)) == e ? 1 : 0;
    }
  }
  return {ok && seen.size() == 15 && identity_ok == 16,
          fmt("%.0f distinct nonzero syndromes, decode(syndrome(e)) == e for %.0f/16", static_cast<double>(seen.size()),
              identity_ok)};
}

// 3. Exhaustive single-fault analysis of the flagged ZXIXZ extraction.
Outcome flag_fault_tolerance() {
  const auto& code = five_qubit_code();
  const std::vector<int> data{0, 1, 2, 3, 4};
  const ExtractionCircuit flagged = flagged_syndrome_circuit(code, 3, data, 5, 6);
  const FaultReport rep = enumerate_single_faults(flagged);
  int x_on_syndrome = 0, x_spread = 0;
  for (const FaultRecord& r : rep.records) {
    if (r.location.qubit == flagged.syndrome_qubit && r.location.pauli == Pauli::X) {
      ++x_on_syndrome;
      if (r.residual.weight() != 0) ++x_spread;
    }
  }
  const FaultReport nonft = enumerate_single_faults(nonft_syndrome_circuit(code, 3, data, 5));
  return {rep.dangerous.empty() && x_on_syndrome > 0 && x_spread == 0 && !nonft.dangerous.empty(),
          fmt("flagged: %.0f faults, 0 dangerous expected, got %.0f; syndrome-X spread %.0f", 
              static_cast<double>(rep.records.size()), static_cast<double>(rep.dangerous.size()), x_spread) +
              fmt("; unflagged dangerous %.0f", static_cast<double>(nonft.dangerous.size()))};
}

// 4. Conditional tomography of the stabilizer fixture under gate noise.
Outcome tomography_exactness() {
  const Fixture& f = fixture("melbourne-stab-ZXIXZ");
  const NoiseModel noise = NoiseModel::uniform_depolarizing(7, 0.0, 0.01);  // cx only: readout rotations stay ideal
  const std::vector<int> data(f.final_permutation.begin(), f.final_permutation.begin() + 5);
  const TomographyCondition cond{{f.final_permutation[5], f.final_permutation[6]}, "00"};

  // Oracle: project the simulated state onto ancillas |00> and trace out.
  const Circuit body = detail::strip_terminal_measurements(f.circuit);
  Matrix m = simulate_density(body, noise).final_density->matrix();
  const std::uint64_t amask = (std::uint64_t{1} << cond.ancillas[0]) | (std::uint64_t{1} << cond.ancillas[1]);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if ((static_cast<std::uint64_t>(r) & amask) || (static_cast<std::uint64_t>(c) & amask)) m(r, c) = 0;
    }
  }
  m /= m.trace().real();
  const DensityMatrix expected = partial_trace(DensityMatrix::unchecked(m), data);

  const auto settings = tomo_settings(5);
  const double exact_td = trace_distance(reconstruct(collect(f.circuit, data, cond, settings, 0, noise, 0)), expected);
  std::vector<double> tds;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    tds.push_back(trace_distance(reconstruct(collect(f.circuit, data, cond, settings, 8192, noise, seed)), expected));
  }
  std::sort(tds.begin(), tds.end());
  const double median = 0.5 * (tds[4] + tds[5]);
  return {exact_td <= 1e-6 && median <= 0.05,
          fmt("exact trace distance %.2e; 8192 shots median %.4f (max %.4f) over 10 seeds", exact_td, median,
              tds.back())};
}

// 5. Readout-only Melbourne noise: unmitigated ~0.71, mitigated >= 0.97.
Outcome mitigation() {
  ExperimentConfig c;
  c.kind = ExperimentKind::Prep;
  c.device = "melbourne";
  set_layout(c, "B");
  c.noise = NoiseToggles{false, false, true};
  c.shots = 8192;
  c.replicas = 3;
  c.seed = 7;
  const nlohmann::json r = run_experiment(c);
  const double raw = r["summary"]["fidelity_unmitigated"]["mean"].get<double>();
  const auto mit = r["summary"]["fidelity_mitigated"]["values"].get<std::vector<double>>();
  const double worst = *std::min_element(mit.begin(), mit.end());
  return {std::abs(raw - 0.71) <= 0.03 && worst >= 0.97,
          fmt("unmitigated %.4f, mitigated min %.4f mean %.4f over 3 replicas", raw, worst,
              r["summary"]["fidelity_mitigated"]["mean"].get<double>())};
}

// 6. Fit round trip on planted channels.
Outcome fit_round_trip() {
  const DensityMatrix ideal = DensityMatrix::from_pure(minus_logical_state());
  double worst = 0;
  for (double p : {0.1, 0.3, 0.5, 0.64258, 0.9, 1.0}) {
    worst = std::max(worst, std::abs(fit_p(eq1_channel(ideal, p), ideal).p_opt - p));
  }
  const double rate = per_pauli_error_rate(0.64258);
  return {worst <= 1e-3 && std::abs(rate - 0.11914) <= 5e-4,
          fmt("max |p_opt - p*| %.2e; per-Pauli rate at 0.64258 = %.5f", worst, rate)};
}

// 7. Fixture metrics, equivalence and router determinism.
Outcome transpile_fixtures() {
  bool ok = true;
  const Fixture& stab = fixture("melbourne-stab-ZXIXZ");
  ok = ok && cnot_depth(stab.circuit) == 10 && gate_counts(stab.circuit)["cx"] == 18;
  ok = ok && cnot_depth(fixture("melbourne-prep-depth4").circuit) == 4;
  ok = ok && fixture("vigo-prep").final_permutation == std::vector<int>{2, 0, 1, 4, 3};
  int equivalent = 0;
  for (const auto& [name, f] : fixtures()) {
    const DeviceModel& d = device(f.device);
    const RoutedCircuit r = f.routed(d.num_qubits);
    const CouplingGraph g(d);
    bool edges = true;
    for (const Instruction& in : r.circuit.instructions()) {
      if (in.is_two_qubit_gate() && !g.has_edge(in.qubits[0], in.qubits[1])) edges = false;
    }
    if (edges && verify_equivalence(ideal_circuit(f.ideal), r)) ++equivalent;
  }
  ok = ok && equivalent == static_cast<int>(fixtures().size());

  const DeviceModel& mel = device("melbourne");
  const CouplingGraph g(mel);
  const Circuit prep = ideal_circuit("prep");
  const std::string once = serialize_qasm(route(prep, g, *named_layout("B")).circuit);
  bool deterministic = true;
  for (int k = 0; k < 2; ++k) deterministic = deterministic && serialize_qasm(route(prep, g, *named_layout("B")).circuit) == once;

  Rng rng(2024);
  int good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Circuit c(5);
    for (int k = 0; k < 14; ++k) {
      const int a = static_cast<int>(rng() % 5);
      const int b = static_cast<int>((a + 1 + rng() % 4) % 5);
      switch (rng() % 5) {
        case 0: c.h(a); break;
        case 1: c.u3(uniform01(rng) * 3, uniform01(rng), uniform01(rng), a); break;
        case 2: c.cz(a, b); break;
        default: c.cx(a, b); break;
      }
    }
    const RoutedCircuit r = route(c, g, *named_layout(trial % 2 ? "A" : "B"));
    bool edges = true;
    for (const Instruction& in : r.circuit.instructions()) {
      if (in.is_two_qubit_gate() && !g.has_edge(in.qubits[0], in.qubits[1])) edges = false;
    }
    if (edges && verify_equivalence(c, r)) ++good;
  }
  ok = ok && deterministic && good == 100;
  return {ok, fmt("metrics ok; %.0f/%.0f fixtures equivalent; random routed %.0f/100", equivalent,
                  static_cast<double>(fixtures().size()), good) +
                  (deterministic ? "; router deterministic" : "; router NOT deterministic")};
}

// 8. Runtime estimator ordering on the experiment circuits.
Outcome runtime_ordering() {
  const DeviceModel& mel = device("melbourne");
  auto runtime = [&](ExperimentKind k) {
    ExperimentConfig c;
    c.kind = k;
    c = finalize_config(c);
    const PlacedCircuit pc = detail::place(detail::build_circuit(c), mel, c.layout);
    return estimate_runtime(pc.routed.circuit, mel);
  };
  const double prep = runtime(ExperimentKind::Prep);
  const double idles = runtime(ExperimentKind::PrepPlusIdles);
  const double stab = runtime(ExperimentKind::PrepPlusStabilizer);
  const double ratio = stab / prep;
  const bool ok = stab > prep && idles > prep && std::abs(idles - stab) <= 0.15 * stab && ratio >= 2.0 && ratio <= 3.0;
  return {ok, fmt("prep %.3f us, prep+stabilizer %.3f us (ratio %.2f)", prep, stab, ratio) +
                  fmt(", prep+106 idles %.3f us", idles)};
}

// 9. Protocol sanity.
Outcome protocol_sanity() {
  const ProtocolResult clean = run_hardware_protocol(NoiseModel(), 200, 1);
  bool ok = clean.accepted_fraction == 1.0 && std::abs(clean.logical_fidelity - 1) <= 1e-9;
  const NoiseModel noise = NoiseModel::uniform_depolarizing(11, 0.0, 0.01);
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ProtocolResult r = run_hardware_protocol(noise, 2000, seed);
    if (r.accepted_logical_fidelity >= r.logical_fidelity) ++wins;
  }
  ok = ok && wins >= 18;
  return {ok, fmt("noiseless acceptance %.3f fidelity %.6f; conditioned >= unconditioned in %.0f/20 seeds",
                  clean.accepted_fraction, clean.logical_fidelity, wins)};
}

// 10. QASM round trip.
Outcome qasm_round_trip() {
  int fixtures_ok = 0;
  for (const auto& [name, f] : fixtures()) {
    const std::string text = serialize_qasm(f.circuit);
    if (parse_qasm(text) == f.circuit && serialize_qasm(parse_qasm(text)) == text) ++fixtures_ok;
  }
  Rng rng(99);
  int random_ok = 0;
  const char* one[] = {"id", "h", "x", "y", "z", "s", "sdg"};
  const char* two[] = {"cx", "cz", "swap"};
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const int m = static_cast<int>(rng() % 4);
    Circuit c(n, m);
    int written = -1;
    const int len = static_cast<int>(rng() % 30);
    for (int i = 0; i < len; ++i) {
      const int q = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
      const int q2 = (q + 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(std::max(1, n - 1)))) % n;
      switch (rng() % 8) {
        case 0: c.gate(one[rng() % 7], {q}); break;
        case 1: c.u3(uniform01(rng) * 6 - 3, uniform01(rng), -uniform01(rng), q); break;
        case 2: c.u1(uniform01(rng), q).u2(uniform01(rng), uniform01(rng), q); break;
        case 3:
          if (n > 1) c.gate(two[rng() % 3], {q, q2});
          break;
        case 4: c.barrier(rng() % 2 ? std::vector<int>{} : std::vector<int>{q}); break;
        case 5:
          if (m > 0) {
            written = static_cast<int>(rng() % static_cast<std::uint64_t>(m));
            c.measure(q, written, static_cast<Basis>(rng() % 3));
          }
          break;
        case 6: c.reset(q); break;
        default:
          if (written >= 0) c.c_if(written, rng() % 2 ? "x" : "z", {q});
          break;
      }
    }
    const std::string text = serialize_qasm(c);
    const Circuit back = parse_qasm(text);
    if (approx_equal(back, c, 1e-11) && serialize_qasm(back) == text) ++random_ok;
  }
  return {fixtures_ok == static_cast<int>(fixtures().size()) && random_ok == 200,
          fmt("fixtures %.0f/%.0f, random circuits %.0f/200", fixtures_ok, static_cast<double>(fixtures().size()),
              random_ok)};
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace qflag

int main() {
  using namespace qflag;
  const std::vector<Criterion> criteria{
      {1, "code-state exactness", 1, code_state_exactness},
      {2, "perfect-code decoder", 1, perfect_code_decoder},
      {3, "flag fault tolerance", 30, flag_fault_tolerance},
      {4, "tomography exactness", 600, tomography_exactness},
      {5, "readout mitigation", 300, mitigation},
      {6, "fit round trip", 60, fit_round_trip},
      {7, "transpile fixtures", 120, transpile_fixtures},
      {8, "runtime ordering", 1, runtime_ordering},
      {9, "protocol sanity", 300, protocol_sanity},
      {10, "qasm round trip", 10, qasm_round_trip},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs <= c.limit_s;
    if (!pass) ++failed;
    std::printf("%s %2d %-22s %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
