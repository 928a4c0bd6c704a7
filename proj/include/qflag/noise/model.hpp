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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qflag/noise/channels.hpp"
#include "qflag/noise/device.hpp"

namespace qflag {

/// Which noise contributions are active.
struct NoiseOptions {
  bool gate_errors = true;
  bool idle = true;
  bool readout = true;

  static NoiseOptions all() { return {}; }
  static NoiseOptions readout_only() { return {false, false, true}; }
  static NoiseOptions gates_only() { return {true, false, false}; }
  static NoiseOptions none() { return {false, false, false}; }
};

/// Noise applied by the simulators: a depolarizing channel after each gate
/// (error taken from the device's native decomposition), relaxation during
/// scheduled idle gaps and id gates, and classical readout flips.
class NoiseModel {
 public:
  NoiseModel() = default;  // noiseless
  NoiseModel(DeviceModel device, NoiseOptions options)
      : device_(std::move(device)), options_(options), enabled_(true) {}

  /// Uniform gate depolarizing noise on an abstract all-to-all register.
  static NoiseModel uniform_depolarizing(int num_qubits, double error_1q, double error_2q) {
    return NoiseModel(DeviceModel::uniform(num_qubits, error_1q, error_2q), NoiseOptions::gates_only());
  }

  bool enabled() const { return enabled_; }
  const DeviceModel& device() const { return device_; }
  const NoiseOptions& options() const { return options_; }

  bool has_idle_noise() const { return enabled_ && options_.idle; }

  /// Depolarizing channel to apply after the gate, if any.
  std::optional<KrausChannel> gate_channel(const std::string& name, const std::vector<int>& qubits) const {
    if (!enabled_ || !options_.gate_errors) return std::nullopt;
    check_qubits(qubits);
    const double e = device_.gate_cost(name, qubits).error;
    if (e <= 0) return std::nullopt;
    return depolarizing_channel(1.0 - e, static_cast<int>(qubits.size()));
  }

  /// Error probability of the gate (0 when gate errors are disabled).
  double gate_error(const std::string& name, const std::vector<int>& qubits) const {
    if (!enabled_ || !options_.gate_errors) return 0.0;
    check_qubits(qubits);
    return device_.gate_cost(name, qubits).error;
  }

  /// Scheduling duration of a gate in microseconds (0 when noiseless).
  double duration(const std::string& name, const std::vector<int>& qubits) const {
    if (!enabled_) return 0.0;
    check_qubits(qubits);
    return device_.gate_cost(name, qubits).duration_us;
  }

  /// Relaxation channel for qubit q idling for `dt` microseconds.
  std::optional<KrausChannel> idle_channel(int q, double dt) const {
    if (!has_idle_noise() || dt <= 0) return std::nullopt;
    check_qubits({q});
    const QubitSpec& s = device_.qubits[static_cast<std::size_t>(q)];
    if (std::isinf(s.t1_us) && std::isinf(s.t2_us)) return std::nullopt;
    return relaxation_channel(dt, s.t1_us, s.t2_us);
  }

  /// (p(read 1 | 0), p(read 0 | 1)) for qubit q.
  std::pair<double, double> readout(int q) const {
    if (!enabled_ || !options_.readout) return {0.0, 0.0};
    check_qubits({q});
    const QubitSpec& s = device_.qubits[static_cast<std::size_t>(q)];
    return {s.readout_p1_given_0, s.readout_p0_given_1};
  }

  /// Throws std::out_of_range for qubits outside the device.
  void check_qubits(const std::vector<int>& qubits) const {
    for (int q : qubits) {
      if (q < 0 || q >= device_.num_qubits) {
        throw std::out_of_range("qubit " + std::to_string(q) + " is not covered by the noise model");
      }
    }
  }

 private:
  DeviceModel device_;
  NoiseOptions options_ = NoiseOptions::none();
  bool enabled_ = false;
};

/// Builds the simulation noise model of a device. Circuits simulated under
/// it address device qubits directly; use DeviceModel::restricted to map a
/// compact circuit onto a layout first.
inline NoiseModel noise_from_device(const DeviceModel& device, NoiseOptions options = {}) {
  return NoiseModel(device, options);
}

}  // namespace qflag
