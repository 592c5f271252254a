// Copyright 2026 The qcgen Authors
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

#ifndef QCGEN_FINETUNE_HPP
#define QCGEN_FINETUNE_HPP

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "qcgen/circuit.hpp"

namespace qcgen {

struct FineTuneConfig {
    int max_steps = 200;
    double learning_rate = 0.05;
    int restarts = 3;
    /// Stop a restart once the loss changes by less than this between steps.
    double tolerance = 1e-7;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static FineTuneConfig from_json(const nlohmann::json &j);
};

struct FineTuneResult {
    std::vector<double> params;
    double loss = 1.0;
    /// Optimizer steps summed over restarts.
    int steps = 0;
    int best_restart = 0;
    /// Loss at every evaluated point of the winning restart.
    std::vector<double> trace;
};

/// Minimizes the LHST cost of `compiled` against `target` over the compiled
/// circuit's continuous parameters with Adam. Each restart draws its initial
/// angles uniformly from [0, 2pi); the best point seen is returned.
FineTuneResult fine_tune(const CircuitDag &compiled, const CircuitDag &target, const FineTuneConfig &config);

}  // namespace qcgen

#endif  // QCGEN_FINETUNE_HPP
