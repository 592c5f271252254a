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

#include "qcgen/finetune.hpp"

#include <cmath>
#include <numbers>

#include "qcgen/autodiff.hpp"
#include "qcgen/error.hpp"
#include "qcgen/random.hpp"
#include "qcgen/simulator.hpp"

namespace qcgen {

nlohmann::json FineTuneConfig::to_json() const {
    return {{"max_steps", max_steps},
            {"learning_rate", learning_rate},
            {"restarts", restarts},
            {"tolerance", tolerance},
            {"seed", seed}};
}

FineTuneConfig FineTuneConfig::from_json(const nlohmann::json &j) {
    FineTuneConfig c;
    c.max_steps = j.value("max_steps", c.max_steps);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.restarts = j.value("restarts", c.restarts);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.seed = j.value("seed", c.seed);
    return c;
}

FineTuneResult fine_tune(const CircuitDag &compiled, const CircuitDag &target, const FineTuneConfig &config) {
    if (config.restarts < 1 || config.max_steps < 0 || !(config.tolerance > 0)) {
        throw InvalidArgument("fine-tune needs restarts >= 1, max_steps >= 0 and tolerance > 0");
    }
    if (compiled.n_qubits() != target.n_qubits()) {
        throw InvalidArgument("target and compiled circuits act on different qubit counts");
    }
    LhstProblem problem(target, target.params(), compiled);
    int m = problem.param_count();
    FineTuneResult result;
    if (m == 0) {
        result.loss = problem.cost({});
        result.trace = {result.loss};
        return result;
    }

    std::vector<double> grad(m);
    for (int restart = 0; restart < config.restarts; restart++) {
        Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(restart)));
        nn::ParamStore store;
        nn::Parameter &theta = store.add_zero("theta", m, 1);
        for (int i = 0; i < m; i++) {
            theta.value(i, 0) = 2 * std::numbers::pi * uniform01(rng);
        }
        nn::Adam adam(store, nn::AdamConfig{.learning_rate = config.learning_rate});
        std::vector<double> trace;
        double best = INFINITY;
        std::vector<double> best_params;
        double prev = NAN;
        for (int step = 0;; step++) {
            std::span<const double> x(theta.value.data(), m);
            double loss = problem.cost_and_grad(x, grad);
            trace.push_back(loss);
            if (loss < best) {
                best = loss;
                best_params.assign(x.begin(), x.end());
            }
            if (step == config.max_steps || std::abs(prev - loss) < config.tolerance) {
                break;
            }
            prev = loss;
            for (int i = 0; i < m; i++) {
                theta.grad(i, 0) = grad[i];
            }
            adam.step();
            result.steps++;
        }
        if (restart == 0 || best < result.loss) {
            result.loss = best;
            result.params = std::move(best_params);
            result.best_restart = restart;
            result.trace = std::move(trace);
        }
    }
    return result;
}

}  // namespace qcgen
