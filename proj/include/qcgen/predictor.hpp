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

#ifndef QCGEN_PREDICTOR_HPP
#define QCGEN_PREDICTOR_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qcgen/autodiff.hpp"
#include "qcgen/circuit.hpp"
#include "qcgen/encoder.hpp"

namespace qcgen {

struct PredictorConfig {
    int n_qubits = 3;
    int hidden_dim = kDefaultHiddenDim;
    int max_len = kDefaultMaxLen;
};

/// A labeled (target, compiled, loss) triple.
struct LabeledPair {
    const CircuitDag *target;
    const CircuitDag *compiled;
    double loss;
};

/// Regresses the post-fine-tuning loss of a (target, compiled) pair from the
/// two graph states through Linear -> relu -> Linear.
class Predictor {
   public:
    Predictor(PredictorConfig config, std::uint64_t seed);
    Predictor(const Predictor &other);
    Predictor(Predictor &&) = default;
    Predictor &operator=(const Predictor &) = delete;

    static Predictor load(const std::string &path);
    void save(const std::string &path, nlohmann::json extra = {}) const;
    nlohmann::json metadata() const;

    const PredictorConfig &config() const { return config_; }
    nn::ParamStore &params() { return store_; }
    const nn::ParamStore &params() const { return store_; }
    const OpVocabulary &target_vocab() const { return target_vocab_; }
    const OpVocabulary &compiled_vocab() const { return compiled_vocab_; }

    /// Raw (unclamped) prediction.
    double predict(const CircuitDag &target, const CircuitDag &compiled) const;
    nn::Var predict(nn::Tape &tape, const GraphInput &target, const GraphInput &compiled) const;

   private:
    PredictorConfig config_;
    nn::ParamStore store_;
    OpVocabulary target_vocab_;
    OpVocabulary compiled_vocab_;
    GraphEncoder target_encoder_;
    GraphEncoder compiled_encoder_;
    nn::Linear hidden_;
    nn::Linear output_;

    explicit Predictor(PredictorConfig config);
    void bind_layers();
};

struct PredictorTrainConfig {
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 1e-4;
    std::uint64_t seed = 0;
};

/// Mean squared error over the batch. Gradients accumulate into params().
double predictor_mse_step(Predictor &pred, std::span<const LabeledPair> batch);

/// Adam over seeded-shuffled mini-batches; returns the per-epoch train MSE.
std::vector<double> train_predictor(Predictor &pred, std::span<const LabeledPair> data,
                                    const PredictorTrainConfig &config,
                                    const std::function<void(int, double)> &on_epoch = {});

/// Mean squared error of raw predictions.
double predictor_mse(const Predictor &pred, std::span<const LabeledPair> data);

/// Indices (in input order) of candidates whose clamped prediction is at most
/// `threshold`. Returns every index when nothing passes.
std::vector<int> filter_candidates(std::span<const double> predictions, double threshold);

/// Sample Pearson correlation. Throws UndefinedCorrelation on zero variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace qcgen

#endif  // QCGEN_PREDICTOR_HPP
