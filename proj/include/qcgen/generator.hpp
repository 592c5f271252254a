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

#ifndef QCGEN_GENERATOR_HPP
#define QCGEN_GENERATOR_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qcgen/autodiff.hpp"
#include "qcgen/circuit.hpp"
#include "qcgen/encoder.hpp"
#include "qcgen/random.hpp"

namespace qcgen {

struct SamplingStrategy {
    enum class Kind { Stochastic, TopK };
    Kind kind = Kind::Stochastic;
    int k = 0;

    static SamplingStrategy stochastic() { return {}; }
    static SamplingStrategy top_k(int k) { return {Kind::TopK, k}; }
    /// "stochastic" or "top-k:<k>".
    static SamplingStrategy parse(const std::string &text);
    std::string name() const;
};

struct GeneratorConfig {
    int n_qubits = 3;
    int hidden_dim = kDefaultHiddenDim;
    int latent_dim = kDefaultHiddenDim;
    int max_len = kDefaultMaxLen;
};

/// Gaussian posterior over the latent vector.
struct Posterior {
    nn::Vector mu;
    nn::Vector sigma;
};

/// Per-step record of a sampled decode.
struct DecodeStep {
    nn::Vector probs;  // after mask and strategy restriction
    int chosen;
};

/// Pairs a target circuit with a compiled circuit for training.
struct CircuitPair {
    const CircuitDag *target;
    const CircuitDag *compiled;
};

/// Conditional DAG VAE: target DAG -> latent Gaussian -> native-gate DAG.
class Generator {
   public:
    Generator(GeneratorConfig config, std::uint64_t seed);
    Generator(const Generator &other);
    Generator(Generator &&) = default;
    Generator &operator=(const Generator &) = delete;

    /// Rebuilds a generator from a checkpoint written by save().
    static Generator load(const std::string &path);
    void save(const std::string &path, nlohmann::json extra = {}) const;
    nlohmann::json metadata() const;

    const GeneratorConfig &config() const { return config_; }
    nn::ParamStore &params() { return store_; }
    const nn::ParamStore &params() const { return store_; }
    const OpVocabulary &target_vocab() const { return target_vocab_; }
    /// Native decoder vocabulary with the active connectivity mask.
    const OpVocabulary &decoder_vocab() const { return decoder_vocab_; }
    void set_connectivity(const Connectivity &conn);

    Posterior encode(const CircuitDag &target) const;
    std::pair<nn::Var, nn::Var> encode(nn::Tape &tape, const GraphInput &target) const;

    /// z = mu + sigma * eps with eps ~ N(0, I).
    static nn::Vector reparameterize(const Posterior &post, Rng &rng);

    /// Autoregressive decoding; appends End once max_len gates were emitted.
    CircuitDag decode_sample(const nn::Vector &z, const SamplingStrategy &strategy, Rng &rng,
                             std::vector<DecodeStep> *trace = nullptr) const;

    /// Sum over steps of the masked cross-entropy of the true next node,
    /// including the final End. `correct`, when given, counts argmax hits.
    nn::Var teacher_forced_nll(nn::Tape &tape, nn::Var z, const CircuitDag &compiled, int *correct = nullptr) const;

    /// Sum over the batch of nll + lambda * KL, accumulating gradients into
    /// params(). Returns {total, reconstruction, kl}.
    struct LossParts {
        double total = 0;
        double reconstruction = 0;
        double kl = 0;
    };
    LossParts elbo_step(std::span<const CircuitPair> batch, double lambda, Rng &rng);

   private:
    GeneratorConfig config_;
    nn::ParamStore store_;
    OpVocabulary target_vocab_;
    OpVocabulary decoder_vocab_;
    GraphEncoder encoder_;
    nn::Linear mu_head_;
    nn::Linear sigma_head_;
    nn::Linear init_;
    PropagationBlock decoder_;
    nn::Linear out_;

    Generator(GeneratorConfig config);
    void bind_layers();
};

struct GeneratorTrainConfig {
    int epochs = 400;
    int batch_size = 32;
    double learning_rate = 1e-4;
    double kl_weight = 1e-5;
    std::uint64_t seed = 0;
    /// Save a checkpoint every this many epochs (0 disables) into checkpoint_dir.
    int checkpoint_every = 0;
    std::string checkpoint_dir;
};

struct EpochLog {
    int epoch;
    double loss;            // per-sample mean
    double reconstruction;  // per-sample mean
    double kl;              // per-sample mean
};

/// Adam over seeded-shuffled mini-batches. `on_epoch` may be empty.
std::vector<EpochLog> train_generator(Generator &gen, std::span<const CircuitPair> data,
                                      const GeneratorTrainConfig &config,
                                      const std::function<void(const EpochLog &)> &on_epoch = {});

/// Teacher-forced next-node accuracy with z = mu.
double teacher_forced_accuracy(const Generator &gen, std::span<const CircuitPair> data);

/// Indices kept by top-k (ties broken by lower index) among permitted entries.
std::vector<int> top_k_support(const nn::Vector &probs, int k);

}  // namespace qcgen

#endif  // QCGEN_GENERATOR_HPP
