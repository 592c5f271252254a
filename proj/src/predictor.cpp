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

#include "qcgen/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qcgen/error.hpp"
#include "qcgen/random.hpp"

namespace qcgen {

using nn::Tape;
using nn::Var;

Predictor::Predictor(PredictorConfig config)
    : config_(config),
      target_vocab_(OpVocabulary::build(target_gate_set(), config.n_qubits, Connectivity::full(config.n_qubits),
                                        VocabRole::Encoder)),
      compiled_vocab_(OpVocabulary::build(native_gate_set(), config.n_qubits, Connectivity::full(config.n_qubits),
                                          VocabRole::Encoder)) {
    if (config.hidden_dim < 1 || config.max_len < 1) {
        throw InvalidArgument("predictor dimensions must be positive");
    }
}

Predictor::Predictor(PredictorConfig config, std::uint64_t seed) : Predictor(config) {
    Rng rng(seed);
    int h = config.hidden_dim;
    int positions = config.max_len + 2;
    GraphEncoder::create(store_, "tgt", target_vocab_.size(), h, positions, rng);
    GraphEncoder::create(store_, "cmp", compiled_vocab_.size(), h, positions, rng);
    nn::Linear::create(store_, "head.hidden", 2 * h, h, true, rng);
    nn::Linear::create(store_, "head.out", h, 1, true, rng);
    bind_layers();
}

Predictor::Predictor(const Predictor &other)
    : config_(other.config_),
      store_(other.store_),
      target_vocab_(other.target_vocab_),
      compiled_vocab_(other.compiled_vocab_) {
    bind_layers();
}

void Predictor::bind_layers() {
    target_encoder_ = GraphEncoder::bind(store_, "tgt");
    compiled_encoder_ = GraphEncoder::bind(store_, "cmp");
    hidden_ = nn::Linear::bind(store_, "head.hidden", true);
    output_ = nn::Linear::bind(store_, "head.out", true);
}

nlohmann::json Predictor::metadata() const {
    return {{"model", "predictor"},
            {"n_qubits", config_.n_qubits},
            {"hidden_dim", config_.hidden_dim},
            {"max_len", config_.max_len},
            {"target_vocab_hash", hex64(target_vocab_.hash())},
            {"compiled_vocab_hash", hex64(compiled_vocab_.hash())}};
}

void Predictor::save(const std::string &path, nlohmann::json extra) const {
    nlohmann::json meta = metadata();
    if (!extra.is_null()) {
        meta["extra"] = std::move(extra);
    }
    store_.save(path, meta);
}

Predictor Predictor::load(const std::string &path) {
    nlohmann::json meta = nn::read_checkpoint_metadata(path);
    if (!meta.is_object() || meta.value("model", "") != "predictor") {
        throw CheckpointMismatch("'" + path + "' is not a predictor checkpoint");
    }
    PredictorConfig cfg;
    try {
        cfg.n_qubits = meta.at("n_qubits");
        cfg.hidden_dim = meta.at("hidden_dim");
        cfg.max_len = meta.at("max_len");
    } catch (const nlohmann::json::exception &e) {
        throw CorruptDataError(std::string("predictor checkpoint metadata: ") + e.what());
    }
    Predictor pred(cfg, 0);
    if (meta.value("target_vocab_hash", "") != hex64(pred.target_vocab_.hash()) ||
        meta.value("compiled_vocab_hash", "") != hex64(pred.compiled_vocab_.hash())) {
        throw VocabularyMismatch("predictor checkpoint '" + path + "' was trained on a different vocabulary");
    }
    pred.store_.load(path);
    return pred;
}

Var Predictor::predict(Tape &tape, const GraphInput &target, const GraphInput &compiled) const {
    Var ht = target_encoder_.graph_state(tape, target);
    Var hc = compiled_encoder_.graph_state(tape, compiled);
    return output_(nn::relu(hidden_(nn::concat(ht, hc))));
}

double Predictor::predict(const CircuitDag &target, const CircuitDag &compiled) const {
    Tape tape;
    return predict(tape, graph_input(target, target_vocab_), graph_input(compiled, compiled_vocab_)).scalar();
}

double predictor_mse_step(Predictor &pred, std::span<const LabeledPair> batch) {
    if (batch.empty()) {
        throw InvalidArgument("empty batch");
    }
    Tape tape;
    std::vector<Var> terms;
    for (const LabeledPair &s : batch) {
        Var y = pred.predict(tape, graph_input(*s.target, pred.target_vocab()),
                             graph_input(*s.compiled, pred.compiled_vocab()));
        terms.push_back(nn::squared_error(y, s.loss));
    }
    Var mse = nn::scale(nn::add_n(terms), 1.0 / static_cast<double>(batch.size()));
    tape.backward(mse);
    return mse.scalar();
}

double predictor_mse(const Predictor &pred, std::span<const LabeledPair> data) {
    double total = 0;
    for (const LabeledPair &s : data) {
        double d = pred.predict(*s.target, *s.compiled) - s.loss;
        total += d * d;
    }
    return data.empty() ? 0.0 : total / static_cast<double>(data.size());
}

std::vector<double> train_predictor(Predictor &pred, std::span<const LabeledPair> data,
                                    const PredictorTrainConfig &config,
                                    const std::function<void(int, double)> &on_epoch) {
    if (data.empty()) {
        throw InvalidArgument("cannot train on an empty dataset");
    }
    for (const LabeledPair &s : data) {
        if (!(s.loss >= 0 && s.loss <= 1)) {
            throw InvalidArgument("predictor labels must lie in [0, 1]");
        }
    }
    if (config.batch_size < 1 || config.epochs < 0) {
        throw InvalidArgument("bad training configuration");
    }
    Rng rng(config.seed);
    nn::Adam adam(pred.params(), nn::AdamConfig{.learning_rate = config.learning_rate});
    std::vector<std::size_t> order(data.size());
    std::vector<LabeledPair> batch;
    std::vector<double> logs;
    for (int epoch = 0; epoch < config.epochs; epoch++) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        double sum = 0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            batch.clear();
            for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); i++) {
                batch.push_back(data[order[i]]);
            }
            sum += predictor_mse_step(pred, batch) * static_cast<double>(batch.size());
            adam.step();
        }
        logs.push_back(sum / static_cast<double>(data.size()));
        if (on_epoch) {
            on_epoch(epoch, logs.back());
        }
    }
    return logs;
}

std::vector<int> filter_candidates(std::span<const double> predictions, double threshold) {
    std::vector<int> kept;
    for (int i = 0; i < static_cast<int>(predictions.size()); i++) {
        if (std::clamp(predictions[i], 0.0, 1.0) <= threshold) {
            kept.push_back(i);
        }
    }
    if (kept.empty()) {
        kept.resize(predictions.size());
        std::iota(kept.begin(), kept.end(), 0);
    }
    return kept;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw InvalidArgument("pearson needs two sequences of equal length >= 2");
    }
    double n = static_cast<double>(xs.size());
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); i++) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0) {
        throw UndefinedCorrelation("correlation is undefined for a constant sequence");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace qcgen
