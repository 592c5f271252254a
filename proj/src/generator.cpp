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

#include "qcgen/generator.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "qcgen/error.hpp"

namespace qcgen {

using nn::Tape;
using nn::Var;
using nn::Vector;

SamplingStrategy SamplingStrategy::parse(const std::string &text) {
    if (text == "stochastic") {
        return stochastic();
    }
    const std::string prefix = "top-k:";
    if (text.rfind(prefix, 0) == 0) {
        std::string digits = text.substr(prefix.size());
        if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit) && digits.size() < 6) {
            int k = std::stoi(digits);
            if (k >= 1) {
                return top_k(k);
            }
        }
    }
    throw InvalidArgument("unknown sampling strategy '" + text + "' (expected stochastic or top-k:<k>)");
}

std::string SamplingStrategy::name() const {
    return kind == Kind::Stochastic ? "stochastic" : "top-k:" + std::to_string(k);
}

std::vector<int> top_k_support(const Vector &probs, int k) {
    std::vector<int> idx;
    for (int i = 0; i < probs.size(); i++) {
        if (probs(i) > 0) {
            idx.push_back(i);
        }
    }
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return probs(a) > probs(b); });
    if (static_cast<int>(idx.size()) > k) {
        idx.resize(k);
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

namespace {

OpVocabulary make_target_vocab(int n) {
    return OpVocabulary::build(target_gate_set(), n, Connectivity::full(n), VocabRole::Encoder);
}

OpVocabulary make_decoder_vocab(int n) {
    return OpVocabulary::build(native_gate_set(), n, Connectivity::full(n), VocabRole::Decoder);
}

int sample_index(const Vector &probs, Rng &rng) {
    double u = uniform01(rng) * probs.sum();
    double acc = 0;
    int last = -1;
    for (int i = 0; i < probs.size(); i++) {
        if (probs(i) <= 0) {
            continue;
        }
        acc += probs(i);
        last = i;
        if (u < acc) {
            return i;
        }
    }
    return last;
}

}  // namespace

Generator::Generator(GeneratorConfig config)
    : config_(config),
      target_vocab_(make_target_vocab(config.n_qubits)),
      decoder_vocab_(make_decoder_vocab(config.n_qubits)) {
    if (config.hidden_dim < 1 || config.latent_dim < 1 || config.max_len < 1) {
        throw InvalidArgument("generator dimensions must be positive");
    }
}

Generator::Generator(GeneratorConfig config, std::uint64_t seed) : Generator(config) {
    Rng rng(seed);
    int h = config.hidden_dim;
    int positions = config.max_len + 2;
    GraphEncoder::create(store_, "enc", target_vocab_.size(), h, positions, rng);
    nn::Linear::create(store_, "mu", h, config.latent_dim, true, rng);
    nn::Linear::create(store_, "sigma", h, config.latent_dim, true, rng);
    nn::Linear::create(store_, "init", config.latent_dim, h, true, rng);
    PropagationBlock::create(store_, "dec", decoder_vocab_.size(), h, positions, rng);
    nn::Linear::create(store_, "out", h, decoder_vocab_.size(), true, rng);
    bind_layers();
}

Generator::Generator(const Generator &other)
    : config_(other.config_),
      store_(other.store_),
      target_vocab_(other.target_vocab_),
      decoder_vocab_(other.decoder_vocab_) {
    bind_layers();
}

void Generator::bind_layers() {
    encoder_ = GraphEncoder::bind(store_, "enc");
    mu_head_ = nn::Linear::bind(store_, "mu", true);
    sigma_head_ = nn::Linear::bind(store_, "sigma", true);
    init_ = nn::Linear::bind(store_, "init", true);
    decoder_ = PropagationBlock::bind(store_, "dec");
    out_ = nn::Linear::bind(store_, "out", true);
}

nlohmann::json Generator::metadata() const {
    return {{"model", "generator"},
            {"n_qubits", config_.n_qubits},
            {"hidden_dim", config_.hidden_dim},
            {"latent_dim", config_.latent_dim},
            {"max_len", config_.max_len},
            {"target_vocab_hash", hex64(target_vocab_.hash())},
            {"decoder_vocab_hash", hex64(decoder_vocab_.hash())}};
}

void Generator::save(const std::string &path, nlohmann::json extra) const {
    nlohmann::json meta = metadata();
    if (!extra.is_null()) {
        meta["extra"] = std::move(extra);
    }
    store_.save(path, meta);
}

Generator Generator::load(const std::string &path) {
    nlohmann::json meta = nn::read_checkpoint_metadata(path);
    if (!meta.is_object() || meta.value("model", "") != "generator") {
        throw CheckpointMismatch("'" + path + "' is not a generator checkpoint");
    }
    GeneratorConfig cfg;
    try {
        cfg.n_qubits = meta.at("n_qubits");
        cfg.hidden_dim = meta.at("hidden_dim");
        cfg.latent_dim = meta.at("latent_dim");
        cfg.max_len = meta.at("max_len");
    } catch (const nlohmann::json::exception &e) {
        throw CorruptDataError(std::string("generator checkpoint metadata: ") + e.what());
    }
    Generator gen(cfg, 0);
    if (meta.value("target_vocab_hash", "") != hex64(gen.target_vocab_.hash()) ||
        meta.value("decoder_vocab_hash", "") != hex64(gen.decoder_vocab_.hash())) {
        throw VocabularyMismatch("generator checkpoint '" + path + "' was trained on a different vocabulary");
    }
    gen.store_.load(path);
    return gen;
}

void Generator::set_connectivity(const Connectivity &conn) {
    decoder_vocab_ = decoder_vocab_.with_connectivity(conn);
}

std::pair<Var, Var> Generator::encode(Tape &tape, const GraphInput &target) const {
    Var h = encoder_.graph_state(tape, target);
    Var mu = mu_head_(h);
    Var sigma = nn::exp(nn::scale(sigma_head_(h), 0.5));
    return {mu, sigma};
}

Posterior Generator::encode(const CircuitDag &target) const {
    Tape tape;
    auto [mu, sigma] = encode(tape, graph_input(target, target_vocab_));
    return {mu.value(), sigma.value()};
}

Vector Generator::reparameterize(const Posterior &post, Rng &rng) {
    std::normal_distribution<double> normal;
    Vector z(post.mu.size());
    for (Eigen::Index i = 0; i < z.size(); i++) {
        z(i) = post.mu(i) + post.sigma(i) * normal(rng);
    }
    return z;
}

CircuitDag Generator::decode_sample(const Vector &z, const SamplingStrategy &strategy, Rng &rng,
                                    std::vector<DecodeStep> *trace) const {
    if (z.size() != config_.latent_dim) {
        throw InvalidArgument("latent vector has size " + std::to_string(z.size()) + ", expected " +
                              std::to_string(config_.latent_dim));
    }
    if (strategy.kind == SamplingStrategy::Kind::TopK && strategy.k < 1) {
        throw InvalidArgument("top-k needs k >= 1");
    }
    const std::vector<bool> &mask = decoder_vocab_.mask();
    if (!mask[decoder_vocab_.end_index()]) {
        throw InvalidArgument("End must never be masked");
    }
    Tape tape;
    Var h = nn::tanh(init_(tape.constant(z)));
    CircuitDag dag(config_.n_qubits);
    std::vector<Var> messages{decoder_.node_message(tape, h, 0)};
    std::vector<Var> incoming;
    while (dag.length() < config_.max_len) {
        Vector probs = nn::softmax_values(out_(h).value(), &mask);
        if (strategy.kind == SamplingStrategy::Kind::TopK) {
            Vector kept = Vector::Zero(probs.size());
            for (int i : top_k_support(probs, strategy.k)) {
                kept(i) = probs(i);
            }
            probs = kept / kept.sum();
        }
        int choice = sample_index(probs, rng);
        if (trace) {
            trace->push_back({probs, choice});
        }
        if (choice == decoder_vocab_.end_index()) {
            break;
        }
        const VocabEntry &entry = decoder_vocab_.entries()[choice];
        int v = dag.append_gate(entry.kind, entry.qubits);
        incoming.clear();
        for (int u : dag.predecessors(v)) {
            incoming.push_back(messages[u]);
        }
        h = decoder_.node_state(tape, choice, incoming);
        messages.push_back(decoder_.node_message(tape, h, v));
    }
    dag.finalize();
    return dag;
}

Var Generator::teacher_forced_nll(Tape &tape, Var z, const CircuitDag &compiled, int *correct) const {
    if (compiled.n_qubits() != config_.n_qubits) {
        throw InvalidArgument("compiled circuit has the wrong qubit count");
    }
    if (compiled.length() > config_.max_len) {
        throw InvalidArgument("compiled circuit of length " + std::to_string(compiled.length()) +
                              " exceeds max_len " + std::to_string(config_.max_len));
    }
    if (!compiled.finalized()) {
        throw InvalidArgument("compiled circuit is not finalized");
    }
    const std::vector<bool> &mask = decoder_vocab_.mask();
    Var h = nn::tanh(init_(z));
    std::vector<Var> messages{decoder_.node_message(tape, h, 0)};
    std::vector<Var> terms;
    std::vector<Var> incoming;
    const auto &nodes = compiled.nodes();
    for (int v = 1; v < compiled.node_count(); v++) {
        int token = decoder_vocab_.index_of(nodes[v]);
        Var logits = out_(h);
        terms.push_back(nn::softmax_cross_entropy(logits, token, &mask));
        if (correct) {
            Vector p = nn::softmax_values(logits.value(), &mask);
            Eigen::Index best;
            p.maxCoeff(&best);
            *correct += best == token ? 1 : 0;
        }
        if (nodes[v].type == NodeType::End) {
            break;
        }
        incoming.clear();
        for (int u : compiled.predecessors(v)) {
            incoming.push_back(messages[u]);
        }
        h = decoder_.node_state(tape, token, incoming);
        messages.push_back(decoder_.node_message(tape, h, v));
    }
    return nn::add_n(terms);
}

Generator::LossParts Generator::elbo_step(std::span<const CircuitPair> batch, double lambda, Rng &rng) {
    if (batch.empty()) {
        throw InvalidArgument("empty batch");
    }
    Tape tape;
    std::vector<Var> terms;
    LossParts parts;
    std::normal_distribution<double> normal;
    for (const CircuitPair &pair : batch) {
        auto [mu, sigma] = encode(tape, graph_input(*pair.target, target_vocab_));
        Vector eps(config_.latent_dim);
        for (Eigen::Index i = 0; i < eps.size(); i++) {
            eps(i) = normal(rng);
        }
        Var z = nn::add(mu, nn::mul(sigma, tape.constant(std::move(eps))));
        Var nll = teacher_forced_nll(tape, z, *pair.compiled);
        Var kl = nn::kl_standard_normal(mu, sigma);
        parts.reconstruction += nll.scalar();
        parts.kl += kl.scalar();
        terms.push_back(nn::add(nll, nn::scale(kl, lambda)));
    }
    Var total = nn::add_n(terms);
    parts.total = total.scalar();
    tape.backward(total);
    return parts;
}

std::vector<EpochLog> train_generator(Generator &gen, std::span<const CircuitPair> data,
                                      const GeneratorTrainConfig &config,
                                      const std::function<void(const EpochLog &)> &on_epoch) {
    if (data.empty()) {
        throw InvalidArgument("cannot train on an empty dataset");
    }
    if (config.batch_size < 1 || config.epochs < 0) {
        throw InvalidArgument("bad training configuration");
    }
    Rng rng(config.seed);
    nn::Adam adam(gen.params(), nn::AdamConfig{.learning_rate = config.learning_rate});
    std::vector<std::size_t> order(data.size());
    std::vector<CircuitPair> batch;
    std::vector<EpochLog> logs;
    for (int epoch = 0; epoch < config.epochs; epoch++) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        EpochLog log{epoch, 0, 0, 0};
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            batch.clear();
            for (std::size_t i = start; i < std::min(order.size(), start + config.batch_size); i++) {
                batch.push_back(data[order[i]]);
            }
            auto parts = gen.elbo_step(batch, config.kl_weight, rng);
            adam.step();
            log.loss += parts.total;
            log.reconstruction += parts.reconstruction;
            log.kl += parts.kl;
        }
        double n = static_cast<double>(data.size());
        log.loss /= n;
        log.reconstruction /= n;
        log.kl /= n;
        logs.push_back(log);
        if (on_epoch) {
            on_epoch(log);
        }
        if (config.checkpoint_every > 0 && (epoch + 1) % config.checkpoint_every == 0) {
            std::filesystem::create_directories(config.checkpoint_dir);
            auto path = std::filesystem::path(config.checkpoint_dir) /
                        ("generator_epoch" + std::to_string(epoch + 1) + ".ckpt");
            gen.save(path.string(), {{"epoch", epoch + 1}, {"seed", config.seed}});
        }
    }
    return logs;
}

double teacher_forced_accuracy(const Generator &gen, std::span<const CircuitPair> data) {
    long correct = 0;
    long total = 0;
    for (const CircuitPair &pair : data) {
        Posterior post = gen.encode(*pair.target);
        Tape tape;
        int hits = 0;
        gen.teacher_forced_nll(tape, tape.constant(post.mu), *pair.compiled, &hits);
        correct += hits;
        total += pair.compiled->node_count() - 1;
    }
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace qcgen
