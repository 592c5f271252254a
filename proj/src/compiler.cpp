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

#include "qcgen/compiler.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "qcgen/circuit_io.hpp"
#include "qcgen/dataset.hpp"
#include "qcgen/error.hpp"
#include "qcgen/parallel.hpp"
#include "qcgen/random.hpp"

namespace qcgen {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Separate streams for latent draws, candidate fine-tuning and the baseline.
constexpr std::uint64_t kDrawStream = 0x6472617773ULL;
constexpr std::uint64_t kTuneStream = 0x74756e65ULL;
constexpr std::uint64_t kBaselineStream = 0x62617365ULL;

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void check_config(const CompileConfig &config) {
    if (config.n_candidates < 1) {
        throw InvalidArgument("n_candidates must be >= 1");
    }
    if (config.strategy.kind == SamplingStrategy::Kind::TopK && config.strategy.k < 1) {
        throw InvalidArgument("top-k needs k >= 1");
    }
}

}  // namespace

nlohmann::json CompileConfig::to_json() const {
    nlohmann::json j = {{"n_candidates", n_candidates},
                        {"strategy", strategy.name()},
                        {"connectivity", connectivity},
                        {"filter_threshold", filter_threshold},
                        {"finetune", finetune.to_json()},
                        {"seed", seed}};
    if (strategy.kind == SamplingStrategy::Kind::TopK) {
        j["top_k"] = strategy.k;
    }
    return j;
}

const CandidateRecord &CompileReport::best_candidate() const {
    if (best < 0) {
        throw InvalidArgument("report has no fine-tuned candidate");
    }
    return candidates[best];
}

double CompileReport::best_loss() const {
    return best_candidate().loss;
}

nlohmann::json CompileReport::to_json() const {
    nlohmann::json cands = nlohmann::json::array();
    for (const CandidateRecord &c : candidates) {
        nlohmann::json j = {{"key", c.key},
                            {"first_draw", c.first_draw},
                            {"multiplicity", c.multiplicity},
                            {"fine_tuned", c.fine_tuned},
                            {"length", c.metrics.length},
                            {"depth", c.metrics.depth}};
        if (c.predicted) j["predicted"] = *c.predicted;
        if (c.fine_tuned) {
            j["loss"] = c.loss;
            j["steps"] = c.steps;
            j["finetune_seed"] = c.finetune_seed;
            j["circuit"] = circuit_to_json(c.circuit);
        }
        cands.push_back(std::move(j));
    }
    nlohmann::json j = {{"target_id", target_id},
                        {"target", circuit_to_json(target)},
                        {"draws", generated_keys.size()},
                        {"distinct", candidates.size()},
                        {"filter_failed_open", filter_failed_open},
                        {"best", best},
                        {"candidates", std::move(cands)}};
    if (best >= 0) {
        j["best_loss"] = best_loss();
    }
    return j;
}

CompileReport compile(const CircuitDag &target, const Generator &gen, const Predictor *pred,
                      const CompileConfig &config, const std::string &target_id) {
    check_config(config);
    if (target.n_qubits() != gen.config().n_qubits) {
        throw InvalidArgument("target qubit count does not match the generator");
    }
    if (pred) {
        if (pred->target_vocab().hash() != gen.target_vocab().hash() ||
            pred->config().n_qubits != gen.config().n_qubits) {
            throw VocabularyMismatch("predictor and generator use different target vocabularies");
        }
        if (pred->config().max_len < gen.config().max_len) {
            throw InvalidArgument("predictor max_len is shorter than the generator's");
        }
    }

    // A copy only when the mask must change; gen stays read-only.
    std::optional<Generator> masked;
    const Generator *active = &gen;
    if (!config.connectivity.empty() && config.connectivity != gen.decoder_vocab().connectivity_name()) {
        masked.emplace(gen);
        masked->set_connectivity(Connectivity::from_name(config.connectivity, gen.config().n_qubits));
        active = &*masked;
    }

    CompileReport report;
    report.target_id = target_id;
    report.target = target;
    auto start = Clock::now();

    Posterior post = active->encode(target);
    std::map<std::string, int> index_of;
    // Streams depend on the target too, so a batch does not repeat draws.
    std::uint64_t target_seed = mix_seed(config.seed, fnv1a(serialize_circuit(target)));
    std::uint64_t draw_seed = mix_seed(target_seed, kDrawStream);
    for (int i = 0; i < config.n_candidates; i++) {
        Rng rng(mix_seed(draw_seed, i));
        nn::Vector z = Generator::reparameterize(post, rng);
        CircuitDag dag = active->decode_sample(z, config.strategy, rng);
        std::string key = canonical_key(dag);
        report.generated_keys.push_back(key);
        auto [it, fresh] = index_of.emplace(key, static_cast<int>(report.candidates.size()));
        if (fresh) {
            CandidateRecord c;
            c.key = key;
            c.metrics = circuit_metrics(dag);
            c.circuit = std::move(dag);
            c.first_draw = i;
            report.candidates.push_back(std::move(c));
        }
        report.candidates[it->second].multiplicity++;
    }
    report.timings.generate = seconds_since(start);

    std::vector<int> survivors(report.candidates.size());
    std::iota(survivors.begin(), survivors.end(), 0);
    if (pred) {
        auto t = Clock::now();
        std::vector<double> predictions;
        for (CandidateRecord &c : report.candidates) {
            c.predicted = pred->predict(target, c.circuit);
            predictions.push_back(*c.predicted);
        }
        survivors = filter_candidates(predictions, config.filter_threshold);
        report.filter_failed_open =
            std::none_of(predictions.begin(), predictions.end(),
                         [&](double p) { return std::clamp(p, 0.0, 1.0) <= config.filter_threshold; });
        report.timings.predict = seconds_since(t);
    }

    auto t = Clock::now();
    std::uint64_t tune_seed = mix_seed(target_seed, kTuneStream);
    parallel_for(static_cast<int>(survivors.size()), config.threads, [&](int s) {
        CandidateRecord &c = report.candidates[survivors[s]];
        FineTuneConfig ft = config.finetune;
        ft.seed = mix_seed(tune_seed, c.first_draw);
        FineTuneResult r = fine_tune(c.circuit, target, ft);
        c.circuit.set_params(r.params);
        c.loss = r.loss;
        c.steps = r.steps;
        c.finetune_seed = ft.seed;
        c.fine_tuned = true;
    });
    report.timings.fine_tune = seconds_since(t);

    for (int s : survivors) {
        if (report.best < 0 || report.candidates[s].loss < report.candidates[report.best].loss) {
            report.best = s;
        }
    }
    report.timings.total = seconds_since(start);
    return report;
}

BaselineResult random_baseline(const CircuitDag &target, std::span<const int> lengths, const CompileConfig &config) {
    check_config(config);
    std::optional<Connectivity> conn;
    if (!config.connectivity.empty()) {
        conn = Connectivity::from_name(config.connectivity, target.n_qubits());
    }
    BaselineResult result;
    result.losses.assign(lengths.size(), 1.0);
    std::uint64_t base = mix_seed(mix_seed(config.seed, fnv1a(serialize_circuit(target))), kBaselineStream);
    parallel_for(static_cast<int>(lengths.size()), config.threads, [&](int i) {
        Rng rng(mix_seed(base, i));
        CircuitDag s = random_structure(rng, lengths[i], target.n_qubits(), conn ? &*conn : nullptr);
        FineTuneConfig ft = config.finetune;
        ft.seed = mix_seed(base ^ kTuneStream, i);
        result.losses[i] = fine_tune(s, target, ft).loss;
    });
    if (!result.losses.empty()) {
        result.best_loss = *std::min_element(result.losses.begin(), result.losses.end());
    }
    return result;
}

nlohmann::json EvalSummary::to_json() const {
    return {{"loss", mean_loss},   {"L", mean_length}, {"D", mean_depth},
            {"uniqueness", uniqueness}, {"novelty", novelty}, {"targets", targets},
            {"generated", generated}};
}

EvalSummary eval_metrics(std::span<const CompileReport> reports, const std::set<std::string> &training_keys) {
    if (reports.empty()) {
        throw InvalidArgument("eval_metrics needs at least one report");
    }
    EvalSummary s;
    std::set<std::string> unique;
    int novel = 0;
    for (const CompileReport &r : reports) {
        for (const std::string &key : r.generated_keys) {
            unique.insert(key);
            novel += training_keys.count(key) == 0;
            s.generated++;
        }
        if (r.best >= 0) {
            const CandidateRecord &b = r.best_candidate();
            s.mean_loss += b.loss;
            s.mean_length += b.metrics.length;
            s.mean_depth += b.metrics.depth;
            s.targets++;
        }
    }
    if (s.targets > 0) {
        s.mean_loss /= s.targets;
        s.mean_length /= s.targets;
        s.mean_depth /= s.targets;
    }
    if (s.generated > 0) {
        s.uniqueness = 100.0 * static_cast<double>(unique.size()) / s.generated;
        s.novelty = 100.0 * novel / s.generated;
    }
    return s;
}

std::string reports_csv(std::span<const CompileReport> reports) {
    std::ostringstream out;
    out << "target_id,candidate,key,first_draw,multiplicity,predicted,fine_tuned,loss,L,D,steps,finetune_seed,best\n";
    for (const CompileReport &r : reports) {
        for (std::size_t i = 0; i < r.candidates.size(); i++) {
            const CandidateRecord &c = r.candidates[i];
            out << r.target_id << ',' << i << ',' << c.key << ',' << c.first_draw << ',' << c.multiplicity << ','
                << (c.predicted ? format_double(*c.predicted) : "") << ',' << (c.fine_tuned ? 1 : 0) << ','
                << (c.fine_tuned ? format_double(c.loss) : "") << ',' << c.metrics.length << ','
                << c.metrics.depth << ',' << c.steps << ',' << c.finetune_seed << ','
                << (static_cast<int>(i) == r.best ? 1 : 0) << '\n';
        }
    }
    return out.str();
}

}  // namespace qcgen
