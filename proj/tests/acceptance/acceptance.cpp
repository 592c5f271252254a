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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cli.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "qcgen/circuit_io.hpp"
#include "qcgen/compiler.hpp"
#include "qcgen/dataset.hpp"
#include "qcgen/error.hpp"
#include "qcgen/finetune.hpp"
#include "qcgen/generator.hpp"
#include "qcgen/predictor.hpp"
#include "qcgen/simulator.hpp"

namespace fs = std::filesystem;
using namespace qcgen;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Context {
    fs::path work;
    int threads = 1;
    std::uint64_t seed = 2026;
    std::optional<std::vector<Record>> generator_tasks;
    json results = json::object();
};

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

void progress(const std::string &message) {
    std::cerr << "  .. " << message << std::endl;
}

std::string num(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

std::string slurp(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// ---------------------------------------------------------------------------
// 1. LHST correctness

Outcome lhst_correctness(Context &) {
    std::vector<std::string> failures;
    std::mt19937_64 rng(101);
    double worst_equal = 0;
    for (int i = 0; i < 20; i++) {
        auto t = oracle::random_circuit(rng, target_gate_set(), 3, 4 + i % 3);
        worst_equal = std::max(worst_equal, lhst_cost(t, t.params(), t, t.params()));
    }
    if (!(worst_equal < 1e-12)) failures.push_back("identical circuits: " + num(worst_equal));

    // RX(pi) = -iX and RZ(2 pi) = -I differ from the target only by a phase.
    auto g = [](GateKind k, std::vector<int> q) { return GateOp{k, std::move(q), std::nullopt}; };
    CircuitDag target = CircuitDag::build(3, {g(GateKind::X, {0}), g(GateKind::CNOT, {0, 2})});
    CircuitDag phased = CircuitDag::build(
        3, {g(GateKind::RXPi, {0}), g(GateKind::CNOT, {0, 2}), g(GateKind::RZ, {1})}, {2 * std::numbers::pi});
    double phase = lhst_cost(target, {}, phased, phased.params());
    if (!(phase < 1e-12)) failures.push_back("global phase: " + num(phase));

    CircuitDag flip = CircuitDag::build(3, {g(GateKind::X, {0})});
    double third = lhst_cost(flip, {}, CircuitDag::build(3, {}), {});
    if (!(std::abs(third - 1.0 / 3.0) <= 1e-9)) failures.push_back("X on one of three qubits: " + num(third, 12));

    double worst = 0;
    for (int i = 0; i < 50; i++) {
        int n = 2 + i % 3;
        auto t = oracle::random_circuit(rng, target_gate_set(), n, 4 + i % 3);
        auto c = oracle::random_circuit(rng, native_gate_set(), n, 2 + i % 10);
        double sim = lhst_cost(t, t.params(), c, c.params());
        double ref = oracle::lhst_projection_oracle(oracle::circuit_unitary(t, t.params()),
                                                    oracle::circuit_unitary(c, c.params()), n);
        worst = std::max(worst, std::abs(sim - ref));
    }
    if (!(worst <= 1e-9)) failures.push_back("projection oracle gap " + num(worst));

    std::string detail = "equal " + num(worst_equal) + ", phase " + num(phase) + ", X|II " + num(third, 12) +
                         ", 50-pair max gap " + num(worst);
    for (const auto &f : failures) detail += "; FAILED " + f;
    return {failures.empty(), detail};
}

// ---------------------------------------------------------------------------
// 2. Gradient suite

constexpr double kGradTolerance = 1e-4;
// Components below this magnitude are compared on an absolute scale; central
// differences of O(1..10) losses carry ~1e-10 rounding noise.
constexpr double kGradFloor = 1e-5;

GeneratorConfig gradient_generator_config() {
    GeneratorConfig cfg;
    cfg.hidden_dim = 8;
    cfg.latent_dim = 8;
    cfg.max_len = 16;
    return cfg;
}

// Relative error at `per_tensor` random coordinates of every tensor.
double sampled_parameter_error(nn::ParamStore &store, const nn::ParamStore &analytic,
                               const std::function<double()> &eval, Rng &pick, int per_tensor) {
    double worst = 0;
    for (std::size_t k = 0; k < store.size(); k++) {
        nn::Parameter &p = store[k];
        for (int trial = 0; trial < per_tensor; trial++) {
            Eigen::Index i = static_cast<Eigen::Index>(pick() % p.value.size());
            // Five-point stencil: truncation O(h^4), rounding ~eps |f| / h.
            const double h = 1e-3;
            double x0 = p.value.data()[i];
            auto at = [&](double x) {
                p.value.data()[i] = x;
                return eval();
            };
            double numeric = (-at(x0 + 2 * h) + 8 * at(x0 + h) - 8 * at(x0 - h) + at(x0 - 2 * h)) / (12 * h);
            p.value.data()[i] = x0;
            worst = std::max(worst, oracle::relative_error(analytic[k].grad.data()[i], numeric, kGradFloor));
        }
    }
    return worst;
}

Outcome gradient_suite(Context &) {
    int instances = 0, failed = 0;
    double worst_lhst = 0, worst_elbo = 0, worst_pred = 0;

    std::mt19937_64 rng(202);
    for (int i = 0; i < 40; i++) {
        auto t = oracle::random_circuit(rng, target_gate_set(), 3, 4 + i % 3);
        CircuitDag c = oracle::random_circuit(rng, native_gate_set(), 3, 3 + i % 12);
        while (c.param_count() == 0) c = oracle::random_circuit(rng, native_gate_set(), 3, 3 + i % 12);
        auto grad = lhst_grad(t, t.params(), c, c.params());
        auto f = [&](const std::vector<double> &x) { return lhst_cost(t, t.params(), c, x); };
        double worst = 0;
        for (int k = 0; k < c.param_count(); k++) {
            worst = std::max(worst,
                             oracle::relative_error(grad[k], oracle::central_difference(f, c.params(), k), kGradFloor));
        }
        worst_lhst = std::max(worst_lhst, worst);
        instances++;
        failed += !(worst < kGradTolerance);
    }

    for (int i = 0; i < 30; i++) {
        Generator gen(gradient_generator_config(), 300 + i);
        Rng data_rng(400 + i);
        std::vector<CircuitDag> targets, compiled;
        for (int j = 0; j < 2; j++) {
            targets.push_back(gen_random_target(data_rng, 4 + (i + j) % 3));
            compiled.push_back(random_structure(data_rng, 3 + (i + 2 * j) % 8));
        }
        std::vector<CircuitPair> batch{{&targets[0], &compiled[0]}, {&targets[1], &compiled[1]}};
        const double lambda = 0.1 + 0.03 * i;
        gen.params().zero_grad();
        Rng eps(500 + i);
        gen.elbo_step(batch, lambda, eps);
        nn::ParamStore analytic = gen.params();
        auto eval = [&]() {
            Generator copy = gen;
            Rng r(500 + i);
            return copy.elbo_step(batch, lambda, r).total;
        };
        Rng pick(600 + i);
        double worst = sampled_parameter_error(gen.params(), analytic, eval, pick, 2);
        worst_elbo = std::max(worst_elbo, worst);
        instances++;
        failed += !(worst < kGradTolerance);
    }

    for (int i = 0; i < 30; i++) {
        PredictorConfig cfg;
        cfg.hidden_dim = 8;
        Predictor pred(cfg, 700 + i);
        Rng data_rng(800 + i);
        std::vector<CircuitDag> targets, compiled;
        for (int j = 0; j < 3; j++) {
            targets.push_back(gen_random_target(data_rng, 4 + (i + j) % 3));
            compiled.push_back(random_structure(data_rng, 8 + (i + j) % 10));
        }
        std::vector<LabeledPair> batch;
        for (int j = 0; j < 3; j++) batch.push_back({&targets[j], &compiled[j], uniform01(data_rng)});
        pred.params().zero_grad();
        predictor_mse_step(pred, batch);
        nn::ParamStore analytic = pred.params();
        auto eval = [&]() { return predictor_mse(pred, batch); };
        Rng pick(900 + i);
        double worst = sampled_parameter_error(pred.params(), analytic, eval, pick, 2);
        worst_pred = std::max(worst_pred, worst);
        instances++;
        failed += !(worst < kGradTolerance);
    }

    std::string detail = std::to_string(instances) + " instances, " + std::to_string(failed) +
                         " over tolerance; worst relative error lhst " + num(worst_lhst) + ", elbo " +
                         num(worst_elbo) + ", predictor " + num(worst_pred);
    return {failed == 0 && instances >= 100, detail};
}

// ---------------------------------------------------------------------------
// 3. Decoder validity and masking

bool valid_dag(const CircuitDag &dag, int max_len) {
    if (!dag.finalized() || dag.length() > max_len) return false;
    const auto &nodes = dag.nodes();
    if (nodes.front().type != NodeType::Start || nodes.back().type != NodeType::End) return false;
    for (auto [a, b] : dag.edges()) {
        if (a >= b) return false;
    }
    return CircuitDag::build(dag.n_qubits(), dag.gates(), dag.params()) == dag;
}

Outcome decoder_validity(Context &) {
    Generator full(GeneratorConfig{}, 31);
    Generator chain(GeneratorConfig{}, 31);
    chain.set_connectivity(Connectivity::chain(3));
    Rng data_rng(32);
    std::vector<CircuitDag> targets;
    for (int i = 0; i < 20; i++) targets.push_back(gen_random_target(data_rng, 4 + i % 3));
    std::vector<Posterior> posts_full, posts_chain;
    for (const auto &t : targets) {
        posts_full.push_back(full.encode(t));
        posts_chain.push_back(chain.encode(t));
    }

    int samples = 0, invalid = 0, forbidden = 0, outside_support = 0, chain_samples = 0, topk_samples = 0;
    const int max_len = full.config().max_len;
    const std::vector<int> ks{1, 5, 10, 25};
    for (int i = 0; i < 10000; i++) {
        bool use_chain = i % 2 == 1;
        const Generator &gen = use_chain ? chain : full;
        const Posterior &post = (use_chain ? posts_chain : posts_full)[i % targets.size()];
        SamplingStrategy strategy =
            (i / 2) % 2 == 0 ? SamplingStrategy::stochastic() : SamplingStrategy::top_k(ks[(i / 4) % ks.size()]);
        Rng rng(mix_seed(33, i));
        std::vector<DecodeStep> trace;
        CircuitDag dag = gen.decode_sample(Generator::reparameterize(post, rng), strategy, rng, &trace);
        samples++;
        invalid += !valid_dag(dag, max_len);
        if (use_chain) {
            chain_samples++;
            for (const GateOp &op : dag.gates()) {
                if (op.qubits.size() < 2) continue;
                for (std::size_t a = 0; a < op.qubits.size(); a++) {
                    for (std::size_t b = a + 1; b < op.qubits.size(); b++) {
                        forbidden += !Connectivity::chain(3).allows(op.qubits[a], op.qubits[b]);
                    }
                }
            }
        }
        if (strategy.kind == SamplingStrategy::Kind::TopK) {
            topk_samples++;
            for (const DecodeStep &step : trace) {
                int support = static_cast<int>((step.probs.array() > 0).count());
                bool masked_ok = gen.decoder_vocab().permitted(step.chosen);
                if (support > strategy.k || !(step.probs(step.chosen) > 0) || !masked_ok) {
                    outside_support++;
                    break;
                }
            }
        }
    }
    std::string detail = std::to_string(samples) + " samples (" + std::to_string(chain_samples) + " chain, " +
                         std::to_string(topk_samples) + " top-k): " + std::to_string(invalid) + " invalid, " +
                         std::to_string(forbidden) + " forbidden-pair gates, " + std::to_string(outside_support) +
                         " top-k violations";
    return {invalid == 0 && forbidden == 0 && outside_support == 0, detail};
}

// ---------------------------------------------------------------------------
// 4. Example circuit metrics

Outcome example_metrics(Context &) {
    CircuitDag dag = oracle::five_gate_example();
    CircuitMetrics m = circuit_metrics(dag);
    std::string detail = "(L, D) = (" + std::to_string(m.length) + ", " + std::to_string(m.depth) + "), " +
                         std::to_string(dag.node_count()) + " nodes";
    return {m.length == 5 && m.depth == 4 && dag.node_count() == 7, detail};
}

// ---------------------------------------------------------------------------
// 5. VAE overfit

Outcome vae_overfit(Context &ctx) {
    Rng rng(51);
    std::vector<CircuitDag> targets, compiled;
    for (int i = 0; i < 32; i++) {
        int length = 4 + i % 3;
        targets.push_back(gen_random_target(rng, length));
        compiled.push_back(random_structure(rng, 2 * length + i % 5));
    }
    std::vector<CircuitPair> pairs;
    for (int i = 0; i < 32; i++) pairs.push_back({&targets[i], &compiled[i]});

    Generator gen(GeneratorConfig{}, 52);
    GeneratorTrainConfig cfg;
    cfg.epochs = 50;
    cfg.learning_rate = 1e-3;
    cfg.seed = 53;
    double accuracy = teacher_forced_accuracy(gen, pairs);
    int epochs = 0;
    while (epochs < 2000 && accuracy < 0.95) {
        cfg.seed = mix_seed(53, epochs);
        train_generator(gen, pairs, cfg);
        epochs += cfg.epochs;
        accuracy = teacher_forced_accuracy(gen, pairs);
        if (epochs % 250 == 0) progress("epoch " + std::to_string(epochs) + " accuracy " + num(accuracy));
    }
    ctx.results["vae_overfit"] = {{"epochs", epochs}, {"accuracy", accuracy}};
    return {accuracy >= 0.95, "teacher-forced accuracy " + num(accuracy) + " after " + std::to_string(epochs) +
                                  " epochs (hidden 56, latent 56, lr 1e-3)"};
}

// ---------------------------------------------------------------------------
// 6. Fine-tune oracle

Outcome finetune_oracle(Context &) {
    CircuitDag euler = CircuitDag::build(
        1, {{GateKind::RZ, {0}, {}}, {GateKind::RXHalfPi, {0}, {}}, {GateKind::RZ, {0}, {}}});
    CircuitDag hadamard = CircuitDag::build(1, {{GateKind::H, {0}, {}}});
    double h_loss = fine_tune(euler, hadamard, {}).loss;

    double worst = 0;
    for (int seed = 0; seed < 5; seed++) {
        Rng rng(mix_seed(61, seed));
        CircuitDag structure = random_structure(rng, 4 + seed, 3);
        std::vector<double> angles(structure.param_count());
        for (double &a : angles) a = 2 * std::numbers::pi * uniform01(rng);
        CircuitDag target = structure;
        target.set_params(angles);
        FineTuneConfig cfg;
        cfg.seed = seed;
        cfg.restarts = 10;
        worst = std::max(worst, fine_tune(structure, target, cfg).loss);
    }
    std::string detail = "Euler structure vs H: " + num(h_loss) + "; 5 native targets on their own structure (10 "
                         "restarts): worst " + num(worst);
    return {h_loss < 1e-4 && worst < 1e-4, detail};
}

// ---------------------------------------------------------------------------
// 7. Desk-scale end to end

const std::vector<Record> &generator_tasks(Context &ctx) {
    if (!ctx.generator_tasks) {
        fs::path path = ctx.work / "generator.jsonl";
        GeneratorDatasetConfig cfg;
        cfg.n_per_length = 30;
        cfg.seed = ctx.seed;
        cfg.threads = ctx.threads;
        progress("labeling 90 generator tasks with the random-search oracle");
        auto t = Clock::now();
        int discarded = 0;
        std::vector<Record> tasks = build_generator_dataset(cfg, &discarded);
        save_dataset(path.string(), tasks, "generator",
                     {{"seed", ctx.seed}, {"discarded", discarded}, {"oracle", cfg.oracle.to_json()}});
        ctx.results["generator_dataset"] = {{"tasks", tasks.size()},
                                            {"discarded", discarded},
                                            {"seconds", seconds_since(t)}};
        progress("generator dataset ready: " + std::to_string(tasks.size()) + " tasks, " +
                 std::to_string(discarded) + " discarded, " + num(seconds_since(t), 5) + " s");
        ctx.generator_tasks = std::move(tasks);
    }
    return *ctx.generator_tasks;
}

Outcome end_to_end(Context &ctx) {
    const std::vector<Record> &tasks = generator_tasks(ctx);
    std::vector<CircuitPair> pairs;
    std::set<std::string> train_targets, train_compiled;
    int over_cap = 0;
    for (const Record &r : tasks) {
        pairs.push_back({&r.target, &r.compiled});
        train_targets.insert(canonical_key(r.target));
        train_compiled.insert(canonical_key(r.compiled));
        over_cap += r.compiled.length() > 5 * r.target.length();
    }

    Generator gen(GeneratorConfig{}, mix_seed(ctx.seed, 1));
    GeneratorTrainConfig train;
    train.epochs = 400;
    train.learning_rate = 1e-3;
    train.seed = mix_seed(ctx.seed, 2);
    progress("training the generator for 400 epochs");
    auto t = Clock::now();
    auto log = train_generator(gen, pairs, train);
    double accuracy = teacher_forced_accuracy(gen, pairs);
    progress("trained in " + num(seconds_since(t), 4) + " s, final loss " + num(log.back().loss) +
             ", teacher-forced accuracy " + num(accuracy));
    gen.save((ctx.work / "generator.ckpt").string());

    Rng held_rng(mix_seed(ctx.seed, 3));
    std::vector<CircuitDag> held_out;
    while (held_out.size() < 20) {
        CircuitDag c = gen_random_target(held_rng, 4 + static_cast<int>(held_out.size()) % 3);
        if (!train_targets.count(canonical_key(c))) held_out.push_back(std::move(c));
    }

    CompileConfig cfg;
    cfg.n_candidates = 100;
    cfg.strategy = SamplingStrategy::top_k(25);
    cfg.seed = mix_seed(ctx.seed, 4);
    cfg.threads = ctx.threads;
    std::vector<CompileReport> reports;
    double gen_mean = 0, base_mean = 0;
    json per_target = json::array();
    for (std::size_t i = 0; i < held_out.size(); i++) {
        CompileReport r = compile(held_out[i], gen, nullptr, cfg, "t" + std::to_string(i));
        std::vector<int> lengths;
        std::map<std::string, int> length_of;
        for (const CandidateRecord &c : r.candidates) length_of[c.key] = c.metrics.length;
        for (const std::string &key : r.generated_keys) lengths.push_back(length_of[key]);
        BaselineResult b = random_baseline(held_out[i], lengths, cfg);
        gen_mean += r.best_loss();
        base_mean += b.best_loss;
        per_target.push_back({{"target", r.target_id},
                              {"generated_best", r.best_loss()},
                              {"baseline_best", b.best_loss},
                              {"distinct", r.candidates.size()}});
        progress(r.target_id + ": generated " + num(r.best_loss()) + " vs baseline " + num(b.best_loss) + " (" +
                 std::to_string(r.candidates.size()) + " distinct)");
        reports.push_back(std::move(r));
    }
    gen_mean /= held_out.size();
    base_mean /= held_out.size();
    EvalSummary s = eval_metrics(reports, train_compiled);
    std::ofstream(ctx.work / "end_to_end_report.csv") << reports_csv(reports);
    ctx.results["end_to_end"] = {{"summary", s.to_json()},
                                 {"generated_mean_best", gen_mean},
                                 {"baseline_mean_best", base_mean},
                                 {"teacher_forced_accuracy", accuracy},
                                 {"targets", per_target}};

    bool a = gen_mean < base_mean;
    bool b = s.uniqueness > 90 && s.novelty > 90;
    std::string detail = "(a) mean best loss " + num(gen_mean) + " vs random baseline " + num(base_mean) +
                         (a ? "" : " [not below]") + "; (b) uniqueness " + num(s.uniqueness) + "%, novelty " +
                         num(s.novelty) + "%" + (b ? "" : " [below 90%]") + "; mean L " + num(s.mean_length, 3) +
                         ", D " + num(s.mean_depth, 3) + "; tasks over 5L cap: " + std::to_string(over_cap);
    return {a && b && over_cap == 0, detail};
}

// ---------------------------------------------------------------------------
// 8. Predictor at desk scale

Outcome predictor_desk_scale(Context &ctx) {
    const std::vector<Record> &tasks = generator_tasks(ctx);
    PredictorDatasetConfig cfg;
    cfg.n_random = 2000 - static_cast<int>(tasks.size());
    cfg.n_test = 200;
    cfg.seed = mix_seed(ctx.seed, 5);
    cfg.threads = ctx.threads;
    progress("labeling " + std::to_string(cfg.n_random) + " random predictor samples");
    auto t = Clock::now();
    DatasetSplit split = build_predictor_dataset(cfg, tasks);
    progress("predictor dataset ready in " + num(seconds_since(t), 4) + " s: " + std::to_string(split.train.size()) +
             " train, " + std::to_string(split.test.size()) + " test");
    save_dataset((ctx.work / "predictor_train.jsonl").string(), split.train, "train");
    save_dataset((ctx.work / "predictor_test.jsonl").string(), split.test, "test");

    int total = static_cast<int>(split.train.size() + split.test.size());
    int low = 0, high = 0;
    for (const auto *part : {&split.train, &split.test}) {
        for (const Record &r : *part) {
            low += r.loss < 0.1;
            high += r.loss > 0.5;
        }
    }

    std::vector<LabeledPair> train;
    for (const Record &r : split.train) train.push_back({&r.target, &r.compiled, r.loss});
    Predictor pred(PredictorConfig{}, mix_seed(ctx.seed, 6));
    PredictorTrainConfig tcfg;
    tcfg.seed = mix_seed(ctx.seed, 7);
    progress("training the predictor for " + std::to_string(tcfg.epochs) + " epochs");
    t = Clock::now();
    train_predictor(pred, train, tcfg, [](int epoch, double mse) {
        if ((epoch + 1) % 20 == 0) progress("epoch " + std::to_string(epoch + 1) + " mse " + num(mse));
    });
    progress("trained in " + num(seconds_since(t), 4) + " s");
    pred.save((ctx.work / "predictor.ckpt").string());

    std::vector<double> predicted, truth;
    int good = 0, good_kept = 0, bad = 0, bad_removed = 0;
    for (const Record &r : split.test) {
        double p = pred.predict(r.target, r.compiled);
        predicted.push_back(p);
        truth.push_back(r.loss);
        bool kept = std::clamp(p, 0.0, 1.0) <= 0.1;
        if (r.loss < 0.05) {
            good++;
            good_kept += kept;
        }
        if (r.loss > 0.3) {
            bad++;
            bad_removed += !kept;
        }
    }
    double r = std::numeric_limits<double>::quiet_NaN();
    try {
        r = pearson(predicted, truth);
    } catch (const UndefinedCorrelation &) {
    }
    double kept_fraction = good ? static_cast<double>(good_kept) / good : std::numeric_limits<double>::quiet_NaN();
    double removed_fraction = bad ? static_cast<double>(bad_removed) / bad : std::numeric_limits<double>::quiet_NaN();
    ctx.results["predictor"] = {{"samples", total},       {"below_0.1", low},          {"above_0.5", high},
                                {"pearson", r},           {"low_loss_test", good},     {"low_loss_kept", good_kept},
                                {"high_loss_test", bad},  {"high_loss_removed", bad_removed}};
    bool pass = r >= 0.5 && good > 0 && kept_fraction >= 0.8 && bad > 0 && removed_fraction >= 0.5;
    std::string detail = std::to_string(total) + " samples (" + num(100.0 * low / total, 3) + "% below 0.1, " +
                         num(100.0 * high / total, 3) + "% above 0.5); held-out Pearson r " + num(r) +
                         "; kept " + std::to_string(good_kept) + "/" + std::to_string(good) + " with loss < 0.05, " +
                         "removed " + std::to_string(bad_removed) + "/" + std::to_string(bad) + " with loss > 0.3";
    return {pass, detail};
}

// ---------------------------------------------------------------------------
// 9. Determinism

std::string generator_dataset_hash(int threads) {
    GeneratorDatasetConfig cfg;
    cfg.n_per_length = 2;
    cfg.oracle.n_trials = 5;
    cfg.oracle.max_length_factor = 2;
    cfg.oracle.threshold = 0.3;
    cfg.oracle.finetune.max_steps = 50;
    cfg.seed = 91;
    cfg.threads = threads;
    return content_hash(dataset_text(build_generator_dataset(cfg)));
}

std::string predictor_dataset_hash(int threads) {
    PredictorDatasetConfig cfg;
    cfg.n_random = 40;
    cfg.n_test = 8;
    cfg.finetune.max_steps = 40;
    cfg.seed = 92;
    cfg.threads = threads;
    DatasetSplit split = build_predictor_dataset(cfg);
    return content_hash(dataset_text(split.train) + "#" + dataset_text(split.test));
}

Outcome determinism(Context &ctx) {
    std::vector<std::string> failures;
    auto check = [&](const std::string &stage, const std::vector<std::string> &hashes) {
        for (const std::string &h : hashes) {
            if (h != hashes.front()) {
                failures.push_back(stage);
                return;
            }
        }
    };
    check("generator dataset", {generator_dataset_hash(1), generator_dataset_hash(1), generator_dataset_hash(3)});
    check("predictor dataset", {predictor_dataset_hash(1), predictor_dataset_hash(1), predictor_dataset_hash(3)});

    // Checkpoints and reports through the command line, twice at one thread
    // and once at three.
    fs::path root = ctx.work / "determinism";
    fs::remove_all(root);
    std::vector<std::string> dirs{"run_a", "run_b", "run_c"};
    std::vector<int> threads{1, 1, 3};
    for (std::size_t i = 0; i < dirs.size(); i++) {
        std::string out = (root / dirs[i]).string();
        std::string th = std::to_string(threads[i]);
        std::vector<std::vector<std::string>> steps{
            {"gen-data", "--n-per-length", "1", "--trials", "4", "--max-length-factor", "2", "--oracle-threshold",
             "0.4", "--ft-steps", "40", "--n-random", "24", "--n-test", "6"},
            {"train-gen", "--data", out + "/generator.jsonl", "--epochs", "15", "--hidden", "16", "--latent", "16"},
            {"train-pred", "--data", out + "/predictor_train.jsonl", "--test", out + "/predictor_test.jsonl",
             "--epochs", "5", "--hidden", "16"},
            {"compile", "--generator", out + "/generator.ckpt", "--predictor", out + "/predictor.ckpt", "--batch",
             out + "/predictor_test.jsonl", "--limit", "3", "--n-candidates", "15", "--ft-steps", "30"},
            {"eval", "--generator", out + "/generator.ckpt", "--targets", out + "/predictor_test.jsonl",
             "--train-data", out + "/generator.jsonl", "--strategies", "stochastic,top-k:10", "--limit", "2",
             "--n-candidates", "10", "--ft-steps", "20", "--baseline"},
        };
        for (auto &step : steps) {
            std::vector<std::string> args{"qcgen", "--seed", "93", "--threads", th, "--out-dir", out};
            args.insert(args.end(), step.begin(), step.end());
            std::ostringstream sink_out, sink_err;
            int code = cli::run(args, sink_out, sink_err);
            if (code != 0) {
                failures.push_back(step.front() + " exited " + std::to_string(code) + ": " + sink_err.str());
                return {false, failures.back()};
            }
        }
    }
    const std::vector<std::string> artifacts{
        "generator.jsonl",      "generator.jsonl.manifest.json", "predictor_train.jsonl",
        "predictor_test.jsonl", "generator.ckpt",                "predictor.ckpt",
        "train_gen_log.csv",    "train_pred_log.csv",            "compile_report.csv",
        "compile_summary.json", "eval.csv",                      "eval_report.csv",
        "eval_summary.json"};
    for (const std::string &name : artifacts) {
        std::vector<std::string> hashes;
        for (const std::string &d : dirs) hashes.push_back(content_hash(slurp(root / d / name)));
        check(name, hashes);
    }
    std::string detail = "2 in-process datasets and " + std::to_string(artifacts.size()) +
                         " command-line artifacts compared across runs at 1, 1 and 3 threads";
    for (const auto &f : failures) detail += "; DIFFERS " + f;
    return {failures.empty(), detail};
}

struct Criterion {
    int id;
    std::string title;
    Outcome (*run)(Context &);
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qcgen acceptance suite", "qcgen_acceptance"};
    std::vector<int> only;
    std::string work = "acceptance_work";
    Context ctx;
    app.add_option("--only", only, "Run only these criteria")->delimiter(',');
    app.add_option("--work-dir", work, "Directory for generated artifacts")->capture_default_str();
    app.add_option("--threads", ctx.threads, "Worker threads")->capture_default_str();
    app.add_option("--seed", ctx.seed, "Seed for the desk-scale runs")->capture_default_str();
    CLI11_PARSE(app, argc, argv);
    ctx.work = work;
    fs::create_directories(ctx.work);

    const std::vector<Criterion> criteria{
        {1, "LHST correctness", lhst_correctness},
        {2, "gradient suite", gradient_suite},
        {3, "decoder validity and masking", decoder_validity},
        {4, "example circuit (L, D)", example_metrics},
        {5, "VAE overfit", vae_overfit},
        {6, "fine-tune oracle", finetune_oracle},
        {7, "desk-scale end to end", end_to_end},
        {8, "predictor at desk scale", predictor_desk_scale},
        {9, "determinism", determinism},
    };

    int failed = 0;
    json lines = json::array();
    for (const Criterion &c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        std::cerr << "criterion " << c.id << ": " << c.title << std::endl;
        auto t = Clock::now();
        Outcome o;
        try {
            o = c.run(ctx);
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = seconds_since(t);
        failed += !o.pass;
        std::cout << "[" << (o.pass ? "PASS" : "FAIL") << "] criterion " << c.id << " " << c.title << " (" << num(secs, 4)
                  << " s): " << o.detail << std::endl;
        lines.push_back({{"criterion", c.id}, {"pass", o.pass}, {"seconds", secs}, {"detail", o.detail}});
    }
    std::ofstream(ctx.work / "acceptance.json") << json{{"criteria", lines}, {"runs", ctx.results}}.dump(2) << '\n';
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failed ? 1 : 0;
}
