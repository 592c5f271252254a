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

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qcgen/circuit_io.hpp"
#include "qcgen/compiler.hpp"
#include "qcgen/dataset.hpp"
#include "qcgen/error.hpp"
#include "qcgen/generator.hpp"
#include "qcgen/predictor.hpp"

namespace qcgen::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOptions {
    std::uint64_t seed = 0;
    std::string connectivity = "full";
    std::string strategy = "top-k:25";
    int max_len = kDefaultMaxLen;
    std::string out_dir = ".";
    int threads = 1;
};

struct FineTuneOptions {
    FineTuneConfig config;

    void attach(CLI::App *cmd) {
        cmd->add_option("--ft-steps", config.max_steps, "Adam steps per restart")->capture_default_str();
        cmd->add_option("--ft-lr", config.learning_rate, "Fine-tuning learning rate")->capture_default_str();
        cmd->add_option("--ft-restarts", config.restarts, "Random restarts")->capture_default_str();
        cmd->add_option("--ft-tolerance", config.tolerance, "Stop when the loss changes less than this")
            ->capture_default_str();
    }
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingFileError("cannot open " + path);
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

std::string file_hash(const std::string &path) {
    return content_hash(read_file(path));
}

std::string fixed(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

SamplingStrategy parse_strategy(const std::string &text) {
    try {
        return SamplingStrategy::parse(text);
    } catch (const InvalidArgument &e) {
        throw CLI::ValidationError("--strategy", e.what());
    }
}

std::string strategy_check(const std::string &text) {
    try {
        SamplingStrategy::parse(text);
        return {};
    } catch (const std::exception &e) {
        return e.what();
    }
}

std::vector<CircuitPair> circuit_pairs(const std::vector<Record> &records) {
    std::vector<CircuitPair> pairs;
    for (const Record &r : records) pairs.push_back({&r.target, &r.compiled});
    return pairs;
}

std::vector<LabeledPair> labeled_pairs(const std::vector<Record> &records) {
    std::vector<LabeledPair> pairs;
    for (const Record &r : records) pairs.push_back({&r.target, &r.compiled, r.loss});
    return pairs;
}

std::set<std::string> compiled_keys(const std::vector<Record> &records) {
    std::set<std::string> keys;
    for (const Record &r : records) keys.insert(canonical_key(r.compiled));
    return keys;
}

// ---------------------------------------------------------------------------
// gen-data

struct GenDataOptions {
    int n_per_length = 30;
    std::vector<int> lengths{4, 5, 6};
    int trials = 50;
    double threshold = 0.05;
    int max_length_factor = 5;
    int n_random = 2000;
    int n_test = 200;
    bool skip_generator = false;
    bool skip_predictor = false;
    std::string generator_data;
    FineTuneOptions ft;
};

void run_gen_data(const GlobalOptions &g, const GenDataOptions &o, std::ostream &out) {
    fs::path dir(g.out_dir);
    std::vector<Record> tasks;
    if (!o.skip_generator) {
        GeneratorDatasetConfig cfg;
        cfg.n_per_length = o.n_per_length;
        cfg.lengths = o.lengths;
        cfg.oracle.n_trials = o.trials;
        cfg.oracle.threshold = o.threshold;
        cfg.oracle.max_length_factor = o.max_length_factor;
        cfg.oracle.finetune = o.ft.config;
        cfg.seed = g.seed;
        cfg.threads = g.threads;
        int discarded = 0;
        tasks = build_generator_dataset(cfg, &discarded);
        json extra = {{"seed", g.seed},
                      {"n_per_length", o.n_per_length},
                      {"lengths", o.lengths},
                      {"discarded", discarded},
                      {"oracle", cfg.oracle.to_json()}};
        save_dataset((dir / "generator.jsonl").string(), tasks, "generator", extra);
        out << "generator tasks: " << tasks.size() << " (discarded " << discarded << ")\n";
    } else if (!o.generator_data.empty()) {
        tasks = load_dataset(o.generator_data).records;
    }
    if (!o.skip_predictor) {
        PredictorDatasetConfig cfg;
        cfg.n_random = o.n_random;
        cfg.n_test = o.n_test;
        cfg.lengths = o.lengths;
        cfg.finetune = o.ft.config;
        cfg.seed = g.seed;
        cfg.threads = g.threads;
        DatasetSplit split = build_predictor_dataset(cfg, tasks);
        json extra = {{"seed", g.seed},
                      {"n_random", o.n_random},
                      {"pooled_generator_tasks", tasks.size()},
                      {"finetune", cfg.finetune.to_json()}};
        save_dataset((dir / "predictor_train.jsonl").string(), split.train, "train", extra);
        save_dataset((dir / "predictor_test.jsonl").string(), split.test, "test", extra);
        out << "predictor samples: " << split.train.size() << " train, " << split.test.size() << " test\n";
    }
}

// ---------------------------------------------------------------------------
// train-gen / train-pred

struct TrainGenOptions {
    std::string data;
    GeneratorTrainConfig train;
    int hidden = kDefaultHiddenDim;
    int latent = kDefaultHiddenDim;
};

void run_train_gen(const GlobalOptions &g, TrainGenOptions o, std::ostream &out) {
    LoadedDataset data = load_dataset(o.data);
    GeneratorConfig cfg;
    cfg.hidden_dim = o.hidden;
    cfg.latent_dim = o.latent;
    cfg.max_len = g.max_len;
    if (!data.records.empty()) cfg.n_qubits = data.records.front().target.n_qubits();
    Generator gen(cfg, g.seed);
    gen.set_connectivity(Connectivity::from_name(g.connectivity, cfg.n_qubits));

    fs::path dir(g.out_dir);
    o.train.seed = g.seed;
    if (o.train.checkpoint_every > 0) o.train.checkpoint_dir = dir.string();
    std::vector<CircuitPair> pairs = circuit_pairs(data.records);
    std::vector<EpochLog> log = train_generator(gen, pairs, o.train);

    std::ostringstream csv;
    csv << "epoch,loss,reconstruction,kl\n";
    for (const EpochLog &e : log) {
        csv << e.epoch << ',' << fixed(e.loss, 9) << ',' << fixed(e.reconstruction, 9) << ',' << fixed(e.kl, 9)
            << '\n';
    }
    write_file(dir / "train_gen_log.csv", csv.str());
    double accuracy = teacher_forced_accuracy(gen, pairs);
    gen.save((dir / "generator.ckpt").string(), {{"data_hash", data.manifest.value("hash", "")},
                                                  {"epochs", o.train.epochs},
                                                  {"learning_rate", o.train.learning_rate},
                                                  {"kl_weight", o.train.kl_weight}});
    out << "generator trained: " << log.size() << " epochs, teacher-forced accuracy " << fixed(accuracy, 4)
        << '\n';
}

struct TrainPredOptions {
    std::string train_data;
    std::string test_data;
    PredictorTrainConfig train;
    int hidden = kDefaultHiddenDim;
};

void run_train_pred(const GlobalOptions &g, TrainPredOptions o, std::ostream &out) {
    LoadedDataset train = load_dataset(o.train_data);
    PredictorConfig cfg;
    cfg.hidden_dim = o.hidden;
    cfg.max_len = g.max_len;
    if (!train.records.empty()) cfg.n_qubits = train.records.front().target.n_qubits();
    for (const Record &r : train.records) {
        int longest = std::max(r.target.length(), r.compiled.length());
        if (longest > cfg.max_len) {
            throw InvalidArgument("dataset holds a circuit of length " + std::to_string(longest) +
                                  ", above --max-len " + std::to_string(cfg.max_len));
        }
    }
    Predictor pred(cfg, g.seed);
    o.train.seed = g.seed;
    std::vector<LabeledPair> pairs = labeled_pairs(train.records);
    std::vector<double> log = train_predictor(pred, pairs, o.train);

    fs::path dir(g.out_dir);
    std::ostringstream csv;
    csv << "epoch,mse\n";
    for (std::size_t e = 0; e < log.size(); e++) csv << e << ',' << fixed(log[e], 9) << '\n';
    write_file(dir / "train_pred_log.csv", csv.str());

    json summary = {{"train_mse", predictor_mse(pred, pairs)}, {"train_count", pairs.size()}};
    if (!o.test_data.empty()) {
        LoadedDataset test = load_dataset(o.test_data);
        std::vector<double> predicted, truth;
        for (const Record &r : test.records) {
            predicted.push_back(pred.predict(r.target, r.compiled));
            truth.push_back(r.loss);
        }
        summary["test_count"] = test.records.size();
        summary["test_mse"] = predictor_mse(pred, labeled_pairs(test.records));
        try {
            summary["test_pearson"] = pearson(predicted, truth);
        } catch (const UndefinedCorrelation &) {
            summary["test_pearson"] = nullptr;
        }
    }
    write_file(dir / "train_pred_summary.json", summary.dump(2) + "\n");
    pred.save((dir / "predictor.ckpt").string(),
              {{"data_hash", train.manifest.value("hash", "")}, {"epochs", o.train.epochs}});
    out << "predictor trained: " << summary.dump() << '\n';
}

// ---------------------------------------------------------------------------
// compile / eval

struct CompileOptions {
    std::string generator;
    std::string predictor;
    std::string target;
    std::string target_file;
    std::string batch;
    int limit = 0;
    int n_candidates = 100;
    double threshold = 0.1;
    FineTuneOptions ft;
};

struct Models {
    Generator gen;
    std::optional<Predictor> pred;
    json hashes;
};

Models load_models(const std::string &generator, const std::string &predictor) {
    Models m{Generator::load(generator), std::nullopt, {{"generator", file_hash(generator)}}};
    if (!predictor.empty()) {
        m.pred.emplace(Predictor::load(predictor));
        m.hashes["predictor"] = file_hash(predictor);
    }
    return m;
}

CompileConfig compile_config(const GlobalOptions &g, int n_candidates, double threshold, const FineTuneConfig &ft) {
    CompileConfig cfg;
    cfg.n_candidates = n_candidates;
    cfg.strategy = parse_strategy(g.strategy);
    cfg.connectivity = g.connectivity;
    cfg.filter_threshold = threshold;
    cfg.finetune = ft;
    cfg.seed = g.seed;
    cfg.threads = g.threads;
    return cfg;
}

std::vector<CircuitDag> load_targets(const std::string &batch, int limit) {
    std::vector<CircuitDag> targets;
    for (Record &r : load_dataset(batch).records) {
        if (limit > 0 && static_cast<int>(targets.size()) >= limit) break;
        targets.push_back(std::move(r.target));
    }
    return targets;
}

std::string target_id(std::size_t i) {
    return "t" + std::to_string(i);
}

json timing_json(std::span<const CompileReport> reports) {
    json rows = json::array();
    CompileTimings sum;
    for (const CompileReport &r : reports) {
        rows.push_back({{"target_id", r.target_id},
                        {"t_s", r.timings.generate},
                        {"t_p", r.timings.predict},
                        {"t_f", r.timings.fine_tune},
                        {"t_total", r.timings.total}});
        sum.generate += r.timings.generate;
        sum.predict += r.timings.predict;
        sum.fine_tune += r.timings.fine_tune;
        sum.total += r.timings.total;
    }
    return {{"targets", rows},
            {"sum", {{"t_s", sum.generate}, {"t_p", sum.predict}, {"t_f", sum.fine_tune}, {"t_total", sum.total}}}};
}

void run_compile(const GlobalOptions &g, const CompileOptions &o, std::ostream &out) {
    int sources = !o.target.empty() + !o.target_file.empty() + !o.batch.empty();
    if (sources != 1) {
        throw CLI::ValidationError("compile", "give exactly one of --target, --target-file, --batch");
    }
    Models m = load_models(o.generator, o.predictor);
    std::vector<CircuitDag> targets;
    if (!o.batch.empty()) {
        targets = load_targets(o.batch, o.limit);
    } else {
        targets.push_back(deserialize_circuit(o.target.empty() ? read_file(o.target_file) : o.target));
    }
    CompileConfig cfg = compile_config(g, o.n_candidates, o.threshold, o.ft.config);

    std::vector<CompileReport> reports;
    json per_target = json::array();
    for (std::size_t i = 0; i < targets.size(); i++) {
        CompileReport r = compile(targets[i], m.gen, m.pred ? &*m.pred : nullptr, cfg, target_id(i));
        json row = {{"target_id", r.target_id}, {"draws", r.generated_keys.size()}, {"distinct", r.candidates.size()}};
        if (r.best >= 0) {
            const CandidateRecord &b = r.best_candidate();
            row["best_loss"] = b.loss;
            row["L"] = b.metrics.length;
            row["D"] = b.metrics.depth;
            row["circuit"] = circuit_to_json(b.circuit);
            row["finetune_seed"] = b.finetune_seed;
            out << r.target_id << " best loss " << fixed(b.loss, 6) << " L=" << b.metrics.length
                << " D=" << b.metrics.depth << "  " << serialize_circuit(b.circuit) << '\n';
        }
        per_target.push_back(std::move(row));
        reports.push_back(std::move(r));
    }

    fs::path dir(g.out_dir);
    EvalSummary summary = eval_metrics(reports, {});
    json j = {{"command", "compile"},
              {"config", cfg.to_json()},
              {"checkpoints", m.hashes},
              {"targets", per_target},
              {"summary", summary.to_json()}};
    write_file(dir / "compile_report.csv", reports_csv(reports));
    write_file(dir / "compile_summary.json", j.dump(2) + "\n");
    write_file(dir / "compile_timing.json", timing_json(reports).dump(2) + "\n");
}

struct EvalOptions {
    std::string generator;
    std::string predictor;
    std::string targets;
    std::string train_data;
    std::vector<std::string> strategies;
    int limit = 0;
    int n_candidates = 100;
    double threshold = 0.1;
    bool baseline = false;
    FineTuneOptions ft;
};

void run_eval(GlobalOptions g, const EvalOptions &o, std::ostream &out) {
    Models m = load_models(o.generator, o.predictor);
    std::vector<CircuitDag> targets = load_targets(o.targets, o.limit);
    if (targets.empty()) {
        throw InvalidArgument("no targets in " + o.targets);
    }
    std::set<std::string> train_keys;
    if (!o.train_data.empty()) train_keys = compiled_keys(load_dataset(o.train_data).records);

    std::vector<std::string> strategies = o.strategies.empty() ? std::vector<std::string>{g.strategy} : o.strategies;
    std::ostringstream csv;
    csv << "strategy,loss,L,D,uniqueness,novelty" << (o.baseline ? ",baseline_loss" : "") << '\n';
    json rows = json::array();
    json timings = json::object();
    std::vector<CompileReport> all;
    for (const std::string &name : strategies) {
        g.strategy = name;
        CompileConfig cfg = compile_config(g, o.n_candidates, o.threshold, o.ft.config);
        std::vector<CompileReport> reports;
        double baseline = 0;
        for (std::size_t i = 0; i < targets.size(); i++) {
            reports.push_back(compile(targets[i], m.gen, m.pred ? &*m.pred : nullptr, cfg, target_id(i)));
            if (o.baseline) {
                std::vector<int> lengths;
                for (const std::string &key : reports.back().generated_keys) {
                    for (const CandidateRecord &c : reports.back().candidates) {
                        if (c.key == key) {
                            lengths.push_back(c.metrics.length);
                            break;
                        }
                    }
                }
                baseline += random_baseline(targets[i], lengths, cfg).best_loss;
            }
        }
        EvalSummary s = eval_metrics(reports, train_keys);
        json row = s.to_json();
        row["strategy"] = name;
        csv << name << ',' << fixed(s.mean_loss) << ',' << fixed(s.mean_length, 3) << ',' << fixed(s.mean_depth, 3)
            << ',' << fixed(s.uniqueness, 2) << ',' << fixed(s.novelty, 2);
        if (o.baseline) {
            row["baseline_loss"] = baseline / targets.size();
            csv << ',' << fixed(baseline / targets.size());
        }
        csv << '\n';
        out << row.dump() << '\n';
        rows.push_back(std::move(row));
        timings[name] = timing_json(reports)["sum"];
        for (CompileReport &r : reports) {
            r.target_id = name + "/" + r.target_id;
            all.push_back(std::move(r));
        }
    }
    fs::path dir(g.out_dir);
    json j = {{"command", "eval"},
              {"targets_file_hash", file_hash(o.targets)},
              {"target_count", targets.size()},
              {"checkpoints", m.hashes},
              {"seed", g.seed},
              {"connectivity", g.connectivity},
              {"n_candidates", o.n_candidates},
              {"finetune", o.ft.config.to_json()},
              {"rows", rows}};
    write_file(dir / "eval.csv", csv.str());
    write_file(dir / "eval_report.csv", reports_csv(all));
    write_file(dir / "eval_summary.json", j.dump(2) + "\n");
    write_file(dir / "eval_timing.json", timings.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// inspect

void describe_circuit(const CircuitDag &dag, std::ostream &out) {
    CircuitMetrics m = circuit_metrics(dag);
    out << "qubits: " << dag.n_qubits() << '\n'
        << "length: " << m.length << '\n'
        << "depth: " << m.depth << '\n'
        << "nodes: " << dag.node_count() << '\n'
        << "key: " << canonical_key(dag) << '\n'
        << "edges:";
    for (auto [a, b] : dag.edges()) out << ' ' << a << "->" << b;
    out << '\n' << "serialized: " << serialize_circuit(dag) << '\n';
}

void run_inspect(const std::string &circuit, const std::string &file, std::ostream &out) {
    if (circuit.empty() == file.empty()) {
        throw CLI::ValidationError("inspect", "give exactly one of --circuit, --file");
    }
    if (!circuit.empty()) {
        describe_circuit(deserialize_circuit(circuit), out);
    } else if (fs::path(file).extension() == ".ckpt") {
        out << nn::read_checkpoint_metadata(file).dump(2) << '\n';
    } else if (fs::exists(manifest_path(file))) {
        LoadedDataset d = load_dataset(file);
        out << d.manifest.dump(2) << '\n';
    } else {
        describe_circuit(deserialize_circuit(read_file(file)), out);
    }
}

void report_error(std::ostream &err, const char *kind, const std::string &message) {
    err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum circuit compilation with a graph generative model", "qcgen"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--connectivity", g.connectivity, "Qubit connectivity")
        ->check(CLI::IsMember({"full", "chain"}))
        ->capture_default_str();
    app.add_option("--strategy", g.strategy, "stochastic or top-k:<k>")->check(strategy_check)->capture_default_str();
    app.add_option("--max-len", g.max_len, "Maximum compiled length for new models")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads (0 = hardware)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    GenDataOptions gen_data;
    auto *gd = app.add_subcommand("gen-data", "Build the generator and predictor datasets");
    gd->add_option("--n-per-length", gen_data.n_per_length)->capture_default_str();
    gd->add_option("--lengths", gen_data.lengths)->delimiter(',')->capture_default_str();
    gd->add_option("--trials", gen_data.trials, "Random structures per length")->capture_default_str();
    gd->add_option("--oracle-threshold", gen_data.threshold)->capture_default_str();
    gd->add_option("--max-length-factor", gen_data.max_length_factor)->capture_default_str();
    gd->add_option("--n-random", gen_data.n_random, "Random predictor samples")->capture_default_str();
    gd->add_option("--n-test", gen_data.n_test, "Predictor test samples")->capture_default_str();
    gd->add_flag("--skip-generator", gen_data.skip_generator);
    gd->add_flag("--skip-predictor", gen_data.skip_predictor);
    gd->add_option("--generator-data", gen_data.generator_data, "Existing generator tasks to pool");
    gen_data.ft.attach(gd);

    TrainGenOptions train_gen;
    auto *tg = app.add_subcommand("train-gen", "Train the generator");
    tg->add_option("--data", train_gen.data, "Generator dataset")->required();
    tg->add_option("--epochs", train_gen.train.epochs)->capture_default_str();
    tg->add_option("--batch", train_gen.train.batch_size)->capture_default_str();
    tg->add_option("--lr", train_gen.train.learning_rate)->capture_default_str();
    tg->add_option("--kl-weight", train_gen.train.kl_weight)->capture_default_str();
    tg->add_option("--hidden", train_gen.hidden)->capture_default_str();
    tg->add_option("--latent", train_gen.latent)->capture_default_str();
    tg->add_option("--checkpoint-every", train_gen.train.checkpoint_every)->capture_default_str();

    TrainPredOptions train_pred;
    auto *tp = app.add_subcommand("train-pred", "Train the loss predictor");
    tp->add_option("--data", train_pred.train_data, "Training split")->required();
    tp->add_option("--test", train_pred.test_data, "Held-out split");
    tp->add_option("--epochs", train_pred.train.epochs)->capture_default_str();
    tp->add_option("--batch", train_pred.train.batch_size)->capture_default_str();
    tp->add_option("--lr", train_pred.train.learning_rate)->capture_default_str();
    tp->add_option("--hidden", train_pred.hidden)->capture_default_str();

    CompileOptions comp;
    auto *cp = app.add_subcommand("compile", "Compile one target or a batch");
    cp->add_option("--generator", comp.generator, "Generator checkpoint")->required();
    cp->add_option("--predictor", comp.predictor, "Predictor checkpoint");
    cp->add_option("--target", comp.target, "Target circuit as JSON");
    cp->add_option("--target-file", comp.target_file, "File holding a target circuit as JSON");
    cp->add_option("--batch", comp.batch, "Dataset whose targets are compiled");
    cp->add_option("--limit", comp.limit, "Compile at most this many batch targets");
    cp->add_option("--n-candidates", comp.n_candidates)->capture_default_str();
    cp->add_option("--threshold", comp.threshold, "Predictor filter threshold")->capture_default_str();
    comp.ft.attach(cp);

    EvalOptions ev;
    auto *ec = app.add_subcommand("eval", "Loss, L, D, uniqueness and novelty per strategy");
    ec->add_option("--generator", ev.generator, "Generator checkpoint")->required();
    ec->add_option("--predictor", ev.predictor, "Predictor checkpoint");
    ec->add_option("--targets", ev.targets, "Dataset of held-out targets")->required();
    ec->add_option("--train-data", ev.train_data, "Generator training set for novelty");
    ec->add_option("--strategies", ev.strategies, "Comma-separated strategies")
        ->delimiter(',')
        ->check(strategy_check);
    ec->add_option("--limit", ev.limit)->capture_default_str();
    ec->add_option("--n-candidates", ev.n_candidates)->capture_default_str();
    ec->add_option("--threshold", ev.threshold)->capture_default_str();
    ec->add_flag("--baseline", ev.baseline, "Also fine-tune random structures of matched lengths");
    ev.ft.attach(ec);

    std::string inspect_circuit, inspect_file;
    auto *in = app.add_subcommand("inspect", "Describe a circuit, dataset or checkpoint");
    in->add_option("--circuit", inspect_circuit, "Circuit as JSON");
    in->add_option("--file", inspect_file, "Circuit JSON, dataset or checkpoint");

    std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError &e) {
        report_error(err, "usage", e.what());
        return kUsage;
    }

    try {
        if (!*in) fs::create_directories(g.out_dir);
        if (*gd) run_gen_data(g, gen_data, out);
        if (*tg) run_train_gen(g, train_gen, out);
        if (*tp) run_train_pred(g, train_pred, out);
        if (*cp) run_compile(g, comp, out);
        if (*ec) run_eval(g, ev, out);
        if (*in) run_inspect(inspect_circuit, inspect_file, out);
    } catch (const CLI::ParseError &e) {
        report_error(err, "usage", e.what());
        return kUsage;
    } catch (const MissingFileError &e) {
        report_error(err, "missing_file", e.what());
        return kMissingFile;
    } catch (const VocabularyMismatch &e) {
        report_error(err, "vocabulary_mismatch", e.what());
        return kMismatch;
    } catch (const CheckpointMismatch &e) {
        report_error(err, "checkpoint_mismatch", e.what());
        return kMismatch;
    } catch (const CorruptDataError &e) {
        report_error(err, "corrupt_data", e.what());
        return kCorruptData;
    } catch (const std::exception &e) {
        report_error(err, "failure", e.what());
        return kFailure;
    }
    return kOk;
}

}  // namespace qcgen::cli
