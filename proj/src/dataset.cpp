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

#include "qcgen/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "qcgen/circuit_io.hpp"
#include "qcgen/error.hpp"
#include "qcgen/parallel.hpp"

namespace qcgen {

namespace {

constexpr const char *kGateSetVersion = "qcgen-gates-1";

bool has_angle(GateKind kind) {
    return gate_info(kind).param_count > 0;
}

CircuitDag random_circuit_from(Rng &rng, std::span<const GateKind> set, int length, int n_qubits,
                               const Connectivity *conn, bool random_angles) {
    CircuitDag dag(n_qubits);
    for (int i = 0; i < length; i++) {
        GateKind kind = set[uniform_index(rng, static_cast<int>(set.size()))];
        std::vector<std::vector<int>> options = qubit_assignments(kind, n_qubits);
        if (conn) {
            std::erase_if(options, [&](const std::vector<int> &qs) {
                for (std::size_t a = 0; a < qs.size(); a++) {
                    for (std::size_t b = a + 1; b < qs.size(); b++) {
                        if (!conn->allows(qs[a], qs[b])) {
                            return true;
                        }
                    }
                }
                return false;
            });
            if (options.empty()) {
                i--;
                continue;
            }
        }
        const std::vector<int> &qubits = options[uniform_index(rng, static_cast<int>(options.size()))];
        double angle = random_angles && has_angle(kind) ? 2 * std::numbers::pi * uniform01(rng) : 0.0;
        dag.append_gate(kind, qubits, angle);
    }
    dag.finalize();
    return dag;
}

std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingFileError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    out << text;
}

}  // namespace

CircuitDag gen_random_target(Rng &rng, int length, int n_qubits) {
    if (length < 0) {
        throw InvalidArgument("negative target length");
    }
    return random_circuit_from(rng, target_gate_set(), length, n_qubits, nullptr, true);
}

CircuitDag random_structure(Rng &rng, int length, int n_qubits, const Connectivity *conn) {
    if (length < 0) {
        throw InvalidArgument("negative structure length");
    }
    return random_circuit_from(rng, native_gate_set(), length, n_qubits, conn, false);
}

nlohmann::json OracleConfig::to_json() const {
    return {{"n_trials", n_trials},
            {"start_length", start_length},
            {"max_length_factor", max_length_factor},
            {"threshold", threshold},
            {"finetune", finetune.to_json()}};
}

OracleResult oracle_compile(const CircuitDag &target, const OracleConfig &config, std::uint64_t seed,
                            std::vector<double> *trial_losses) {
    if (config.n_trials < 1) {
        throw InvalidArgument("oracle needs at least one trial per length");
    }
    int L = std::max(1, target.length());
    int start = config.start_length > 0 ? config.start_length : L;
    int stop = config.max_length_factor * L;
    OracleResult best;
    best.compiled = CircuitDag(target.n_qubits());
    best.compiled.finalize();
    best.loss = INFINITY;
    for (int len = start; len <= stop; len++) {
        for (int t = 0; t < config.n_trials; t++) {
            std::uint64_t stream = mix_seed(seed, static_cast<std::uint64_t>(len) * 100003 + t);
            Rng rng(stream);
            CircuitDag structure = random_structure(rng, len, target.n_qubits());
            FineTuneConfig ft = config.finetune;
            ft.seed = mix_seed(stream, 1);
            FineTuneResult r = fine_tune(structure, target, ft);
            best.trials++;
            if (trial_losses) {
                trial_losses->push_back(r.loss);
            }
            best.final_length = len;
            if (r.loss < best.loss) {
                structure.set_params(r.params);
                best.compiled = std::move(structure);
                best.loss = r.loss;
                best.finetune_seed = ft.seed;
            }
            if (best.loss < config.threshold) {
                return best;
            }
        }
    }
    return best;
}

std::vector<Record> build_generator_dataset(const GeneratorDatasetConfig &config, int *discarded) {
    if (config.n_per_length < 0) {
        throw InvalidArgument("negative task count");
    }
    std::vector<Record> tasks;
    int dropped = 0;
    for (int length : config.lengths) {
        std::vector<Record> accepted;
        int attempt = 0;
        const int max_attempts = 50 * config.n_per_length + 100;
        while (static_cast<int>(accepted.size()) < config.n_per_length) {
            int need = config.n_per_length - static_cast<int>(accepted.size());
            int chunk = std::max(need, resolve_threads(config.threads));
            if (attempt + chunk > max_attempts) {
                throw std::runtime_error("oracle discarded too many targets of length " + std::to_string(length));
            }
            std::vector<Record> results(chunk);
            std::vector<char> ok(chunk, 0);
            parallel_for(chunk, config.threads, [&](int i) {
                std::uint64_t stream = mix_seed(config.seed, static_cast<std::uint64_t>(length) * 1000003 + attempt + i);
                Rng rng(stream);
                CircuitDag target = gen_random_target(rng, length, config.n_qubits);
                OracleResult r = oracle_compile(target, config.oracle, mix_seed(stream, 7));
                ok[i] = r.loss < config.oracle.threshold;
                results[i] = Record{std::move(target), std::move(r.compiled), r.loss, r.finetune_seed};
            });
            for (int i = 0; i < chunk && static_cast<int>(accepted.size()) < config.n_per_length; i++) {
                if (ok[i]) {
                    accepted.push_back(std::move(results[i]));
                } else {
                    dropped++;
                }
            }
            attempt += chunk;
        }
        for (auto &r : accepted) {
            tasks.push_back(std::move(r));
        }
    }
    if (discarded) {
        *discarded = dropped;
    }
    return tasks;
}

DatasetSplit build_predictor_dataset(const PredictorDatasetConfig &config, std::span<const Record> generator_tasks) {
    if (config.n_random < 0 || config.n_test < 0 || config.lengths.empty()) {
        throw InvalidArgument("bad predictor dataset configuration");
    }
    std::vector<Record> samples(config.n_random);
    parallel_for(config.n_random, config.threads, [&](int i) {
        std::uint64_t stream = mix_seed(config.seed ^ 0x5052454449435452ULL, static_cast<std::uint64_t>(i));
        Rng rng(stream);
        int L = config.lengths[uniform_index(rng, static_cast<int>(config.lengths.size()))];
        CircuitDag target = gen_random_target(rng, L, config.n_qubits);
        int lo = config.min_length_factor * L;
        int hi = config.max_length_factor * L;
        int len = lo + uniform_index(rng, hi - lo + 1);
        CircuitDag structure = random_structure(rng, len, config.n_qubits);
        FineTuneConfig ft = config.finetune;
        ft.seed = mix_seed(stream, 1);
        FineTuneResult r = fine_tune(structure, target, ft);
        structure.set_params(r.params);
        samples[i] = Record{std::move(target), std::move(structure), std::clamp(r.loss, 0.0, 1.0), ft.seed};
    });

    // Deduplicate pairs, keeping the first occurrence; generator tasks first.
    std::set<std::string> seen;
    std::vector<Record> pool;
    for (const Record &r : generator_tasks) {
        if (seen.insert(pair_hash(r)).second) {
            pool.push_back(r);
        }
    }
    for (Record &r : samples) {
        if (seen.insert(pair_hash(r)).second) {
            pool.push_back(std::move(r));
        }
    }

    // Split by target key so that no test target also appears in train.
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < pool.size(); i++) {
        groups[canonical_key(pool[i].target)].push_back(i);
    }
    std::vector<std::string> keys;
    for (const auto &entry : groups) {
        keys.push_back(entry.first);
    }
    Rng rng(mix_seed(config.seed, 0x53504c4954ULL));
    std::shuffle(keys.begin(), keys.end(), rng);
    std::set<std::string> test_keys;
    std::size_t test_count = 0;
    for (const std::string &key : keys) {
        if (test_count >= static_cast<std::size_t>(config.n_test)) {
            break;
        }
        test_keys.insert(key);
        test_count += groups[key].size();
    }
    DatasetSplit split;
    for (Record &r : pool) {
        (test_keys.count(canonical_key(r.target)) ? split.test : split.train).push_back(std::move(r));
    }
    std::shuffle(split.train.begin(), split.train.end(), rng);
    std::shuffle(split.test.begin(), split.test.end(), rng);
    return split;
}

std::string pair_hash(const Record &record) {
    return hex64(fnv1a(serialize_circuit(record.target) + "\n" + serialize_circuit(record.compiled)));
}

nlohmann::json record_to_json(const Record &record) {
    return {{"target", circuit_to_json(record.target)},
            {"compiled", circuit_to_json(record.compiled)},
            {"loss", record.loss},
            {"seed", record.seed}};
}

Record record_from_json(const nlohmann::json &j) {
    try {
        Record r;
        r.target = circuit_from_json(j.at("target"));
        r.compiled = circuit_from_json(j.at("compiled"));
        r.loss = j.at("loss").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        return r;
    } catch (const nlohmann::json::exception &e) {
        throw CorruptDataError(std::string("malformed dataset record: ") + e.what());
    }
}

std::string dataset_text(std::span<const Record> records) {
    std::string out;
    for (const Record &r : records) {
        out += record_to_json(r).dump();
        out += '\n';
    }
    return out;
}

std::string content_hash(std::string_view text) {
    return hex64(fnv1a(text));
}

nlohmann::json save_dataset(const std::string &path, std::span<const Record> records, const std::string &split,
                            const nlohmann::json &extra) {
    std::string text = dataset_text(records);
    nlohmann::json manifest = extra.is_object() ? extra : nlohmann::json::object();
    manifest["split"] = split;
    manifest["count"] = records.size();
    manifest["hash"] = content_hash(text);
    manifest["gate_set_version"] = kGateSetVersion;
    manifest["format_version"] = 1;
    write_text(path, text);
    write_text(manifest_path(path), manifest.dump(2) + "\n");
    return manifest;
}

LoadedDataset load_dataset(const std::string &path) {
    std::string text = read_text(path);
    LoadedDataset out;
    try {
        out.manifest = nlohmann::json::parse(read_text(manifest_path(path)));
    } catch (const nlohmann::json::exception &e) {
        throw CorruptDataError("malformed manifest for '" + path + "': " + e.what());
    }
    if (!out.manifest.is_object() || out.manifest.value("hash", "") != content_hash(text)) {
        throw CorruptDataError("dataset '" + path + "' does not match its manifest hash");
    }
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception &e) {
            throw CorruptDataError("malformed dataset line " + std::to_string(out.records.size() + 1) + ": " + e.what());
        }
        out.records.push_back(record_from_json(j));
    }
    if (out.manifest.value("count", static_cast<std::size_t>(-1)) != out.records.size()) {
        throw CorruptDataError("dataset '" + path + "' has " + std::to_string(out.records.size()) +
                               " records but the manifest says " + out.manifest.value("count", nlohmann::json()).dump());
    }
    return out;
}

}  // namespace qcgen
