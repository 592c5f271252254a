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

#ifndef QCGEN_DATASET_HPP
#define QCGEN_DATASET_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcgen/circuit.hpp"
#include "qcgen/finetune.hpp"
#include "qcgen/random.hpp"

namespace qcgen {

/// `length` gates drawn from the target gate set: kind uniform, then a uniform
/// qubit assignment. RX/RY/RZ angles are uniform in [0, 2pi) and frozen.
CircuitDag gen_random_target(Rng &rng, int length, int n_qubits = 3);

/// `length` native gates: kind uniform, then a uniform assignment among those
/// the connectivity allows. Angles are zero (they are fine-tuned later).
CircuitDag random_structure(Rng &rng, int length, int n_qubits = 3, const Connectivity *conn = nullptr);

/// Random search standing in for a structure-search labeler.
struct OracleConfig {
    int n_trials = 50;
    /// First length tried; 0 means the target length.
    int start_length = 0;
    int max_length_factor = 5;
    double threshold = 0.05;
    FineTuneConfig finetune;

    nlohmann::json to_json() const;
};

struct OracleResult {
    CircuitDag compiled{3};  // carries the fine-tuned angles
    double loss = 1.0;
    std::uint64_t finetune_seed = 0;
    int trials = 0;
    int final_length = 0;
};

/// Tries n_trials random structures at each length from start_length up to
/// max_length_factor * L, stopping at the first structure below threshold.
/// `trial_losses`, when given, receives the loss of every structure tried.
OracleResult oracle_compile(const CircuitDag &target, const OracleConfig &config, std::uint64_t seed,
                            std::vector<double> *trial_losses = nullptr);

/// One dataset line: a target, a compiled circuit with fine-tuned angles, its
/// LHST loss and the fine-tuning seed that reproduces it.
struct Record {
    CircuitDag target{3};
    CircuitDag compiled{3};
    double loss = 1.0;
    std::uint64_t seed = 0;

    bool operator==(const Record &) const = default;
};

struct GeneratorDatasetConfig {
    int n_per_length = 1000;
    std::vector<int> lengths{4, 5, 6};
    int n_qubits = 3;
    OracleConfig oracle;
    std::uint64_t seed = 0;
    int threads = 1;
};

/// n_per_length labeled tasks per target length. Targets whose best loss stays
/// above the oracle threshold are discarded and replaced.
std::vector<Record> build_generator_dataset(const GeneratorDatasetConfig &config, int *discarded = nullptr);

struct PredictorDatasetConfig {
    int n_random = 2000;
    int n_test = 200;
    int n_qubits = 3;
    std::vector<int> lengths{4, 5, 6};
    int min_length_factor = 2;
    int max_length_factor = 5;
    FineTuneConfig finetune;
    std::uint64_t seed = 0;
    int threads = 1;
};

struct DatasetSplit {
    std::vector<Record> train;
    std::vector<Record> test;
};

/// Random (target, structure) pairs labeled by fine-tuning, pooled with the
/// given generator tasks. Pairs are deduplicated, and the split is made over
/// target canonical keys so the test split shares no target with train.
DatasetSplit build_predictor_dataset(const PredictorDatasetConfig &config,
                                     std::span<const Record> generator_tasks = {});

/// Hash of the serialized (target, compiled) pair.
std::string pair_hash(const Record &record);

nlohmann::json record_to_json(const Record &record);
Record record_from_json(const nlohmann::json &j);

/// One JSON record per line.
std::string dataset_text(std::span<const Record> records);
std::string content_hash(std::string_view text);

inline std::string manifest_path(const std::string &path) {
    return path + ".manifest.json";
}

/// Writes the records and a manifest (count, hash, identifiers, `extra`).
nlohmann::json save_dataset(const std::string &path, std::span<const Record> records, const std::string &split,
                            const nlohmann::json &extra = nlohmann::json::object());

struct LoadedDataset {
    nlohmann::json manifest;
    std::vector<Record> records;
};

/// Verifies the manifest hash and count. Throws CorruptDataError on mismatch
/// or a malformed line and MissingFileError when a file is absent.
LoadedDataset load_dataset(const std::string &path);

}  // namespace qcgen

#endif  // QCGEN_DATASET_HPP
