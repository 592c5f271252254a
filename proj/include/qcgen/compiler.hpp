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

#ifndef QCGEN_COMPILER_HPP
#define QCGEN_COMPILER_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcgen/circuit.hpp"
#include "qcgen/finetune.hpp"
#include "qcgen/generator.hpp"
#include "qcgen/predictor.hpp"

namespace qcgen {

struct CompileConfig {
    int n_candidates = 100;
    SamplingStrategy strategy = SamplingStrategy::top_k(25);
    /// Empty keeps the generator's current mask.
    std::string connectivity;
    /// Used only when a predictor is supplied.
    double filter_threshold = 0.1;
    FineTuneConfig finetune;
    std::uint64_t seed = 0;
    int threads = 1;

    nlohmann::json to_json() const;
};

/// One distinct decoded structure.
struct CandidateRecord {
    std::string key;
    CircuitDag circuit{3};  // carries the fine-tuned angles once tuned
    /// Index of the first draw that produced this structure, and how many did.
    int first_draw = 0;
    int multiplicity = 0;
    std::optional<double> predicted;
    bool fine_tuned = false;
    double loss = 1.0;
    int steps = 0;
    std::uint64_t finetune_seed = 0;
    CircuitMetrics metrics{0, 0};
};

/// Wall-clock seconds. Kept out of to_json() so reports stay reproducible.
struct CompileTimings {
    double generate = 0;
    double predict = 0;
    double fine_tune = 0;
    double total = 0;
};

struct CompileReport {
    std::string target_id;
    CircuitDag target{3};
    /// Canonical key of every draw, in draw order.
    std::vector<std::string> generated_keys;
    std::vector<CandidateRecord> candidates;
    /// Index into candidates, or -1 when nothing was tuned.
    int best = -1;
    bool filter_failed_open = false;
    CompileTimings timings;

    const CandidateRecord &best_candidate() const;
    double best_loss() const;
    nlohmann::json to_json() const;
};

/// Encode the target, draw n_candidates latents and decode each, drop
/// duplicates, optionally filter with the predictor, fine-tune the survivors
/// and keep the lowest loss. Throws VocabularyMismatch when the predictor and
/// generator disagree on the target vocabulary.
CompileReport compile(const CircuitDag &target, const Generator &gen, const Predictor *pred,
                      const CompileConfig &config, const std::string &target_id = {});

struct BaselineResult {
    double best_loss = 1.0;
    std::vector<double> losses;
};

/// Fine-tunes one random native structure per entry of `lengths`.
BaselineResult random_baseline(const CircuitDag &target, std::span<const int> lengths, const CompileConfig &config);

struct EvalSummary {
    double mean_loss = 0;
    double mean_length = 0;
    double mean_depth = 0;
    double uniqueness = 0;
    double novelty = 0;
    int targets = 0;
    int generated = 0;

    nlohmann::json to_json() const;
};

/// Uniqueness and novelty are pooled over every draw of every report; means
/// are over the per-target best candidates.
EvalSummary eval_metrics(std::span<const CompileReport> reports, const std::set<std::string> &training_keys);

/// Header plus one row per distinct candidate of every report.
std::string reports_csv(std::span<const CompileReport> reports);

}  // namespace qcgen

#endif  // QCGEN_COMPILER_HPP
