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

#ifndef QCGEN_ENCODER_HPP
#define QCGEN_ENCODER_HPP

#include <random>
#include <string>
#include <vector>

#include "qcgen/autodiff.hpp"
#include "qcgen/circuit.hpp"
#include "qcgen/nn.hpp"

namespace qcgen {

inline constexpr int kDefaultHiddenDim = 56;
inline constexpr int kDefaultMaxLen = 30;

/// A DAG reduced to what the encoder reads: one vocabulary index per node and
/// forward predecessor lists. Nodes must be listed in a topological order.
struct GraphInput {
    std::vector<int> tokens;
    std::vector<std::vector<int>> preds;

    int size() const { return static_cast<int>(tokens.size()); }
};

/// Throws VocabularyMismatch when a node has no vocabulary entry.
GraphInput graph_input(const CircuitDag &dag, const OpVocabulary &vocab);

enum class Direction { Forward, Backward };

/// One propagation direction: a GRU plus the gated message map
///   msg(u) = sigmoid(G [h_u; pos_u] + b) * (M [h_u; pos_u]).
struct PropagationBlock {
    nn::GruCell gru;
    nn::Linear gate;
    nn::Linear message;
    int positions = 0;

    static PropagationBlock create(nn::ParamStore &store, const std::string &name, int vocab_size, int hidden_dim,
                                   int positions, std::mt19937_64 &rng);
    static PropagationBlock bind(nn::ParamStore &store, const std::string &name);

    nn::Var node_message(nn::Tape &tape, nn::Var h, int position) const;
    /// GRU step on a one-hot token; `incoming` may be empty (zero input state).
    nn::Var node_state(nn::Tape &tape, int token, std::span<const nn::Var> incoming) const;
    int hidden_dim() const { return gru.hidden_dim(); }
};

/// Bidirectional DAG encoder with a halving layer over [h_End(fwd); h_Start(bwd)].
class GraphEncoder {
   public:
    static GraphEncoder create(nn::ParamStore &store, const std::string &name, int vocab_size, int hidden_dim,
                               int positions, std::mt19937_64 &rng);
    static GraphEncoder bind(nn::ParamStore &store, const std::string &name);

    /// States per node, indexed like the input. Positions are node indices.
    std::vector<nn::Var> propagate(nn::Tape &tape, const GraphInput &graph, Direction direction) const;
    nn::Var graph_state(nn::Tape &tape, const GraphInput &graph) const;

    int hidden_dim() const { return forward_.hidden_dim(); }
    int vocab_size() const { return forward_.gru.input_dim(); }
    int positions() const { return forward_.positions; }

   private:
    PropagationBlock forward_;
    PropagationBlock backward_;
    nn::Linear halving_;
};

}  // namespace qcgen

#endif  // QCGEN_ENCODER_HPP
