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

#include "qcgen/encoder.hpp"

#include "qcgen/error.hpp"

namespace qcgen {

using nn::Tape;
using nn::Var;

GraphInput graph_input(const CircuitDag &dag, const OpVocabulary &vocab) {
    GraphInput g;
    int n = dag.node_count();
    g.tokens.reserve(n);
    g.preds.reserve(n);
    for (int v = 0; v < n; v++) {
        g.tokens.push_back(vocab.index_of(dag.nodes()[v]));
        g.preds.push_back(dag.predecessors(v));
    }
    return g;
}

PropagationBlock PropagationBlock::create(nn::ParamStore &store, const std::string &name, int vocab_size,
                                          int hidden_dim, int positions, std::mt19937_64 &rng) {
    PropagationBlock b;
    b.gru = nn::GruCell::create(store, name + ".gru", vocab_size, hidden_dim, rng);
    b.gate = nn::Linear::create(store, name + ".gate", hidden_dim + positions, hidden_dim, true, rng);
    b.message = nn::Linear::create(store, name + ".message", hidden_dim + positions, hidden_dim, false, rng);
    b.positions = positions;
    return b;
}

PropagationBlock PropagationBlock::bind(nn::ParamStore &store, const std::string &name) {
    PropagationBlock b;
    b.gru = nn::GruCell::bind(store, name + ".gru");
    b.gate = nn::Linear::bind(store, name + ".gate", true);
    b.message = nn::Linear::bind(store, name + ".message", false);
    b.positions = b.gate.in_dim() - b.gru.hidden_dim();
    return b;
}

Var PropagationBlock::node_message(Tape &tape, Var h, int position) const {
    if (position < 0 || position >= positions) {
        throw InvalidArgument("node position " + std::to_string(position) + " exceeds the position encoding size " +
                              std::to_string(positions));
    }
    nn::Vector onehot = nn::Vector::Zero(positions);
    onehot(position) = 1;
    Var in = nn::concat(h, tape.constant(std::move(onehot)));
    return nn::mul(nn::sigmoid(gate(in)), message(in));
}

Var PropagationBlock::node_state(Tape &tape, int token, std::span<const Var> incoming) const {
    Var h_in = incoming.empty() ? tape.constant(nn::Vector::Zero(hidden_dim())) : nn::add_n(incoming);
    return gru.step_onehot(tape, token, h_in);
}

GraphEncoder GraphEncoder::create(nn::ParamStore &store, const std::string &name, int vocab_size, int hidden_dim,
                                  int positions, std::mt19937_64 &rng) {
    GraphEncoder e;
    e.forward_ = PropagationBlock::create(store, name + ".fwd", vocab_size, hidden_dim, positions, rng);
    e.backward_ = PropagationBlock::create(store, name + ".bwd", vocab_size, hidden_dim, positions, rng);
    e.halving_ = nn::Linear::create(store, name + ".halving", 2 * hidden_dim, hidden_dim, true, rng);
    return e;
}

GraphEncoder GraphEncoder::bind(nn::ParamStore &store, const std::string &name) {
    GraphEncoder e;
    e.forward_ = PropagationBlock::bind(store, name + ".fwd");
    e.backward_ = PropagationBlock::bind(store, name + ".bwd");
    e.halving_ = nn::Linear::bind(store, name + ".halving", true);
    return e;
}

std::vector<Var> GraphEncoder::propagate(Tape &tape, const GraphInput &graph, Direction direction) const {
    int n = graph.size();
    if (n == 0) {
        throw InvalidArgument("cannot encode an empty graph");
    }
    std::vector<std::vector<int>> incoming(n);
    for (int v = 0; v < n; v++) {
        for (int u : graph.preds[v]) {
            if (u < 0 || u >= v) {
                throw InvalidArgument("graph is not in topological order (edge " + std::to_string(u) + " -> " +
                                      std::to_string(v) + ")");
            }
            if (direction == Direction::Forward) {
                incoming[v].push_back(u);
            } else {
                incoming[u].push_back(v);
            }
        }
    }
    const PropagationBlock &block = direction == Direction::Forward ? forward_ : backward_;
    std::vector<Var> states(n);
    std::vector<Var> messages(n);
    std::vector<Var> parts;
    for (int step = 0; step < n; step++) {
        int v = direction == Direction::Forward ? step : n - 1 - step;
        parts.clear();
        for (int u : incoming[v]) {
            parts.push_back(messages[u]);
        }
        states[v] = block.node_state(tape, graph.tokens[v], parts);
        messages[v] = block.node_message(tape, states[v], v);
    }
    return states;
}

Var GraphEncoder::graph_state(Tape &tape, const GraphInput &graph) const {
    Var h_f = propagate(tape, graph, Direction::Forward).back();
    Var h_b = propagate(tape, graph, Direction::Backward).front();
    return halving_(nn::concat(h_f, h_b));
}

}  // namespace qcgen
