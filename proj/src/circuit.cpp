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

#include "qcgen/circuit.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>

#include "qcgen/error.hpp"

namespace qcgen {

namespace {

constexpr std::array<GateInfo, 20> kGateInfo{{
    {"H", 1, 0},
    {"X", 1, 0},
    {"Y", 1, 0},
    {"Z", 1, 0},
    {"S", 1, 0},
    {"T", 1, 0},
    {"RX", 1, 1},
    {"RY", 1, 1},
    {"RZ", 1, 1},
    {"CNOT", 2, 0},
    {"CZ", 2, 0},
    {"CY", 2, 0},
    {"SWAP", 2, 0},
    {"Toffoli", 3, 0},
    {"CSWAP", 3, 0},
    {"RX_PI", 1, 0},
    {"RX_PI_2", 1, 0},
    {"RX_MPI_2", 1, 0},
    {"CRZ", 2, 1},
    {"XY", 2, 1},
}};

constexpr std::array<GateKind, 15> kTargetSet{
    GateKind::H,  GateKind::X,    GateKind::Y,  GateKind::Z,  GateKind::S,    GateKind::T,       GateKind::RX,   GateKind::RY,
    GateKind::RZ, GateKind::CNOT, GateKind::CZ, GateKind::CY, GateKind::SWAP, GateKind::Toffoli, GateKind::CSWAP,
};

constexpr std::array<GateKind, 7> kNativeSet{
    GateKind::RXPi, GateKind::RXHalfPi, GateKind::RXMinusHalfPi, GateKind::RZ, GateKind::CRZ, GateKind::CZ, GateKind::XY,
};

}  // namespace

const GateInfo &gate_info(GateKind kind) {
    return kGateInfo[static_cast<std::size_t>(kind)];
}

GateKind gate_kind_from_name(std::string_view name) {
    for (std::size_t k = 0; k < kGateInfo.size(); k++) {
        if (kGateInfo[k].name == name) {
            return static_cast<GateKind>(k);
        }
    }
    throw UnknownGateError("unknown gate name '" + std::string(name) + "'");
}

std::span<const GateKind> target_gate_set() {
    return kTargetSet;
}

std::span<const GateKind> native_gate_set() {
    return kNativeSet;
}

std::vector<int> canonical_qubits(GateKind kind, std::vector<int> qubits) {
    switch (kind) {
        case GateKind::CZ:
        case GateKind::XY:
        case GateKind::SWAP:
            std::sort(qubits.begin(), qubits.end());
            break;
        case GateKind::Toffoli:
            if (qubits.size() == 3) {
                std::sort(qubits.begin(), qubits.begin() + 2);
            }
            break;
        case GateKind::CSWAP:
            if (qubits.size() == 3) {
                std::sort(qubits.begin() + 1, qubits.end());
            }
            break;
        default:
            break;
    }
    return qubits;
}

std::vector<std::vector<int>> qubit_assignments(GateKind kind, int n_qubits) {
    int arity = gate_info(kind).arity;
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::vector<bool> used(n_qubits, false);
    std::function<void()> rec = [&]() {
        if (static_cast<int>(cur.size()) == arity) {
            if (canonical_qubits(kind, cur) == cur) {
                out.push_back(cur);
            }
            return;
        }
        for (int q = 0; q < n_qubits; q++) {
            if (!used[q]) {
                used[q] = true;
                cur.push_back(q);
                rec();
                cur.pop_back();
                used[q] = false;
            }
        }
    };
    rec();
    return out;
}

// ---------------------------------------------------------------------------
// CircuitDag

CircuitDag::CircuitDag(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 1) {
        throw InvalidArgument("circuit needs at least one qubit");
    }
    nodes_.push_back(DagNode{NodeType::Start, GateOp{GateKind::H, {}, std::nullopt}});
    preds_.emplace_back();
    succs_.emplace_back();
    wire_tail_.assign(n_qubits, 0);
}

void CircuitDag::check_gate(const GateOp &op) const {
    const GateInfo &info = gate_info(op.kind);
    if (static_cast<int>(op.qubits.size()) != info.arity) {
        throw InvalidArgument(std::string(info.name) + " acts on " + std::to_string(info.arity) + " qubit(s), got " +
                              std::to_string(op.qubits.size()));
    }
    for (std::size_t i = 0; i < op.qubits.size(); i++) {
        int q = op.qubits[i];
        if (q < 0 || q >= n_qubits_) {
            throw InvalidArgument("qubit index " + std::to_string(q) + " out of range for " +
                                  std::to_string(n_qubits_) + " qubits");
        }
        for (std::size_t j = 0; j < i; j++) {
            if (op.qubits[j] == q) {
                throw InvalidArgument("duplicate qubit " + std::to_string(q) + " in " + std::string(info.name));
            }
        }
    }
}

int CircuitDag::add_node(DagNode node, const std::vector<int> &from) {
    int id = static_cast<int>(nodes_.size());
    std::vector<int> preds = from;
    std::sort(preds.begin(), preds.end());
    preds.erase(std::unique(preds.begin(), preds.end()), preds.end());
    for (int p : preds) {
        succs_[p].push_back(id);
    }
    nodes_.push_back(std::move(node));
    preds_.push_back(std::move(preds));
    succs_.emplace_back();
    return id;
}

int CircuitDag::append_gate(GateKind kind, std::vector<int> qubits, double angle) {
    if (finalized_) {
        throw InvalidArgument("cannot append to a finalized circuit");
    }
    GateOp op{kind, std::move(qubits), std::nullopt};
    check_gate(op);
    op.qubits = canonical_qubits(kind, std::move(op.qubits));
    if (gate_info(kind).param_count == 1) {
        op.param_slot = static_cast<int>(params_.size());
        params_.push_back(angle);
    }
    std::vector<int> from;
    for (int q : op.qubits) {
        from.push_back(wire_tail_[q]);
    }
    std::vector<int> touched = op.qubits;
    int id = add_node(DagNode{NodeType::Gate, std::move(op)}, from);
    for (int q : touched) {
        wire_tail_[q] = id;
    }
    return id;
}

void CircuitDag::finalize() {
    if (finalized_) {
        return;
    }
    add_node(DagNode{NodeType::End, GateOp{GateKind::H, {}, std::nullopt}}, wire_tail_);
    finalized_ = true;
}

CircuitDag CircuitDag::build(int n_qubits, const std::vector<GateOp> &gates, std::vector<double> params) {
    CircuitDag dag(n_qubits);
    int slots = 0;
    bool any_slot = false;
    bool missing_slot = false;
    for (const auto &g : gates) {
        if (gate_info(g.kind).param_count == 1) {
            slots++;
            (g.param_slot ? any_slot : missing_slot) = true;
        } else if (g.param_slot) {
            throw InvalidArgument(std::string(gate_info(g.kind).name) + " takes no parameter");
        }
    }
    if (any_slot && missing_slot) {
        throw InvalidArgument("either all or none of the parameterized gates may carry a param slot");
    }
    if (params.empty()) {
        params.assign(slots, 0.0);
    }
    if (static_cast<int>(params.size()) != slots) {
        throw InvalidArgument("expected " + std::to_string(slots) + " parameters, got " +
                              std::to_string(params.size()));
    }
    std::vector<bool> seen(slots, false);
    int next = 0;
    for (const auto &g : gates) {
        dag.check_gate(g);
        double angle = 0.0;
        int slot = -1;
        if (gate_info(g.kind).param_count == 1) {
            slot = g.param_slot ? *g.param_slot : next++;
            if (slot < 0 || slot >= slots || seen[slot]) {
                throw InvalidArgument("invalid or repeated param slot " + std::to_string(slot));
            }
            seen[slot] = true;
            angle = params[slot];
        }
        int id = dag.append_gate(g.kind, g.qubits, angle);
        if (slot >= 0) {
            dag.nodes_[id].op.param_slot = slot;
        }
    }
    dag.params_ = std::move(params);
    dag.finalize();
    return dag;
}

int CircuitDag::length() const {
    int n = static_cast<int>(nodes_.size()) - 1;
    return finalized_ ? n - 1 : n;
}

std::vector<std::pair<int, int>> CircuitDag::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int v = 0; v < node_count(); v++) {
        for (int u : preds_[v]) {
            out.emplace_back(u, v);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<GateOp> CircuitDag::gates() const {
    std::vector<GateOp> out;
    for (const auto &n : nodes_) {
        if (n.type == NodeType::Gate) {
            out.push_back(n.op);
        }
    }
    return out;
}

void CircuitDag::set_params(std::vector<double> params) {
    if (params.size() != params_.size()) {
        throw InvalidArgument("expected " + std::to_string(params_.size()) + " parameters, got " +
                              std::to_string(params.size()));
    }
    params_ = std::move(params);
}

// ---------------------------------------------------------------------------
// Metrics and keys

CircuitMetrics circuit_metrics(const CircuitDag &dag) {
    std::vector<int> level(dag.n_qubits(), 0);
    int length = 0;
    int depth = 0;
    for (const auto &node : dag.nodes()) {
        if (node.type != NodeType::Gate) {
            continue;
        }
        length++;
        int layer = 0;
        for (int q : node.op.qubits) {
            layer = std::max(layer, level[q]);
        }
        layer++;
        for (int q : node.op.qubits) {
            level[q] = layer;
        }
        depth = std::max(depth, layer);
    }
    return {length, depth};
}

std::string canonical_key(const CircuitDag &dag) {
    std::string key;
    bool first = true;
    for (const auto &node : dag.nodes()) {
        if (node.type != NodeType::Gate) {
            continue;
        }
        if (!first) {
            key += '|';
        }
        first = false;
        key += gate_info(node.op.kind).name;
        for (int q : node.op.qubits) {
            key += '-';
            key += std::to_string(q);
        }
    }
    return key;
}

// ---------------------------------------------------------------------------
// Connectivity

Connectivity::Connectivity(std::string name, int n_qubits, std::vector<std::pair<int, int>> pairs)
    : name_(std::move(name)), n_qubits_(n_qubits), pairs_(std::move(pairs)) {
}

Connectivity Connectivity::full(int n_qubits) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n_qubits; a++) {
        for (int b = a + 1; b < n_qubits; b++) {
            pairs.emplace_back(a, b);
        }
    }
    return Connectivity("full", n_qubits, std::move(pairs));
}

Connectivity Connectivity::chain(int n_qubits) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a + 1 < n_qubits; a++) {
        pairs.emplace_back(a, a + 1);
    }
    return Connectivity("chain", n_qubits, std::move(pairs));
}

Connectivity Connectivity::from_name(std::string_view name, int n_qubits) {
    if (name == "full") {
        return full(n_qubits);
    }
    if (name == "chain") {
        return chain(n_qubits);
    }
    throw InvalidArgument("unknown connectivity '" + std::string(name) + "' (expected full or chain)");
}

bool Connectivity::allows(int a, int b) const {
    if (a > b) {
        std::swap(a, b);
    }
    return std::find(pairs_.begin(), pairs_.end(), std::make_pair(a, b)) != pairs_.end();
}

// ---------------------------------------------------------------------------
// OpVocabulary

std::string VocabEntry::label() const {
    switch (type) {
        case TokenType::Start:
            return "<start>";
        case TokenType::End:
            return "<end>";
        default:
            break;
    }
    std::string s(gate_info(kind).name);
    for (int q : qubits) {
        s += '-';
        s += std::to_string(q);
    }
    return s;
}

namespace {

bool entry_permitted(const VocabEntry &e, const Connectivity &conn) {
    for (std::size_t i = 0; i < e.qubits.size(); i++) {
        for (std::size_t j = i + 1; j < e.qubits.size(); j++) {
            if (!conn.allows(e.qubits[i], e.qubits[j])) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

OpVocabulary OpVocabulary::build(std::span<const GateKind> gate_set, int n_qubits, const Connectivity &conn,
                                 VocabRole role) {
    if (gate_set.empty()) {
        throw InvalidArgument("gate set is empty");
    }
    if (n_qubits < 2) {
        throw InvalidArgument("vocabulary needs at least two qubits");
    }
    if (conn.n_qubits() != n_qubits) {
        throw InvalidArgument("connectivity is defined over a different qubit count");
    }
    OpVocabulary v;
    v.n_qubits_ = n_qubits;
    v.role_ = role;
    for (GateKind k : gate_set) {
        if (gate_info(k).arity > n_qubits) {
            continue;
        }
        for (auto &qs : qubit_assignments(k, n_qubits)) {
            v.entries_.push_back(VocabEntry{TokenType::Gate, k, std::move(qs)});
        }
    }
    if (role == VocabRole::Encoder) {
        v.start_index_ = static_cast<int>(v.entries_.size());
        v.entries_.push_back(VocabEntry{TokenType::Start, GateKind::H, {}});
    }
    v.end_index_ = static_cast<int>(v.entries_.size());
    v.entries_.push_back(VocabEntry{TokenType::End, GateKind::H, {}});
    return v.with_connectivity(conn);
}

OpVocabulary OpVocabulary::with_connectivity(const Connectivity &conn) const {
    if (conn.n_qubits() != n_qubits_) {
        throw InvalidArgument("connectivity is defined over a different qubit count");
    }
    OpVocabulary v = *this;
    v.conn_name_ = conn.name();
    v.mask_.resize(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); i++) {
        v.mask_[i] = entries_[i].type != TokenType::Gate || entry_permitted(entries_[i], conn);
    }
    return v;
}

int OpVocabulary::permitted_count() const {
    return static_cast<int>(std::count(mask_.begin(), mask_.end(), true));
}

std::optional<int> OpVocabulary::find(GateKind kind, const std::vector<int> &qubits) const {
    for (std::size_t i = 0; i < entries_.size(); i++) {
        const auto &e = entries_[i];
        if (e.type == TokenType::Gate && e.kind == kind && e.qubits == qubits) {
            return static_cast<int>(i);
        }
    }
    return std::nullopt;
}

int OpVocabulary::index_of(const DagNode &node) const {
    switch (node.type) {
        case NodeType::Start:
            if (start_index_ < 0) {
                throw VocabularyMismatch("decoder vocabulary has no Start token");
            }
            return start_index_;
        case NodeType::End:
            return end_index_;
        case NodeType::Gate:
            break;
    }
    auto idx = find(node.op.kind, canonical_qubits(node.op.kind, node.op.qubits));
    if (!idx) {
        std::string label = VocabEntry{TokenType::Gate, node.op.kind, node.op.qubits}.label();
        throw VocabularyMismatch("operation " + label + " is not in the vocabulary");
    }
    return *idx;
}

std::vector<double> OpVocabulary::onehot(const DagNode &node) const {
    std::vector<double> out(entries_.size(), 0.0);
    out[index_of(node)] = 1.0;
    return out;
}

std::uint64_t OpVocabulary::hash() const {
    std::string text = role_ == VocabRole::Encoder ? "enc" : "dec";
    text += ":" + std::to_string(n_qubits_);
    for (const auto &e : entries_) {
        text += ';';
        text += e.label();
    }
    return fnv1a(text);
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

}  // namespace qcgen
