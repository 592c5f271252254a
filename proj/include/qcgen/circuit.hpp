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

#ifndef QCGEN_CIRCUIT_HPP
#define QCGEN_CIRCUIT_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcgen {

/// Every gate the toolkit knows about. The first fifteen form the target set,
/// RZ and CZ are shared with the native set, and the last five are native only.
enum class GateKind : std::uint8_t {
    H,
    X,
    Y,
    Z,
    S,
    T,
    RX,
    RY,
    RZ,
    CNOT,
    CZ,
    CY,
    SWAP,
    Toffoli,
    CSWAP,
    RXPi,
    RXHalfPi,
    RXMinusHalfPi,
    CRZ,
    XY,
};

struct GateInfo {
    std::string_view name;
    int arity;
    int param_count;
};

const GateInfo &gate_info(GateKind kind);
/// Throws UnknownGateError.
GateKind gate_kind_from_name(std::string_view name);

/// {H, X, Y, Z, S, T, RX, RY, RZ, CNOT, CZ, CY, SWAP, Toffoli, CSWAP}
std::span<const GateKind> target_gate_set();
/// {RX(pi), RX(pi/2), RX(-pi/2), RZ, CRZ, CZ, XY}
std::span<const GateKind> native_gate_set();

/// Sorts the interchangeable qubit positions of symmetric gates (CZ, XY, SWAP,
/// the Toffoli controls, the CSWAP swapped pair). Other gates are returned as is.
std::vector<int> canonical_qubits(GateKind kind, std::vector<int> qubits);

struct GateOp {
    GateKind kind;
    std::vector<int> qubits;
    std::optional<int> param_slot;

    bool operator==(const GateOp &) const = default;
};

enum class NodeType : std::uint8_t { Start, Gate, End };

struct DagNode {
    NodeType type;
    GateOp op;  // meaningful only for NodeType::Gate

    bool operator==(const DagNode &) const = default;
};

/// A circuit as a DAG over gate nodes with Start and End sentinels.
///
/// Node 0 is Start; gates follow in temporal order; End is last once the DAG is
/// finalized. Each gate receives one edge from the most recent earlier node
/// touching each of its qubits (Start if none), and End receives one edge from
/// the last node on every wire. Duplicate edges are merged, so node order is a
/// topological order and predecessor lists are sorted and distinct.
class CircuitDag {
   public:
    /// An unfinalized DAG holding only the Start node.
    explicit CircuitDag(int n_qubits);

    /// Builds a finalized DAG. When no gate carries a param_slot, slots are
    /// assigned in gate order. `params` may be empty (all angles zero) or must
    /// match the slot count.
    static CircuitDag build(int n_qubits, const std::vector<GateOp> &gates, std::vector<double> params = {});

    /// Appends a gate with canonicalized qubits and returns its node index.
    /// Parameterized gates get the next free slot and the given angle.
    int append_gate(GateKind kind, std::vector<int> qubits, double angle = 0.0);
    void finalize();

    int n_qubits() const { return n_qubits_; }
    bool finalized() const { return finalized_; }
    /// Interior gate count.
    int length() const;
    int node_count() const { return static_cast<int>(nodes_.size()); }

    const std::vector<DagNode> &nodes() const { return nodes_; }
    const std::vector<int> &predecessors(int node) const { return preds_[node]; }
    const std::vector<int> &successors(int node) const { return succs_[node]; }
    /// All edges as sorted (from, to) pairs.
    std::vector<std::pair<int, int>> edges() const;
    /// Interior gates in temporal order.
    std::vector<GateOp> gates() const;

    const std::vector<double> &params() const { return params_; }
    void set_params(std::vector<double> params);
    int param_count() const { return static_cast<int>(params_.size()); }

    /// Index of the most recent node touching `qubit` (0 when only Start).
    int last_on_wire(int qubit) const { return wire_tail_[qubit]; }

    bool operator==(const CircuitDag &) const = default;

   private:
    int add_node(DagNode node, const std::vector<int> &from);
    void check_gate(const GateOp &op) const;

    int n_qubits_;
    bool finalized_ = false;
    std::vector<DagNode> nodes_;
    std::vector<std::vector<int>> preds_;
    std::vector<std::vector<int>> succs_;
    std::vector<int> wire_tail_;
    std::vector<double> params_;
};

struct CircuitMetrics {
    int length;
    int depth;

    bool operator==(const CircuitMetrics &) const = default;
};

/// Gate count and ASAP layer count.
CircuitMetrics circuit_metrics(const CircuitDag &dag);

/// Interior gate sequence as "NAME-q0-q1|NAME-q0|...". Parameters are ignored.
std::string canonical_key(const CircuitDag &dag);

/// Unordered qubit pairs a two-qubit operation may act on.
class Connectivity {
   public:
    static Connectivity full(int n_qubits);
    /// q0-q1-...-q(n-1)
    static Connectivity chain(int n_qubits);
    /// "full" or "chain".
    static Connectivity from_name(std::string_view name, int n_qubits);

    const std::string &name() const { return name_; }
    int n_qubits() const { return n_qubits_; }
    bool allows(int a, int b) const;
    const std::vector<std::pair<int, int>> &allowed_pairs() const { return pairs_; }

   private:
    Connectivity(std::string name, int n_qubits, std::vector<std::pair<int, int>> pairs);

    std::string name_;
    int n_qubits_;
    std::vector<std::pair<int, int>> pairs_;
};

enum class VocabRole : std::uint8_t {
    Encoder,  // gate entries + Start + End
    Decoder,  // gate entries + End
};

enum class TokenType : std::uint8_t { Gate, Start, End };

struct VocabEntry {
    TokenType type;
    GateKind kind;
    std::vector<int> qubits;

    std::string label() const;
};

/// Enumerated candidate operations with a connectivity mask.
///
/// Entries are ordered by gate kind (in gate-set order), then by lexicographic
/// canonical qubit assignment; sentinel tokens come last (Start before End).
class OpVocabulary {
   public:
    static OpVocabulary build(std::span<const GateKind> gate_set, int n_qubits, const Connectivity &conn,
                              VocabRole role);

    int size() const { return static_cast<int>(entries_.size()); }
    int n_qubits() const { return n_qubits_; }
    VocabRole role() const { return role_; }
    const std::vector<VocabEntry> &entries() const { return entries_; }
    const std::vector<bool> &mask() const { return mask_; }
    bool permitted(int index) const { return mask_[index]; }
    int permitted_count() const;

    std::optional<int> find(GateKind kind, const std::vector<int> &qubits) const;
    /// Throws VocabularyMismatch.
    int index_of(const DagNode &node) const;
    int end_index() const { return end_index_; }
    /// -1 for decoder vocabularies.
    int start_index() const { return start_index_; }

    std::vector<double> onehot(const DagNode &node) const;

    /// Same entries, mask recomputed for `conn`.
    OpVocabulary with_connectivity(const Connectivity &conn) const;
    const std::string &connectivity_name() const { return conn_name_; }

    /// Stable hash of the entry list (mask excluded).
    std::uint64_t hash() const;

   private:
    OpVocabulary() = default;

    int n_qubits_ = 0;
    VocabRole role_ = VocabRole::Encoder;
    std::vector<VocabEntry> entries_;
    std::vector<bool> mask_;
    int start_index_ = -1;
    int end_index_ = -1;
    std::string conn_name_;
};

/// All distinct canonical qubit assignments for `kind` on `n_qubits`, in
/// lexicographic order.
std::vector<std::vector<int>> qubit_assignments(GateKind kind, int n_qubits);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

}  // namespace qcgen

#endif  // QCGEN_CIRCUIT_HPP
