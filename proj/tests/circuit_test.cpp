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

#include <set>

#include "gtest/gtest.h"
#include "oracles.hpp"
#include "qcgen/circuit_io.hpp"
#include "qcgen/error.hpp"

using namespace qcgen;

namespace {

GateOp g(GateKind k, std::vector<int> q) {
    return GateOp{k, std::move(q), std::nullopt};
}

// Independent layering: repeatedly peel off gates whose qubits are all free.
int depth_by_peeling(const std::vector<GateOp> &gates, int n) {
    std::vector<bool> done(gates.size(), false);
    std::size_t remaining = gates.size();
    int layers = 0;
    while (remaining > 0) {
        std::vector<bool> blocked(n, false);
        std::vector<std::size_t> take;
        for (std::size_t i = 0; i < gates.size(); i++) {
            if (done[i]) {
                continue;
            }
            bool free = true;
            for (int q : gates[i].qubits) {
                free = free && !blocked[q];
            }
            if (free) {
                take.push_back(i);
            }
            for (int q : gates[i].qubits) {
                blocked[q] = true;
            }
        }
        for (auto i : take) {
            done[i] = true;
        }
        remaining -= take.size();
        layers++;
    }
    return layers;
}

}  // namespace

TEST(circuit_dag, five_gate_example_has_seven_nodes) {
    auto dag = oracle::five_gate_example();
    EXPECT_EQ(dag.node_count(), 7);
    EXPECT_EQ(circuit_metrics(dag), (CircuitMetrics{5, 4}));
}

TEST(circuit_dag, empty_circuit_is_start_to_end) {
    auto dag = CircuitDag::build(3, {});
    ASSERT_EQ(dag.node_count(), 2);
    EXPECT_EQ(dag.edges(), (std::vector<std::pair<int, int>>{{0, 1}}));
    EXPECT_EQ(circuit_metrics(dag), (CircuitMetrics{0, 0}));
}

TEST(circuit_dag, wire_rule_edges) {
    auto dag = CircuitDag::build(3, {g(GateKind::H, {0}), g(GateKind::X, {1}), g(GateKind::CNOT, {0, 1}),
                                     g(GateKind::H, {2})});
    // 0 Start, 1 H0, 2 X1, 3 CNOT, 4 H2, 5 End
    std::vector<std::pair<int, int>> expected{{0, 1}, {0, 2}, {0, 4}, {1, 3}, {2, 3}, {3, 5}, {4, 5}};
    EXPECT_EQ(dag.edges(), expected);
    EXPECT_EQ(circuit_metrics(dag), (CircuitMetrics{4, 2}));
}

TEST(circuit_dag, rejects_bad_qubits) {
    EXPECT_THROW(CircuitDag::build(3, {g(GateKind::H, {3})}), InvalidArgument);
    EXPECT_THROW(CircuitDag::build(3, {g(GateKind::H, {-1})}), InvalidArgument);
    EXPECT_THROW(CircuitDag::build(3, {g(GateKind::CNOT, {1, 1})}), InvalidArgument);
    EXPECT_THROW(CircuitDag::build(3, {g(GateKind::CNOT, {1})}), InvalidArgument);
}

TEST(circuit_dag, params_assigned_in_gate_order) {
    auto dag = CircuitDag::build(2, {g(GateKind::RZ, {0}), g(GateKind::H, {1}), g(GateKind::CRZ, {0, 1})}, {0.1, 0.2});
    auto gates = dag.gates();
    EXPECT_EQ(gates[0].param_slot, 0);
    EXPECT_FALSE(gates[1].param_slot.has_value());
    EXPECT_EQ(gates[2].param_slot, 1);
    EXPECT_THROW(CircuitDag::build(2, {g(GateKind::RZ, {0})}, {0.1, 0.2}), InvalidArgument);
}

TEST(circuit_dag, symmetric_gates_are_canonical) {
    auto dag = CircuitDag::build(3, {g(GateKind::CZ, {2, 0}), g(GateKind::Toffoli, {2, 1, 0}),
                                     g(GateKind::CSWAP, {0, 2, 1}), g(GateKind::CNOT, {2, 0})});
    auto gates = dag.gates();
    EXPECT_EQ(gates[0].qubits, (std::vector<int>{0, 2}));
    EXPECT_EQ(gates[1].qubits, (std::vector<int>{1, 2, 0}));
    EXPECT_EQ(gates[2].qubits, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(gates[3].qubits, (std::vector<int>{2, 0}));
}

TEST(circuit_dag, random_dags_satisfy_structure_invariants) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; trial++) {
        auto set = trial % 2 ? target_gate_set() : native_gate_set();
        int n = 2 + trial % 3;
        auto dag = oracle::random_circuit(rng, set, n, trial % 17);
        ASSERT_TRUE(dag.finalized());
        // Topological node order; every non-Start node has a predecessor and
        // every non-End node a successor.
        for (auto [u, v] : dag.edges()) {
            ASSERT_LT(u, v);
        }
        for (int v = 1; v < dag.node_count(); v++) {
            ASSERT_FALSE(dag.predecessors(v).empty());
        }
        for (int v = 0; v + 1 < dag.node_count(); v++) {
            ASSERT_FALSE(dag.successors(v).empty());
        }
        // Each qubit of each gate contributes exactly the previous node on its wire.
        std::vector<int> last(n, 0);
        for (int v = 1; v + 1 < dag.node_count(); v++) {
            const auto &op = dag.nodes()[v].op;
            std::set<int> expected;
            for (int q : op.qubits) {
                expected.insert(last[q]);
            }
            std::set<int> got(dag.predecessors(v).begin(), dag.predecessors(v).end());
            ASSERT_EQ(got, expected);
            for (int q : op.qubits) {
                last[q] = v;
            }
        }
        auto m = circuit_metrics(dag);
        ASSERT_LE(m.depth, m.length);
        ASSERT_EQ(m.depth, depth_by_peeling(dag.gates(), n));
    }
}

TEST(circuit_dag, depth_equals_length_on_a_shared_qubit) {
    auto dag = CircuitDag::build(3, {g(GateKind::H, {0}), g(GateKind::CNOT, {0, 1}), g(GateKind::CZ, {0, 2}),
                                     g(GateKind::X, {0})});
    EXPECT_EQ(circuit_metrics(dag), (CircuitMetrics{4, 4}));
}

TEST(vocabulary, native_full_has_25_entries) {
    auto v = OpVocabulary::build(native_gate_set(), 3, Connectivity::full(3), VocabRole::Decoder);
    EXPECT_EQ(v.size(), 25);
    EXPECT_EQ(v.permitted_count(), 25);
    EXPECT_EQ(v.end_index(), 24);
    EXPECT_EQ(v.start_index(), -1);
    std::set<std::string> labels;
    for (const auto &e : v.entries()) {
        labels.insert(e.label());
    }
    EXPECT_EQ(labels.size(), 25u);
}

TEST(vocabulary, native_chain_masks_four_entries) {
    auto v = OpVocabulary::build(native_gate_set(), 3, Connectivity::chain(3), VocabRole::Decoder);
    EXPECT_EQ(v.size(), 25);
    std::set<std::string> masked;
    for (int i = 0; i < v.size(); i++) {
        if (!v.permitted(i)) {
            masked.insert(v.entries()[i].label());
        }
    }
    EXPECT_EQ(masked, (std::set<std::string>{"CRZ-0-2", "CRZ-2-0", "CZ-0-2", "XY-0-2"}));
    EXPECT_TRUE(v.permitted(v.end_index()));
}

TEST(vocabulary, target_full_has_53_entries) {
    auto v = OpVocabulary::build(target_gate_set(), 3, Connectivity::full(3), VocabRole::Encoder);
    EXPECT_EQ(v.size(), 53);
    EXPECT_EQ(v.start_index(), 51);
    EXPECT_EQ(v.end_index(), 52);
    int count_toffoli = 0, count_cswap = 0, count_cnot = 0;
    for (const auto &e : v.entries()) {
        count_toffoli += e.type == TokenType::Gate && e.kind == GateKind::Toffoli;
        count_cswap += e.type == TokenType::Gate && e.kind == GateKind::CSWAP;
        count_cnot += e.type == TokenType::Gate && e.kind == GateKind::CNOT;
    }
    EXPECT_EQ(count_toffoli, 3);
    EXPECT_EQ(count_cswap, 3);
    EXPECT_EQ(count_cnot, 6);
}

TEST(vocabulary, rejects_empty_gate_set) {
    std::vector<GateKind> none;
    EXPECT_THROW(OpVocabulary::build(none, 3, Connectivity::full(3), VocabRole::Decoder), InvalidArgument);
}

TEST(vocabulary, onehot_indices_follow_enumeration_order) {
    auto v = OpVocabulary::build(native_gate_set(), 3, Connectivity::full(3), VocabRole::Decoder);
    DagNode end{NodeType::End, {}};
    auto oh = v.onehot(end);
    EXPECT_EQ(oh[24], 1.0);
    // 9 fixed-angle RX entries come first, then RZ on q0, q1, q2.
    DagNode rz2{NodeType::Gate, g(GateKind::RZ, {2})};
    auto oh2 = v.onehot(rz2);
    EXPECT_EQ(oh2[11], 1.0);
    double sum = 0;
    for (double x : oh2) {
        sum += x;
    }
    EXPECT_EQ(sum, 1.0);
    DagNode start{NodeType::Start, {}};
    EXPECT_THROW(v.onehot(start), VocabularyMismatch);
    DagNode h{NodeType::Gate, g(GateKind::H, {0})};
    EXPECT_THROW(v.onehot(h), VocabularyMismatch);
}

TEST(vocabulary, hash_ignores_mask) {
    auto full = OpVocabulary::build(native_gate_set(), 3, Connectivity::full(3), VocabRole::Decoder);
    auto chain = full.with_connectivity(Connectivity::chain(3));
    EXPECT_EQ(full.hash(), chain.hash());
    auto enc = OpVocabulary::build(native_gate_set(), 3, Connectivity::full(3), VocabRole::Encoder);
    EXPECT_NE(full.hash(), enc.hash());
}

TEST(connectivity, chain_of_three) {
    auto c = Connectivity::chain(3);
    EXPECT_EQ(c.allowed_pairs(), (std::vector<std::pair<int, int>>{{0, 1}, {1, 2}}));
    EXPECT_TRUE(c.allows(2, 1));
    EXPECT_FALSE(c.allows(0, 2));
    EXPECT_THROW(Connectivity::from_name("ring", 3), InvalidArgument);
}

TEST(canonical_key, format_and_equality) {
    auto a = CircuitDag::build(2, {g(GateKind::H, {0}), g(GateKind::CNOT, {0, 1})});
    EXPECT_EQ(canonical_key(a), "H-0|CNOT-0-1");
    auto b = CircuitDag::build(2, {g(GateKind::H, {0}), g(GateKind::CNOT, {0, 1})});
    EXPECT_EQ(canonical_key(a), canonical_key(b));
    auto c = CircuitDag::build(2, {g(GateKind::H, {0}), g(GateKind::X, {1})});
    auto d = CircuitDag::build(2, {g(GateKind::X, {1}), g(GateKind::H, {0})});
    EXPECT_NE(canonical_key(c), canonical_key(d));
    auto with_params = CircuitDag::build(1, {g(GateKind::RZ, {0})}, {0.3});
    auto other_params = CircuitDag::build(1, {g(GateKind::RZ, {0})}, {1.3});
    EXPECT_EQ(canonical_key(with_params), canonical_key(other_params));
}

TEST(canonical_key, injective_over_random_sequences) {
    std::mt19937_64 rng(11);
    std::map<std::string, std::vector<GateOp>> seen;
    for (int i = 0; i < 2000; i++) {
        auto dag = oracle::random_circuit(rng, native_gate_set(), 3, 1 + i % 4);
        auto key = canonical_key(dag);
        auto [it, inserted] = seen.emplace(key, dag.gates());
        if (!inserted) {
            auto a = it->second, b = dag.gates();
            ASSERT_EQ(a.size(), b.size());
            for (std::size_t k = 0; k < a.size(); k++) {
                ASSERT_EQ(a[k].kind, b[k].kind);
                ASSERT_EQ(a[k].qubits, b[k].qubits);
            }
        }
    }
}

TEST(serialization, round_trip_random_circuits) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; i++) {
        auto dag = oracle::random_circuit(rng, i % 2 ? target_gate_set() : native_gate_set(), 3, i % 12);
        auto text = serialize_circuit(dag);
        auto back = deserialize_circuit(text);
        ASSERT_EQ(back, dag) << text;
        ASSERT_EQ(serialize_circuit(back), text);
    }
}

TEST(serialization, documented_format) {
    auto dag = CircuitDag::build(3, {g(GateKind::H, {0}), g(GateKind::CRZ, {0, 1})}, {1.5708});
    EXPECT_EQ(serialize_circuit(dag), R"({"gates":[{"g":"H","q":[0]},{"g":"CRZ","p":0,"q":[0,1]}],"n":3,"params":[1.5708]})");
    auto parsed =
        deserialize_circuit(R"({"n":3,"gates":[{"g":"H","q":[0]},{"g":"CRZ","q":[0,1],"p":0}],"params":[1.5708]})");
    EXPECT_EQ(parsed, dag);
}

TEST(serialization, five_gate_example_keeps_metrics) {
    auto back = deserialize_circuit(serialize_circuit(oracle::five_gate_example()));
    EXPECT_EQ(circuit_metrics(back), (CircuitMetrics{5, 4}));
}

TEST(serialization, errors) {
    EXPECT_THROW(deserialize_circuit(R"({"n":3,"gates":[{"g":"FOO","q":[0]}]})"), UnknownGateError);
    EXPECT_THROW(deserialize_circuit(R"({"n":3,"gates":[{"g":"H","q":[5]}]})"), InvalidArgument);
    EXPECT_THROW(deserialize_circuit(R"({"n":3,"gates":[{"g":"H"}]})"), CorruptDataError);
    EXPECT_THROW(deserialize_circuit(R"({"n":3,"gates":[)"), CorruptDataError);
    EXPECT_THROW(deserialize_circuit(R"([1,2])"), CorruptDataError);
}
