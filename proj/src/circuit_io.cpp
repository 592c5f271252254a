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

#include "qcgen/circuit_io.hpp"

#include "qcgen/error.hpp"

namespace qcgen {

using nlohmann::json;

json circuit_to_json(const CircuitDag &dag) {
    json gates = json::array();
    for (const auto &op : dag.gates()) {
        json g;
        g["g"] = gate_info(op.kind).name;
        g["q"] = op.qubits;
        if (op.param_slot) {
            g["p"] = *op.param_slot;
        }
        gates.push_back(std::move(g));
    }
    json out;
    out["n"] = dag.n_qubits();
    out["gates"] = std::move(gates);
    out["params"] = dag.params();
    return out;
}

CircuitDag circuit_from_json(const json &record) {
    std::vector<GateOp> gates;
    std::vector<double> params;
    int n = 0;
    try {
        if (!record.is_object() || !record.contains("n") || !record.contains("gates")) {
            throw CorruptDataError("circuit record needs \"n\" and \"gates\"");
        }
        n = record.at("n").get<int>();
        for (const auto &g : record.at("gates")) {
            GateKind kind = gate_kind_from_name(g.at("g").get<std::string>());
            GateOp op{kind, g.at("q").get<std::vector<int>>(), std::nullopt};
            if (g.contains("p")) {
                op.param_slot = g.at("p").get<int>();
            }
            gates.push_back(std::move(op));
        }
        if (record.contains("params")) {
            params = record.at("params").get<std::vector<double>>();
        }
    } catch (const json::exception &e) {
        throw CorruptDataError(std::string("malformed circuit record: ") + e.what());
    }
    return CircuitDag::build(n, gates, std::move(params));
}

std::string serialize_circuit(const CircuitDag &dag) {
    return circuit_to_json(dag).dump();
}

CircuitDag deserialize_circuit(std::string_view text) {
    json record;
    try {
        record = json::parse(text);
    } catch (const json::parse_error &e) {
        throw CorruptDataError(std::string("malformed circuit record: ") + e.what());
    }
    return circuit_from_json(record);
}

}  // namespace qcgen
