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

#ifndef QCGEN_CIRCUIT_IO_HPP
#define QCGEN_CIRCUIT_IO_HPP

#include <string>
#include <string_view>

#include "json.hpp"
#include "qcgen/circuit.hpp"

namespace qcgen {

// One circuit per line:
//   {"n":3,"gates":[{"g":"H","q":[0]},{"g":"CRZ","q":[0,1],"p":0}],"params":[1.5708]}
// "p" is the parameter slot of a parameterized gate; angles are radians.

nlohmann::json circuit_to_json(const CircuitDag &dag);
/// Throws CorruptDataError on a malformed record, UnknownGateError on an
/// unknown gate name and InvalidArgument on an out-of-range qubit.
CircuitDag circuit_from_json(const nlohmann::json &record);

std::string serialize_circuit(const CircuitDag &dag);
CircuitDag deserialize_circuit(std::string_view text);

}  // namespace qcgen

#endif  // QCGEN_CIRCUIT_IO_HPP
