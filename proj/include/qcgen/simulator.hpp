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

#ifndef QCGEN_SIMULATOR_HPP
#define QCGEN_SIMULATOR_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qcgen/circuit.hpp"

namespace qcgen {

using Amplitude = std::complex<double>;

// Bit ordering: qubit 0 is the most significant bit of the amplitude index, so
// X on qubit 0 maps |000> (index 0) to |100> (index 4). Inside a gate matrix the
// first listed qubit is likewise the most significant local bit.

constexpr int kMaxSimQubits = 8;
constexpr int kMaxLhstQubits = kMaxSimQubits / 2;

struct StateVector {
    int n_qubits = 0;
    std::vector<Amplitude> amplitudes;

    static StateVector zero(int n_qubits);
    static StateVector basis(int n_qubits, std::size_t index);
    double squared_norm() const;
};

/// Row-major 2^a x 2^a unitary, plus dU/dtheta for parameterized gates.
struct GateMatrix {
    int dim = 0;
    std::vector<Amplitude> unitary;
    std::optional<std::vector<Amplitude>> derivative;

    Amplitude at(int row, int col) const { return unitary[row * dim + col]; }
};

/// Throws InvalidArgument when `angle` is supplied for a fixed gate or missing
/// for a parameterized one.
GateMatrix gate_matrix(GateKind kind, std::optional<double> angle = std::nullopt);

/// Applies a row-major `dim` x `dim` matrix to `qubits` (first = most significant).
void apply_matrix(std::span<Amplitude> state, int n_qubits, std::span<const Amplitude> matrix,
                  std::span<const int> qubits);

/// Applies the gates in node order, angles read from `params` by slot.
StateVector apply_circuit(const CircuitDag &dag, std::span<const double> params, StateVector state);

/// Local Hilbert-Schmidt test cost.
///
/// Prepares Bell pairs (A_j, B_j) across two n-qubit registers, applies the
/// target on A and the complex conjugate of the compiled circuit on B, and
/// returns 1 - mean_j P(pair j in |Phi+>). Exact 2n-qubit simulation, n <= 4.
double lhst_cost(const CircuitDag &target, std::span<const double> target_params, const CircuitDag &compiled,
                 std::span<const double> compiled_params);

/// dC/dtheta for every parameter slot of `compiled` (adjoint accumulation).
std::vector<double> lhst_grad(const CircuitDag &target, std::span<const double> target_params,
                              const CircuitDag &compiled, std::span<const double> compiled_params);

/// A fixed (target, compiled structure) pair. The Bell-prepared, target-evolved
/// state is computed once so repeated cost/gradient calls only replay the
/// compiled circuit.
class LhstProblem {
   public:
    LhstProblem(const CircuitDag &target, std::span<const double> target_params, const CircuitDag &compiled);

    int param_count() const { return param_count_; }
    double cost(std::span<const double> params) const;
    /// Returns the cost and writes dC/dtheta into `grad`.
    double cost_and_grad(std::span<const double> params, std::span<double> grad) const;

   private:
    /// Row-major gate block of dimension 2, 4 or 8.
    struct Block {
        int dim = 0;
        std::array<Amplitude, 64> m{};
    };
    struct Step {
        GateKind kind;
        int slot;                          // -1 for fixed gates
        Block fixed;                       // conjugated, valid when slot < 0
        Block fixed_inverse;               // its adjoint
        std::array<std::uint32_t, 8> offsets{};
        std::vector<std::uint32_t> bases;  // indices with all gate bits clear
    };

    void block_for(const Step &step, std::span<const double> params, Block &u, Block &inverse,
                   Block *derivative) const;
    static void apply(const Step &step, const Block &b, std::span<Amplitude> state);
    static double overlap(const Step &step, const Block &b, std::span<const Amplitude> bra,
                          std::span<const Amplitude> ket);
    void apply_observable(std::span<const Amplitude> in, std::span<Amplitude> out) const;
    double fidelity_mean(std::span<const Amplitude> state) const;

    int n_;
    int param_count_;
    std::vector<Amplitude> prepared_;
    std::vector<Step> steps_;
};

}  // namespace qcgen

#endif  // QCGEN_SIMULATOR_HPP
