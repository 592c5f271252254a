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

#include "qcgen/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qcgen/error.hpp"

namespace qcgen {

namespace {

constexpr Amplitude kI{0.0, 1.0};

std::vector<Amplitude> identity(int dim) {
    std::vector<Amplitude> m(dim * dim, 0.0);
    for (int i = 0; i < dim; i++) {
        m[i * dim + i] = 1.0;
    }
    return m;
}

std::vector<Amplitude> rx(double theta) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return {c, -kI * s, -kI * s, c};
}

std::vector<Amplitude> controlled(const std::vector<Amplitude> &u) {
    auto m = identity(4);
    m[2 * 4 + 2] = u[0];
    m[2 * 4 + 3] = u[1];
    m[3 * 4 + 2] = u[2];
    m[3 * 4 + 3] = u[3];
    return m;
}

}  // namespace

StateVector StateVector::zero(int n_qubits) {
    return basis(n_qubits, 0);
}

StateVector StateVector::basis(int n_qubits, std::size_t index) {
    if (n_qubits < 1 || n_qubits > kMaxSimQubits) {
        throw InvalidArgument("state vectors support 1.." + std::to_string(kMaxSimQubits) + " qubits");
    }
    StateVector s;
    s.n_qubits = n_qubits;
    s.amplitudes.assign(std::size_t{1} << n_qubits, 0.0);
    if (index >= s.amplitudes.size()) {
        throw InvalidArgument("basis index out of range");
    }
    s.amplitudes[index] = 1.0;
    return s;
}

double StateVector::squared_norm() const {
    double total = 0;
    for (const auto &a : amplitudes) {
        total += std::norm(a);
    }
    return total;
}

GateMatrix gate_matrix(GateKind kind, std::optional<double> angle) {
    const GateInfo &info = gate_info(kind);
    if (info.param_count == 1 && !angle) {
        throw InvalidArgument(std::string(info.name) + " requires an angle");
    }
    if (info.param_count == 0 && angle) {
        throw InvalidArgument(std::string(info.name) + " takes no angle");
    }
    const double r2 = 1.0 / std::numbers::sqrt2;
    double theta = angle.value_or(0.0);
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    GateMatrix g;
    g.dim = 1 << info.arity;
    switch (kind) {
        case GateKind::H:
            g.unitary = {r2, r2, r2, -r2};
            break;
        case GateKind::X:
            g.unitary = {0, 1, 1, 0};
            break;
        case GateKind::Y:
            g.unitary = {0, -kI, kI, 0};
            break;
        case GateKind::Z:
            g.unitary = {1, 0, 0, -1};
            break;
        case GateKind::S:
            g.unitary = {1, 0, 0, kI};
            break;
        case GateKind::T:
            g.unitary = {1, 0, 0, std::polar(1.0, std::numbers::pi / 4)};
            break;
        case GateKind::RX:
            g.unitary = rx(theta);
            g.derivative = std::vector<Amplitude>{-s / 2, -kI * c / 2.0, -kI * c / 2.0, -s / 2};
            break;
        case GateKind::RY:
            g.unitary = {c, -s, s, c};
            g.derivative = std::vector<Amplitude>{-s / 2, -c / 2, c / 2, -s / 2};
            break;
        case GateKind::RZ:
            g.unitary = {std::polar(1.0, -theta / 2), 0, 0, std::polar(1.0, theta / 2)};
            g.derivative =
                std::vector<Amplitude>{-kI / 2.0 * std::polar(1.0, -theta / 2), 0, 0, kI / 2.0 * std::polar(1.0, theta / 2)};
            break;
        case GateKind::RXPi:
            g.unitary = rx(std::numbers::pi);
            break;
        case GateKind::RXHalfPi:
            g.unitary = rx(std::numbers::pi / 2);
            break;
        case GateKind::RXMinusHalfPi:
            g.unitary = rx(-std::numbers::pi / 2);
            break;
        case GateKind::CNOT:
            g.unitary = controlled({0, 1, 1, 0});
            break;
        case GateKind::CZ:
            g.unitary = controlled({1, 0, 0, -1});
            break;
        case GateKind::CY:
            g.unitary = controlled({0, -kI, kI, 0});
            break;
        case GateKind::SWAP:
            g.unitary = identity(4);
            g.unitary[1 * 4 + 1] = 0;
            g.unitary[2 * 4 + 2] = 0;
            g.unitary[1 * 4 + 2] = 1;
            g.unitary[2 * 4 + 1] = 1;
            break;
        case GateKind::CRZ: {
            g.unitary = controlled({std::polar(1.0, -theta / 2), 0, 0, std::polar(1.0, theta / 2)});
            std::vector<Amplitude> d(16, 0.0);
            d[2 * 4 + 2] = -kI / 2.0 * std::polar(1.0, -theta / 2);
            d[3 * 4 + 3] = kI / 2.0 * std::polar(1.0, theta / 2);
            g.derivative = std::move(d);
            break;
        }
        case GateKind::XY: {
            g.unitary = identity(4);
            g.unitary[1 * 4 + 1] = c;
            g.unitary[1 * 4 + 2] = kI * s;
            g.unitary[2 * 4 + 1] = kI * s;
            g.unitary[2 * 4 + 2] = c;
            std::vector<Amplitude> d(16, 0.0);
            d[1 * 4 + 1] = -s / 2;
            d[1 * 4 + 2] = kI * c / 2.0;
            d[2 * 4 + 1] = kI * c / 2.0;
            d[2 * 4 + 2] = -s / 2;
            g.derivative = std::move(d);
            break;
        }
        case GateKind::Toffoli:
            g.unitary = identity(8);
            g.unitary[6 * 8 + 6] = 0;
            g.unitary[7 * 8 + 7] = 0;
            g.unitary[6 * 8 + 7] = 1;
            g.unitary[7 * 8 + 6] = 1;
            break;
        case GateKind::CSWAP:
            g.unitary = identity(8);
            g.unitary[5 * 8 + 5] = 0;
            g.unitary[6 * 8 + 6] = 0;
            g.unitary[5 * 8 + 6] = 1;
            g.unitary[6 * 8 + 5] = 1;
            break;
    }
    return g;
}

void apply_matrix(std::span<Amplitude> state, int n_qubits, std::span<const Amplitude> matrix,
                  std::span<const int> qubits) {
    const int k = static_cast<int>(qubits.size());
    const int dim = 1 << k;
    if (state.size() != (std::size_t{1} << n_qubits) || matrix.size() != static_cast<std::size_t>(dim * dim)) {
        throw InvalidArgument("apply_matrix: dimension mismatch");
    }
    std::array<std::size_t, 8> offsets{};
    std::size_t target_mask = 0;
    for (int l = 0; l < dim; l++) {
        std::size_t off = 0;
        for (int i = 0; i < k; i++) {
            if ((l >> (k - 1 - i)) & 1) {
                off |= std::size_t{1} << (n_qubits - 1 - qubits[i]);
            }
        }
        offsets[l] = off;
    }
    for (int i = 0; i < k; i++) {
        target_mask |= std::size_t{1} << (n_qubits - 1 - qubits[i]);
    }
    std::array<Amplitude, 8> local{};
    for (std::size_t base = 0; base < state.size(); base++) {
        if (base & target_mask) {
            continue;
        }
        for (int l = 0; l < dim; l++) {
            local[l] = state[base | offsets[l]];
        }
        for (int r = 0; r < dim; r++) {
            Amplitude acc = 0;
            const Amplitude *row = matrix.data() + r * dim;
            for (int c = 0; c < dim; c++) {
                acc += row[c] * local[c];
            }
            state[base | offsets[r]] = acc;
        }
    }
}

StateVector apply_circuit(const CircuitDag &dag, std::span<const double> params, StateVector state) {
    if (state.n_qubits != dag.n_qubits()) {
        throw InvalidArgument("state has " + std::to_string(state.n_qubits) + " qubits, circuit has " +
                              std::to_string(dag.n_qubits()));
    }
    if (static_cast<int>(params.size()) != dag.param_count()) {
        throw InvalidArgument("expected " + std::to_string(dag.param_count()) + " parameters, got " +
                              std::to_string(params.size()));
    }
    for (const auto &node : dag.nodes()) {
        if (node.type != NodeType::Gate) {
            continue;
        }
        std::optional<double> angle;
        if (node.op.param_slot) {
            angle = params[*node.op.param_slot];
        }
        GateMatrix g = gate_matrix(node.op.kind, angle);
        apply_matrix(state.amplitudes, state.n_qubits, g.unitary, node.op.qubits);
    }
    return state;
}

// ---------------------------------------------------------------------------
// LHST

LhstProblem::LhstProblem(const CircuitDag &target, std::span<const double> target_params, const CircuitDag &compiled)
    : n_(target.n_qubits()), param_count_(compiled.param_count()) {
    if (compiled.n_qubits() != n_) {
        throw InvalidArgument("target has " + std::to_string(n_) + " qubits, compiled circuit has " +
                              std::to_string(compiled.n_qubits()));
    }
    if (n_ > kMaxLhstQubits) {
        throw InvalidArgument("LHST supports at most " + std::to_string(kMaxLhstQubits) + " qubits");
    }
    const int m = 2 * n_;
    prepared_.assign(std::size_t{1} << m, 0.0);
    const double amp = 1.0 / std::sqrt(static_cast<double>(std::size_t{1} << n_));
    for (std::size_t a = 0; a < (std::size_t{1} << n_); a++) {
        prepared_[(a << n_) | a] = amp;
    }
    StateVector s{m, std::move(prepared_)};
    std::vector<Amplitude> scratch;
    if (static_cast<int>(target_params.size()) != target.param_count()) {
        throw InvalidArgument("expected " + std::to_string(target.param_count()) + " target parameters, got " +
                              std::to_string(target_params.size()));
    }
    for (const auto &node : target.nodes()) {
        if (node.type != NodeType::Gate) {
            continue;
        }
        std::optional<double> angle;
        if (node.op.param_slot) {
            angle = target_params[*node.op.param_slot];
        }
        GateMatrix g = gate_matrix(node.op.kind, angle);
        apply_matrix(s.amplitudes, m, g.unitary, node.op.qubits);
    }
    prepared_ = std::move(s.amplitudes);

    for (const auto &node : compiled.nodes()) {
        if (node.type != NodeType::Gate) {
            continue;
        }
        Step step;
        step.kind = node.op.kind;
        step.slot = node.op.param_slot ? *node.op.param_slot : -1;
        const int k = static_cast<int>(node.op.qubits.size());
        const int dim = 1 << k;
        std::uint32_t gate_bits = 0;
        for (int l = 0; l < dim; l++) {
            std::uint32_t off = 0;
            for (int i = 0; i < k; i++) {
                if ((l >> (k - 1 - i)) & 1) {
                    off |= 1u << (m - 1 - (node.op.qubits[i] + n_));
                }
            }
            step.offsets[l] = off;
            gate_bits |= off;
        }
        for (std::uint32_t base = 0; base < (1u << m); base++) {
            if (!(base & gate_bits)) {
                step.bases.push_back(base);
            }
        }
        if (step.slot < 0) {
            GateMatrix g = gate_matrix(node.op.kind);
            step.fixed.dim = step.fixed_inverse.dim = dim;
            for (int r = 0; r < dim; r++) {
                for (int c = 0; c < dim; c++) {
                    step.fixed.m[r * dim + c] = std::conj(g.at(r, c));
                    step.fixed_inverse.m[c * dim + r] = g.at(r, c);
                }
            }
        }
        steps_.push_back(std::move(step));
    }
}

void LhstProblem::block_for(const Step &step, std::span<const double> params, Block &u, Block &inverse,
                            Block *derivative) const {
    if (step.slot < 0) {
        u = step.fixed;
        inverse = step.fixed_inverse;
        return;
    }
    GateMatrix g = gate_matrix(step.kind, params[step.slot]);
    const int dim = g.dim;
    u.dim = inverse.dim = dim;
    for (int r = 0; r < dim; r++) {
        for (int c = 0; c < dim; c++) {
            u.m[r * dim + c] = std::conj(g.at(r, c));
            inverse.m[c * dim + r] = g.at(r, c);
        }
    }
    if (derivative) {
        derivative->dim = dim;
        for (int i = 0; i < dim * dim; i++) {
            derivative->m[i] = std::conj((*g.derivative)[i]);
        }
    }
}

namespace {

template <int Dim>
void apply_fixed(const std::uint32_t *offsets, std::span<const std::uint32_t> bases, const Amplitude *m,
                 Amplitude *state) {
    Amplitude local[Dim];
    for (std::uint32_t base : bases) {
        for (int l = 0; l < Dim; l++) {
            local[l] = state[base | offsets[l]];
        }
        for (int r = 0; r < Dim; r++) {
            Amplitude acc = 0;
            for (int c = 0; c < Dim; c++) {
                acc += m[r * Dim + c] * local[c];
            }
            state[base | offsets[r]] = acc;
        }
    }
}

template <int Dim>
double overlap_fixed(const std::uint32_t *offsets, std::span<const std::uint32_t> bases, const Amplitude *m,
                     const Amplitude *bra, const Amplitude *ket) {
    double re = 0;
    for (std::uint32_t base : bases) {
        for (int r = 0; r < Dim; r++) {
            Amplitude acc = 0;
            for (int c = 0; c < Dim; c++) {
                acc += m[r * Dim + c] * ket[base | offsets[c]];
            }
            re += (std::conj(bra[base | offsets[r]]) * acc).real();
        }
    }
    return re;
}

}  // namespace

void LhstProblem::apply(const Step &step, const Block &b, std::span<Amplitude> state) {
    switch (b.dim) {
        case 2:
            return apply_fixed<2>(step.offsets.data(), step.bases, b.m.data(), state.data());
        case 4:
            return apply_fixed<4>(step.offsets.data(), step.bases, b.m.data(), state.data());
        default:
            return apply_fixed<8>(step.offsets.data(), step.bases, b.m.data(), state.data());
    }
}

double LhstProblem::overlap(const Step &step, const Block &b, std::span<const Amplitude> bra,
                            std::span<const Amplitude> ket) {
    switch (b.dim) {
        case 2:
            return overlap_fixed<2>(step.offsets.data(), step.bases, b.m.data(), bra.data(), ket.data());
        case 4:
            return overlap_fixed<4>(step.offsets.data(), step.bases, b.m.data(), bra.data(), ket.data());
        default:
            return overlap_fixed<8>(step.offsets.data(), step.bases, b.m.data(), bra.data(), ket.data());
    }
}

double LhstProblem::fidelity_mean(std::span<const Amplitude> state) const {
    const int m = 2 * n_;
    double total = 0;
    for (int j = 0; j < n_; j++) {
        std::size_t a = std::size_t{1} << (m - 1 - j);
        std::size_t b = std::size_t{1} << (m - 1 - (n_ + j));
        double f = 0;
        for (std::size_t base = 0; base < state.size(); base++) {
            if (base & (a | b)) {
                continue;
            }
            f += std::norm(state[base] + state[base | a | b]);
        }
        total += f / 2;
    }
    return total / n_;
}

void LhstProblem::apply_observable(std::span<const Amplitude> in, std::span<Amplitude> out) const {
    const int m = 2 * n_;
    std::fill(out.begin(), out.end(), Amplitude{0.0});
    const double w = 1.0 / (2.0 * n_);
    for (int j = 0; j < n_; j++) {
        std::size_t a = std::size_t{1} << (m - 1 - j);
        std::size_t b = std::size_t{1} << (m - 1 - (n_ + j));
        for (std::size_t base = 0; base < in.size(); base++) {
            if (base & (a | b)) {
                continue;
            }
            Amplitude s = (in[base] + in[base | a | b]) * w;
            out[base] += s;
            out[base | a | b] += s;
        }
    }
}

double LhstProblem::cost(std::span<const double> params) const {
    if (static_cast<int>(params.size()) != param_count_) {
        throw InvalidArgument("expected " + std::to_string(param_count_) + " parameters, got " +
                              std::to_string(params.size()));
    }
    std::vector<Amplitude> psi = prepared_;
    Block u, inv;
    for (const auto &step : steps_) {
        block_for(step, params, u, inv, nullptr);
        apply(step, u, psi);
    }
    return std::clamp(1.0 - fidelity_mean(psi), 0.0, 1.0);
}

double LhstProblem::cost_and_grad(std::span<const double> params, std::span<double> grad) const {
    if (static_cast<int>(params.size()) != param_count_ || grad.size() != params.size()) {
        throw InvalidArgument("expected " + std::to_string(param_count_) + " parameters");
    }
    struct Blocks {
        Block u, inv, du;
    };
    std::vector<Blocks> blocks(steps_.size());
    std::vector<Amplitude> phi = prepared_;
    for (std::size_t k = 0; k < steps_.size(); k++) {
        const Step &step = steps_[k];
        block_for(step, params, blocks[k].u, blocks[k].inv, step.slot >= 0 ? &blocks[k].du : nullptr);
        apply(step, blocks[k].u, phi);
    }
    double cost = std::clamp(1.0 - fidelity_mean(phi), 0.0, 1.0);

    std::vector<Amplitude> lam(phi.size());
    apply_observable(phi, lam);
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t k = steps_.size(); k-- > 0;) {
        const Step &step = steps_[k];
        apply(step, blocks[k].inv, phi);
        if (step.slot >= 0) {
            grad[step.slot] += -2.0 * overlap(step, blocks[k].du, lam, phi);
        }
        apply(step, blocks[k].inv, lam);
    }
    return cost;
}

double lhst_cost(const CircuitDag &target, std::span<const double> target_params, const CircuitDag &compiled,
                 std::span<const double> compiled_params) {
    return LhstProblem(target, target_params, compiled).cost(compiled_params);
}

std::vector<double> lhst_grad(const CircuitDag &target, std::span<const double> target_params,
                              const CircuitDag &compiled, std::span<const double> compiled_params) {
    LhstProblem problem(target, target_params, compiled);
    std::vector<double> grad(compiled_params.size());
    problem.cost_and_grad(compiled_params, grad);
    return grad;
}

}  // namespace qcgen
