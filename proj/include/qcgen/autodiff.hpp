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

#ifndef QCGEN_AUTODIFF_HPP
#define QCGEN_AUTODIFF_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace qcgen::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A named trainable tensor. Vectors are stored as n x 1 matrices.
struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;

    std::vector<std::size_t> shape() const;
};

/// Named parameters in insertion order. Addresses are stable for the lifetime
/// of the store.
class ParamStore {
   public:
    ParamStore() = default;
    ParamStore(const ParamStore &other);
    ParamStore &operator=(const ParamStore &other);
    ParamStore(ParamStore &&) = default;
    ParamStore &operator=(ParamStore &&) = default;

    /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
    Parameter &add(const std::string &name, std::size_t rows, std::size_t cols, std::size_t fan_in,
                   std::mt19937_64 &rng);
    Parameter &add_zero(const std::string &name, std::size_t rows, std::size_t cols);

    Parameter &at(const std::string &name);
    const Parameter &at(const std::string &name) const;
    bool contains(const std::string &name) const { return index_.count(name) > 0; }

    std::size_t size() const { return params_.size(); }
    Parameter &operator[](std::size_t i) { return *params_[i]; }
    const Parameter &operator[](std::size_t i) const { return *params_[i]; }
    std::size_t total_elements() const;

    void zero_grad();

    /// Binary container: magic, format version, JSON metadata, then per tensor
    /// name, shape and row-major float64 values.
    void save(const std::string &path, const nlohmann::json &metadata = {}) const;
    std::string serialize(const nlohmann::json &metadata = {}) const;
    /// Overwrites values of existing parameters. Throws CheckpointMismatch when
    /// names or shapes differ and CorruptDataError on a damaged file.
    nlohmann::json load(const std::string &path);
    nlohmann::json deserialize(const std::string &bytes);

    static constexpr std::uint32_t kFormatVersion = 1;

   private:
    std::vector<std::unique_ptr<Parameter>> params_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Reads only the metadata block of a checkpoint file.
nlohmann::json read_checkpoint_metadata(const std::string &path);

class Tape;

/// Handle to a vector-valued node on a Tape.
struct Var {
    Tape *tape = nullptr;
    int id = -1;

    const Vector &value() const;
    const Vector &grad() const;
    double scalar() const { return value()(0); }
    Eigen::Index size() const { return value().size(); }
};

/// Reverse-mode autodiff over vector-valued nodes.
///
/// Parameters enter through linear(), column() and param(); their gradients are
/// accumulated into Parameter::grad by backward(). A tape can be backpropagated
/// once; a second call throws.
class Tape {
   public:
    Tape() = default;
    Tape(const Tape &) = delete;
    Tape &operator=(const Tape &) = delete;

    Var constant(Vector value);
    Var param(Parameter &p);

    /// Seeds d(root)/d(root) = 1 for a scalar root and runs the reverse sweep.
    void backward(Var root);
    bool backpropagated() const { return done_; }
    std::size_t node_count() const { return nodes_.size(); }

   private:
    friend struct Var;
    friend class TapeOps;

    struct Node {
        Vector value;
        Vector grad;
        std::function<void(Tape &, int)> back;
    };

    Var push(Vector value, std::function<void(Tape &, int)> back);
    Vector &grad_of(int id);

    std::vector<Node> nodes_;
    bool done_ = false;
};

// Differentiable operations. All operands must live on the same tape.

/// W x (+ b)
Var linear(Parameter &w, Var x);
Var linear(Parameter &w, Parameter &b, Var x);
/// W e_index, i.e. W times a one-hot vector.
Var column(Tape &tape, Parameter &w, int index);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
/// 1 - a
Var one_minus(Var a);
Var concat(std::span<const Var> parts);
Var concat(Var a, Var b);
Var slice(Var a, Eigen::Index start, Eigen::Index length);
Var sum(Var a);
/// Sum of equally sized vectors; `parts` must be nonempty.
Var add_n(std::span<const Var> parts);

Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var exp(Var a);
Var softmax(Var a);

/// -log softmax(logits)[target]. With a mask, entries marked false are removed
/// from the normalization; the target must be permitted.
Var softmax_cross_entropy(Var logits, int target, const std::vector<bool> *mask = nullptr);
/// 1/2 sum(mu^2 + sigma^2 - 1 - 2 log sigma). Throws on sigma <= 0.
Var kl_standard_normal(Var mu, Var sigma);
/// (a - target)^2 for a one-element `a`.
Var squared_error(Var a, double target);

/// Non-differentiable helpers shared with sampling code.
Vector softmax_values(const Vector &logits, const std::vector<bool> *mask = nullptr);
double kl_standard_normal(const Vector &mu, const Vector &sigma);

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adam with bias correction over every parameter of a store.
class Adam {
   public:
    Adam(ParamStore &params, AdamConfig config = {});

    /// Applies one update from the current Parameter::grad values and zeroes them.
    void step();
    std::int64_t steps() const { return step_; }
    const AdamConfig &config() const { return config_; }

   private:
    ParamStore *params_;
    AdamConfig config_;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    std::int64_t step_ = 0;
};

}  // namespace qcgen::nn

#endif  // QCGEN_AUTODIFF_HPP
