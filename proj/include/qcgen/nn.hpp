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

#ifndef QCGEN_NN_HPP
#define QCGEN_NN_HPP

#include <random>
#include <string>

#include "qcgen/autodiff.hpp"

namespace qcgen::nn {

/// y = W x (+ b). Weights are owned by a ParamStore.
struct Linear {
    Parameter *weight = nullptr;
    Parameter *bias = nullptr;

    static Linear create(ParamStore &store, const std::string &name, int in, int out, bool with_bias,
                         std::mt19937_64 &rng);
    static Linear bind(ParamStore &store, const std::string &name, bool with_bias);

    Var operator()(Var x) const;
    int in_dim() const { return static_cast<int>(weight->value.cols()); }
    int out_dim() const { return static_cast<int>(weight->value.rows()); }
};

/// Gated recurrent unit:
///   z  = sigmoid(W_z x + U_z h + b_z)
///   r  = sigmoid(W_r x + U_r h + b_r)
///   h~ = tanh(W_h x + U_h (r * h) + b_h)
///   h' = (1 - z) * h + z * h~
struct GruCell {
    Parameter *w_z, *u_z, *b_z;
    Parameter *w_r, *u_r, *b_r;
    Parameter *w_h, *u_h, *b_h;

    static GruCell create(ParamStore &store, const std::string &name, int input_dim, int hidden_dim,
                          std::mt19937_64 &rng);
    static GruCell bind(ParamStore &store, const std::string &name);

    Var operator()(Var x, Var h) const;
    /// Same cell with x given as the one-hot index `x_index`.
    Var step_onehot(Tape &tape, int x_index, Var h) const;

    int input_dim() const { return static_cast<int>(w_z->value.cols()); }
    int hidden_dim() const { return static_cast<int>(u_z->value.rows()); }

   private:
    Var finish(Var wz_x, Var wr_x, Var wh_x, Var h) const;
};

}  // namespace qcgen::nn

#endif  // QCGEN_NN_HPP
