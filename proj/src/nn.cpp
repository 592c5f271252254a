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

#include "qcgen/nn.hpp"

namespace qcgen::nn {

Linear Linear::create(ParamStore &store, const std::string &name, int in, int out, bool with_bias,
                      std::mt19937_64 &rng) {
    Linear l;
    l.weight = &store.add(name + ".weight", out, in, in, rng);
    if (with_bias) {
        l.bias = &store.add(name + ".bias", out, 1, in, rng);
    }
    return l;
}

Linear Linear::bind(ParamStore &store, const std::string &name, bool with_bias) {
    Linear l;
    l.weight = &store.at(name + ".weight");
    if (with_bias) {
        l.bias = &store.at(name + ".bias");
    }
    return l;
}

Var Linear::operator()(Var x) const {
    return bias ? linear(*weight, *bias, x) : linear(*weight, x);
}

GruCell GruCell::create(ParamStore &store, const std::string &name, int input_dim, int hidden_dim,
                        std::mt19937_64 &rng) {
    // PyTorch-style: every block uses fan_in = hidden_dim.
    auto make = [&](const char *suffix, int rows, int cols) {
        return &store.add(name + "." + suffix, rows, cols, hidden_dim, rng);
    };
    GruCell g;
    g.w_z = make("w_z", hidden_dim, input_dim);
    g.u_z = make("u_z", hidden_dim, hidden_dim);
    g.b_z = make("b_z", hidden_dim, 1);
    g.w_r = make("w_r", hidden_dim, input_dim);
    g.u_r = make("u_r", hidden_dim, hidden_dim);
    g.b_r = make("b_r", hidden_dim, 1);
    g.w_h = make("w_h", hidden_dim, input_dim);
    g.u_h = make("u_h", hidden_dim, hidden_dim);
    g.b_h = make("b_h", hidden_dim, 1);
    return g;
}

GruCell GruCell::bind(ParamStore &store, const std::string &name) {
    auto at = [&](const char *suffix) { return &store.at(name + "." + suffix); };
    return GruCell{at("w_z"), at("u_z"), at("b_z"), at("w_r"), at("u_r"), at("b_r"), at("w_h"), at("u_h"), at("b_h")};
}

Var GruCell::finish(Var wz_x, Var wr_x, Var wh_x, Var h) const {
    Var z = sigmoid(add(wz_x, linear(*u_z, *b_z, h)));
    Var r = sigmoid(add(wr_x, linear(*u_r, *b_r, h)));
    Var cand = tanh(add(wh_x, linear(*u_h, *b_h, mul(r, h))));
    return add(mul(one_minus(z), h), mul(z, cand));
}

Var GruCell::operator()(Var x, Var h) const {
    return finish(linear(*w_z, x), linear(*w_r, x), linear(*w_h, x), h);
}

Var GruCell::step_onehot(Tape &tape, int x_index, Var h) const {
    return finish(column(tape, *w_z, x_index), column(tape, *w_r, x_index), column(tape, *w_h, x_index), h);
}

}  // namespace qcgen::nn
