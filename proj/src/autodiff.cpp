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

#include "qcgen/autodiff.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "qcgen/error.hpp"

namespace qcgen::nn {

namespace {

void require_same_tape(Var a, Var b) {
    if (a.tape == nullptr || a.tape != b.tape) {
        throw InvalidArgument("operands live on different tapes");
    }
}

void require_same_size(Var a, Var b, const char *op) {
    require_same_tape(a, b);
    if (a.size() != b.size()) {
        throw InvalidArgument(std::string(op) + ": shape mismatch " + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()));
    }
}

}  // namespace

class TapeOps {
   public:
    static Var push(Tape &t, Vector value, std::function<void(Tape &, int)> back) {
        return t.push(std::move(value), std::move(back));
    }
    static Vector &grad(Tape &t, int id) { return t.grad_of(id); }
    static const Vector &own_grad(Tape &t, int id) { return t.nodes_[id].grad; }
    static const Vector &value(Tape &t, int id) { return t.nodes_[id].value; }
};

// ---------------------------------------------------------------------------
// Parameter / ParamStore

std::vector<std::size_t> Parameter::shape() const {
    if (value.cols() == 1) {
        return {static_cast<std::size_t>(value.rows())};
    }
    return {static_cast<std::size_t>(value.rows()), static_cast<std::size_t>(value.cols())};
}

ParamStore::ParamStore(const ParamStore &other) {
    *this = other;
}

ParamStore &ParamStore::operator=(const ParamStore &other) {
    if (this == &other) {
        return *this;
    }
    params_.clear();
    index_ = other.index_;
    for (const auto &p : other.params_) {
        params_.push_back(std::make_unique<Parameter>(*p));
    }
    return *this;
}

Parameter &ParamStore::add(const std::string &name, std::size_t rows, std::size_t cols, std::size_t fan_in,
                           std::mt19937_64 &rng) {
    Parameter &p = add_zero(name, rows, cols);
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    // Row-major fill so the draw order matches the serialized layout.
    for (std::size_t r = 0; r < rows; r++) {
        for (std::size_t c = 0; c < cols; c++) {
            p.value(r, c) = dist(rng);
        }
    }
    return p;
}

Parameter &ParamStore::add_zero(const std::string &name, std::size_t rows, std::size_t cols) {
    if (index_.count(name)) {
        throw InvalidArgument("duplicate parameter name '" + name + "'");
    }
    auto p = std::make_unique<Parameter>();
    p->name = name;
    p->value = Matrix::Zero(rows, cols);
    p->grad = Matrix::Zero(rows, cols);
    index_[name] = params_.size();
    params_.push_back(std::move(p));
    return *params_.back();
}

Parameter &ParamStore::at(const std::string &name) {
    auto it = index_.find(name);
    if (it == index_.end()) {
        throw InvalidArgument("no parameter named '" + name + "'");
    }
    return *params_[it->second];
}

const Parameter &ParamStore::at(const std::string &name) const {
    return const_cast<ParamStore *>(this)->at(name);
}

std::size_t ParamStore::total_elements() const {
    std::size_t n = 0;
    for (const auto &p : params_) {
        n += static_cast<std::size_t>(p->value.size());
    }
    return n;
}

void ParamStore::zero_grad() {
    for (auto &p : params_) {
        p->grad.setZero();
    }
}

namespace {

constexpr char kMagic[8] = {'Q', 'C', 'G', 'N', 'C', 'K', 'P', 'T'};

template <typename T>
void put(std::string &out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

class Reader {
   public:
    explicit Reader(const std::string &bytes) : bytes_(bytes) {}

    template <typename T>
    T get() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    std::string get_string(std::size_t n) {
        need(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

   private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size()) {
            throw CorruptDataError("checkpoint is truncated");
        }
    }
    const std::string &bytes_;
    std::size_t pos_ = 0;
};

nlohmann::json read_header(Reader &r) {
    if (r.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
        throw CorruptDataError("not a qcgen checkpoint");
    }
    auto version = r.get<std::uint32_t>();
    if (version != ParamStore::kFormatVersion) {
        throw CorruptDataError("unsupported checkpoint version " + std::to_string(version));
    }
    auto meta_len = r.get<std::uint64_t>();
    try {
        return nlohmann::json::parse(r.get_string(meta_len));
    } catch (const nlohmann::json::parse_error &e) {
        throw CorruptDataError(std::string("checkpoint metadata: ") + e.what());
    }
}

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingFileError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string ParamStore::serialize(const nlohmann::json &metadata) const {
    std::string out(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kFormatVersion);
    std::string meta = metadata.is_null() ? "{}" : metadata.dump();
    put<std::uint64_t>(out, meta.size());
    out += meta;
    put<std::uint64_t>(out, params_.size());
    for (const auto &p : params_) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(p->name.size()));
        out += p->name;
        auto shape = p->shape();
        put<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
        for (auto d : shape) {
            put<std::uint64_t>(out, d);
        }
        for (Eigen::Index r = 0; r < p->value.rows(); r++) {
            for (Eigen::Index c = 0; c < p->value.cols(); c++) {
                put<double>(out, p->value(r, c));
            }
        }
    }
    return out;
}

void ParamStore::save(const std::string &path, const nlohmann::json &metadata) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::ios_base::failure("cannot write '" + path + "'");
    }
    std::string bytes = serialize(metadata);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

nlohmann::json ParamStore::deserialize(const std::string &bytes) {
    Reader r(bytes);
    nlohmann::json meta = read_header(r);
    auto count = r.get<std::uint64_t>();
    if (count != params_.size()) {
        throw CheckpointMismatch("checkpoint holds " + std::to_string(count) + " tensors, model has " +
                                 std::to_string(params_.size()));
    }
    // Parse everything before touching the model so a bad file leaves it intact.
    std::vector<Matrix> values;
    for (std::size_t i = 0; i < count; i++) {
        auto name_len = r.get<std::uint32_t>();
        std::string name = r.get_string(name_len);
        const Parameter &p = *params_[i];
        if (name != p.name) {
            throw CheckpointMismatch("tensor " + std::to_string(i) + " is '" + name + "', expected '" + p.name + "'");
        }
        auto ndim = r.get<std::uint32_t>();
        std::vector<std::size_t> shape;
        for (std::uint32_t d = 0; d < ndim; d++) {
            shape.push_back(r.get<std::uint64_t>());
        }
        if (shape != p.shape()) {
            throw CheckpointMismatch("tensor '" + name + "' has a different shape");
        }
        Matrix m(p.value.rows(), p.value.cols());
        for (Eigen::Index row = 0; row < m.rows(); row++) {
            for (Eigen::Index col = 0; col < m.cols(); col++) {
                m(row, col) = r.get<double>();
            }
        }
        values.push_back(std::move(m));
    }
    if (!r.at_end()) {
        throw CorruptDataError("trailing bytes after the last tensor");
    }
    for (std::size_t i = 0; i < count; i++) {
        params_[i]->value = std::move(values[i]);
        params_[i]->grad.setZero();
    }
    return meta;
}

nlohmann::json ParamStore::load(const std::string &path) {
    return deserialize(read_file(path));
}

nlohmann::json read_checkpoint_metadata(const std::string &path) {
    std::string bytes = read_file(path);
    Reader r(bytes);
    return read_header(r);
}

// ---------------------------------------------------------------------------
// Tape

const Vector &Var::value() const {
    return TapeOps::value(*tape, id);
}

const Vector &Var::grad() const {
    return tape->grad_of(id);
}

Var Tape::push(Vector value, std::function<void(Tape &, int)> back) {
    if (done_) {
        throw InvalidArgument("tape has already been backpropagated");
    }
    nodes_.push_back(Node{std::move(value), Vector(), std::move(back)});
    return Var{this, static_cast<int>(nodes_.size()) - 1};
}

Vector &Tape::grad_of(int id) {
    Node &n = nodes_[id];
    if (n.grad.size() != n.value.size()) {
        n.grad = Vector::Zero(n.value.size());
    }
    return n.grad;
}

Var Tape::constant(Vector value) {
    return push(std::move(value), nullptr);
}

Var Tape::param(Parameter &p) {
    if (p.value.cols() != 1) {
        throw InvalidArgument("param(): '" + p.name + "' is not a vector");
    }
    Parameter *pp = &p;
    return push(p.value.col(0), [pp](Tape &t, int id) { pp->grad.col(0) += t.nodes_[id].grad; });
}

void Tape::backward(Var root) {
    if (root.tape != this) {
        throw InvalidArgument("root belongs to another tape");
    }
    if (done_) {
        throw InvalidArgument("backward() called twice on the same tape");
    }
    if (nodes_[root.id].value.size() != 1) {
        throw InvalidArgument("backward() needs a scalar root");
    }
    grad_of(root.id)(0) += 1.0;
    for (int i = root.id; i >= 0; i--) {
        Node &n = nodes_[i];
        if (n.back && n.grad.size() == n.value.size()) {
            n.back(*this, i);
        }
    }
    done_ = true;
}

// ---------------------------------------------------------------------------
// Operations

Var linear(Parameter &w, Var x) {
    if (w.value.cols() != x.size()) {
        throw InvalidArgument("linear '" + w.name + "': expects input of size " + std::to_string(w.value.cols()) +
                              ", got " + std::to_string(x.size()));
    }
    Parameter *pw = &w;
    int xi = x.id;
    return TapeOps::push(*x.tape, w.value * x.value(), [pw, xi](Tape &t, int id) {
        const Vector &g = TapeOps::own_grad(t, id);
        pw->grad.noalias() += g * TapeOps::value(t, xi).transpose();
        TapeOps::grad(t, xi).noalias() += pw->value.transpose() * g;
    });
}

Var linear(Parameter &w, Parameter &b, Var x) {
    if (w.value.cols() != x.size() || b.value.rows() != w.value.rows() || b.value.cols() != 1) {
        throw InvalidArgument("linear '" + w.name + "': shape mismatch");
    }
    Parameter *pw = &w;
    Parameter *pb = &b;
    int xi = x.id;
    Vector out = b.value.col(0);
    out.noalias() += w.value * x.value();
    return TapeOps::push(*x.tape, std::move(out), [pw, pb, xi](Tape &t, int id) {
        const Vector &g = TapeOps::own_grad(t, id);
        pw->grad.noalias() += g * TapeOps::value(t, xi).transpose();
        pb->grad.col(0) += g;
        TapeOps::grad(t, xi).noalias() += pw->value.transpose() * g;
    });
}

Var column(Tape &tape, Parameter &w, int index) {
    if (index < 0 || index >= w.value.cols()) {
        throw InvalidArgument("column " + std::to_string(index) + " out of range for '" + w.name + "'");
    }
    Parameter *pw = &w;
    return TapeOps::push(tape, w.value.col(index),
                         [pw, index](Tape &t, int id) { pw->grad.col(index) += TapeOps::own_grad(t, id); });
}

Var add(Var a, Var b) {
    require_same_size(a, b, "add");
    int ai = a.id, bi = b.id;
    return TapeOps::push(*a.tape, a.value() + b.value(), [ai, bi](Tape &t, int id) {
        const Vector &g = TapeOps::own_grad(t, id);
        TapeOps::grad(t, ai) += g;
        TapeOps::grad(t, bi) += g;
    });
}

Var sub(Var a, Var b) {
    require_same_size(a, b, "sub");
    int ai = a.id, bi = b.id;
    return TapeOps::push(*a.tape, a.value() - b.value(), [ai, bi](Tape &t, int id) {
        const Vector &g = TapeOps::own_grad(t, id);
        TapeOps::grad(t, ai) += g;
        TapeOps::grad(t, bi) -= g;
    });
}

Var mul(Var a, Var b) {
    require_same_size(a, b, "mul");
    int ai = a.id, bi = b.id;
    return TapeOps::push(*a.tape, a.value().cwiseProduct(b.value()), [ai, bi](Tape &t, int id) {
        const Vector &g = TapeOps::own_grad(t, id);
        TapeOps::grad(t, ai) += g.cwiseProduct(TapeOps::value(t, bi));
        TapeOps::grad(t, bi) += g.cwiseProduct(TapeOps::value(t, ai));
    });
}

Var scale(Var a, double s) {
    int ai = a.id;
    return TapeOps::push(*a.tape, a.value() * s,
                         [ai, s](Tape &t, int id) { TapeOps::grad(t, ai) += TapeOps::own_grad(t, id) * s; });
}

Var one_minus(Var a) {
    int ai = a.id;
    return TapeOps::push(*a.tape, (1.0 - a.value().array()).matrix(),
                         [ai](Tape &t, int id) { TapeOps::grad(t, ai) -= TapeOps::own_grad(t, id); });
}

Var concat(std::span<const Var> parts) {
    if (parts.empty()) {
        throw InvalidArgument("concat of nothing");
    }
    Eigen::Index total = 0;
    for (const auto &p : parts) {
        require_same_tape(parts[0], p);
        total += p.size();
    }
    Vector out(total);
    std::vector<std::pair<int, Eigen::Index>> layout;
    Eigen::Index off = 0;
    for (const auto &p : parts) {
        out.segment(off, p.size()) = p.value();
        layout.emplace_back(p.id, off);
        off += p.size();
    }
    return TapeOps::push(*parts[0].tape, std::move(out), [layout](Tape &t, int id) {
        const Vector &g = TapeOps::own_grad(t, id);
        for (auto [pid, o] : layout) {
            Vector &pg = TapeOps::grad(t, pid);
            pg += g.segment(o, pg.size());
        }
    });
}

Var concat(Var a, Var b) {
    Var parts[2] = {a, b};
    return concat(parts);
}

Var slice(Var a, Eigen::Index start, Eigen::Index length) {
    if (start < 0 || length < 0 || start + length > a.size()) {
        throw InvalidArgument("slice out of range");
    }
    int ai = a.id;
    return TapeOps::push(*a.tape, a.value().segment(start, length), [ai, start, length](Tape &t, int id) {
        TapeOps::grad(t, ai).segment(start, length) += TapeOps::own_grad(t, id);
    });
}

Var sum(Var a) {
    int ai = a.id;
    Vector out(1);
    out(0) = a.value().sum();
    return TapeOps::push(*a.tape, std::move(out),
                         [ai](Tape &t, int id) { TapeOps::grad(t, ai).array() += TapeOps::own_grad(t, id)(0); });
}

Var add_n(std::span<const Var> parts) {
    if (parts.empty()) {
        throw InvalidArgument("add_n of nothing");
    }
    Vector out = parts[0].value();
    std::vector<int> ids{parts[0].id};
    for (std::size_t i = 1; i < parts.size(); i++) {
        require_same_size(parts[0], parts[i], "add_n");
        out += parts[i].value();
        ids.push_back(parts[i].id);
    }
    return TapeOps::push(*parts[0].tape, std::move(out), [ids](Tape &t, int id) {
        const Vector &g = TapeOps::own_grad(t, id);
        for (int i : ids) {
            TapeOps::grad(t, i) += g;
        }
    });
}

Var sigmoid(Var a) {
    int ai = a.id;
    Vector out = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
    return TapeOps::push(*a.tape, std::move(out), [ai](Tape &t, int id) {
        const Vector &y = TapeOps::value(t, id);
        TapeOps::grad(t, ai).array() += TapeOps::own_grad(t, id).array() * y.array() * (1.0 - y.array());
    });
}

Var tanh(Var a) {
    int ai = a.id;
    Vector out = a.value().array().tanh().matrix();
    return TapeOps::push(*a.tape, std::move(out), [ai](Tape &t, int id) {
        const Vector &y = TapeOps::value(t, id);
        TapeOps::grad(t, ai).array() += TapeOps::own_grad(t, id).array() * (1.0 - y.array().square());
    });
}

Var relu(Var a) {
    int ai = a.id;
    Vector out = a.value().cwiseMax(0.0);
    return TapeOps::push(*a.tape, std::move(out), [ai](Tape &t, int id) {
        const Vector &x = TapeOps::value(t, ai);
        const Vector &g = TapeOps::own_grad(t, id);
        Vector &ag = TapeOps::grad(t, ai);
        for (Eigen::Index i = 0; i < x.size(); i++) {
            if (x(i) > 0) {
                ag(i) += g(i);
            }
        }
    });
}

Var exp(Var a) {
    int ai = a.id;
    Vector out = a.value().array().exp().matrix();
    return TapeOps::push(*a.tape, std::move(out), [ai](Tape &t, int id) {
        TapeOps::grad(t, ai).array() += TapeOps::own_grad(t, id).array() * TapeOps::value(t, id).array();
    });
}

Vector softmax_values(const Vector &logits, const std::vector<bool> *mask) {
    if (mask && static_cast<Eigen::Index>(mask->size()) != logits.size()) {
        throw InvalidArgument("mask size does not match logits");
    }
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < logits.size(); i++) {
        if (!mask || (*mask)[i]) {
            top = std::max(top, logits(i));
        }
    }
    if (!std::isfinite(top)) {
        throw InvalidArgument("softmax over an empty support");
    }
    Vector p = Vector::Zero(logits.size());
    double total = 0;
    for (Eigen::Index i = 0; i < logits.size(); i++) {
        if (!mask || (*mask)[i]) {
            p(i) = std::exp(logits(i) - top);
            total += p(i);
        }
    }
    return p / total;
}

Var softmax(Var a) {
    int ai = a.id;
    return TapeOps::push(*a.tape, softmax_values(a.value()), [ai](Tape &t, int id) {
        const Vector &s = TapeOps::value(t, id);
        const Vector &g = TapeOps::own_grad(t, id);
        double dot = g.dot(s);
        TapeOps::grad(t, ai).array() += s.array() * (g.array() - dot);
    });
}

Var softmax_cross_entropy(Var logits, int target, const std::vector<bool> *mask) {
    const Vector &z = logits.value();
    if (target < 0 || target >= z.size()) {
        throw InvalidArgument("cross-entropy target " + std::to_string(target) + " out of range");
    }
    if (mask && !(*mask)[target]) {
        throw InvalidArgument("cross-entropy target " + std::to_string(target) + " is masked out");
    }
    double top = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < z.size(); i++) {
        if (!mask || (*mask)[i]) {
            top = std::max(top, z(i));
        }
    }
    double total = 0;
    for (Eigen::Index i = 0; i < z.size(); i++) {
        if (!mask || (*mask)[i]) {
            total += std::exp(z(i) - top);
        }
    }
    Vector out(1);
    out(0) = -(z(target) - top - std::log(total));
    std::vector<bool> m = mask ? *mask : std::vector<bool>();
    int li = logits.id;
    return TapeOps::push(*logits.tape, std::move(out), [li, target, m](Tape &t, int id) {
        double g = TapeOps::own_grad(t, id)(0);
        Vector p = softmax_values(TapeOps::value(t, li), m.empty() ? nullptr : &m);
        p(target) -= 1.0;
        TapeOps::grad(t, li) += g * p;
    });
}

double kl_standard_normal(const Vector &mu, const Vector &sigma) {
    if (mu.size() != sigma.size()) {
        throw InvalidArgument("kl: mu and sigma differ in size");
    }
    if ((sigma.array() <= 0).any()) {
        throw InvalidArgument("kl: sigma must be positive");
    }
    return 0.5 * (mu.array().square() + sigma.array().square() - 1.0 - 2.0 * sigma.array().log()).sum();
}

Var kl_standard_normal(Var mu, Var sigma) {
    require_same_size(mu, sigma, "kl");
    Vector out(1);
    out(0) = kl_standard_normal(mu.value(), sigma.value());
    int mi = mu.id, si = sigma.id;
    return TapeOps::push(*mu.tape, std::move(out), [mi, si](Tape &t, int id) {
        double g = TapeOps::own_grad(t, id)(0);
        const Vector &m = TapeOps::value(t, mi);
        const Vector &s = TapeOps::value(t, si);
        TapeOps::grad(t, mi) += g * m;
        TapeOps::grad(t, si).array() += g * (s.array() - 1.0 / s.array());
    });
}

Var squared_error(Var a, double target) {
    if (a.size() != 1) {
        throw InvalidArgument("squared_error expects a scalar");
    }
    int ai = a.id;
    Vector out(1);
    double d = a.scalar() - target;
    out(0) = d * d;
    return TapeOps::push(*a.tape, std::move(out),
                         [ai, d](Tape &t, int id) { TapeOps::grad(t, ai)(0) += 2.0 * d * TapeOps::own_grad(t, id)(0); });
}

// ---------------------------------------------------------------------------
// Adam

Adam::Adam(ParamStore &params, AdamConfig config) : params_(&params), config_(config) {
    for (std::size_t i = 0; i < params.size(); i++) {
        m_.push_back(Matrix::Zero(params[i].value.rows(), params[i].value.cols()));
        v_.push_back(Matrix::Zero(params[i].value.rows(), params[i].value.cols()));
    }
}

void Adam::step() {
    if (m_.size() != params_->size()) {
        throw InvalidArgument("parameter store changed after Adam was created");
    }
    step_++;
    const double b1 = config_.beta1, b2 = config_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
    for (std::size_t i = 0; i < params_->size(); i++) {
        Parameter &p = (*params_)[i];
        if (p.grad.rows() != p.value.rows() || p.grad.cols() != p.value.cols()) {
            throw InvalidArgument("gradient shape mismatch for '" + p.name + "'");
        }
        m_[i] = b1 * m_[i] + (1.0 - b1) * p.grad;
        v_[i] = b2 * v_[i] + (1.0 - b2) * p.grad.cwiseProduct(p.grad);
        p.value.array() -=
            config_.learning_rate * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.epsilon);
        p.grad.setZero();
    }
}

}  // namespace qcgen::nn
