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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcgen/circuit_io.hpp"
#include "qcgen/compiler.hpp"
#include "qcgen/dataset.hpp"
#include "qcgen/error.hpp"
#include "qcgen/finetune.hpp"
#include "qcgen/simulator.hpp"

namespace py = pybind11;
using namespace qcgen;

namespace {

using GateSpec = std::tuple<std::string, std::vector<int>>;

CircuitDag build_circuit(int n_qubits, const std::vector<GateSpec> &gates, std::vector<double> params) {
    std::vector<GateOp> ops;
    for (const auto &[name, qubits] : gates) ops.push_back({gate_kind_from_name(name), qubits, std::nullopt});
    return CircuitDag::build(n_qubits, ops, std::move(params));
}

py::list gate_list(const CircuitDag &dag) {
    py::list out;
    for (const GateOp &op : dag.gates()) {
        py::object slot = op.param_slot ? py::object(py::int_(*op.param_slot)) : py::object(py::none());
        out.append(py::make_tuple(std::string(gate_info(op.kind).name), op.qubits, slot));
    }
    return out;
}

FineTuneConfig finetune_config(int max_steps, double lr, int restarts, double tolerance, std::uint64_t seed) {
    FineTuneConfig cfg;
    cfg.max_steps = max_steps;
    cfg.learning_rate = lr;
    cfg.restarts = restarts;
    cfg.tolerance = tolerance;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "qcgen core: circuits, LHST cost, fine-tuning, generator and predictor";

    py::register_exception<MissingFileError>(m, "MissingFileError", PyExc_FileNotFoundError);
    py::register_exception<CorruptDataError>(m, "CorruptDataError", PyExc_ValueError);
    py::register_exception<CheckpointMismatch>(m, "CheckpointMismatch", PyExc_ValueError);
    py::register_exception<VocabularyMismatch>(m, "VocabularyMismatch", PyExc_ValueError);
    py::register_exception<UndefinedCorrelation>(m, "UndefinedCorrelation", PyExc_ValueError);

    py::class_<CircuitDag>(m, "Circuit")
        .def(py::init(&build_circuit), py::arg("n_qubits"), py::arg("gates"),
             py::arg("params") = std::vector<double>{},
             "Gates are (name, qubits) pairs; parameterized gates take angles from params in order.")
        .def_static("from_json", [](const std::string &text) { return deserialize_circuit(text); })
        .def("to_json", &serialize_circuit)
        .def_property_readonly("n_qubits", &CircuitDag::n_qubits)
        .def_property_readonly("length", [](const CircuitDag &d) { return circuit_metrics(d).length; })
        .def_property_readonly("depth", [](const CircuitDag &d) { return circuit_metrics(d).depth; })
        .def_property_readonly("key", &canonical_key)
        .def_property_readonly("gates", &gate_list)
        .def_property("params", &CircuitDag::params, &CircuitDag::set_params)
        .def_property_readonly("edges", &CircuitDag::edges)
        .def("__eq__", [](const CircuitDag &a, const CircuitDag &b) { return a == b; })
        .def("__repr__", [](const CircuitDag &d) { return "Circuit(" + serialize_circuit(d) + ")"; });

    m.def("lhst_cost",
          [](const CircuitDag &target, const CircuitDag &compiled) {
              return lhst_cost(target, target.params(), compiled, compiled.params());
          },
          py::arg("target"), py::arg("compiled"), "LHST cost using each circuit's own angles.");
    m.def("lhst_grad",
          [](const CircuitDag &target, const CircuitDag &compiled) {
              return lhst_grad(target, target.params(), compiled, compiled.params());
          },
          py::arg("target"), py::arg("compiled"));

    m.def("fine_tune",
          [](const CircuitDag &compiled, const CircuitDag &target, int max_steps, double lr, int restarts,
             double tolerance, std::uint64_t seed) {
              FineTuneResult r;
              {
                  py::gil_scoped_release release;
                  r = fine_tune(compiled, target, finetune_config(max_steps, lr, restarts, tolerance, seed));
              }
              py::dict out;
              out["params"] = r.params;
              out["loss"] = r.loss;
              out["steps"] = r.steps;
              out["best_restart"] = r.best_restart;
              return out;
          },
          py::arg("compiled"), py::arg("target"), py::arg("max_steps") = 200, py::arg("lr") = 0.05,
          py::arg("restarts") = 3, py::arg("tolerance") = 1e-7, py::arg("seed") = 0);

    m.def("random_target",
          [](std::uint64_t seed, int length, int n_qubits) {
              Rng rng(seed);
              return gen_random_target(rng, length, n_qubits);
          },
          py::arg("seed"), py::arg("length"), py::arg("n_qubits") = 3);
    m.def("random_structure",
          [](std::uint64_t seed, int length, int n_qubits, const std::string &connectivity) {
              Rng rng(seed);
              Connectivity conn = Connectivity::from_name(connectivity, n_qubits);
              return random_structure(rng, length, n_qubits, &conn);
          },
          py::arg("seed"), py::arg("length"), py::arg("n_qubits") = 3, py::arg("connectivity") = "full");
    m.def("oracle_compile",
          [](const CircuitDag &target, int n_trials, int max_length_factor, double threshold, std::uint64_t seed) {
              OracleConfig cfg;
              cfg.n_trials = n_trials;
              cfg.max_length_factor = max_length_factor;
              cfg.threshold = threshold;
              OracleResult r = oracle_compile(target, cfg, seed);
              return py::make_tuple(r.compiled, r.loss);
          },
          py::arg("target"), py::arg("n_trials") = 50, py::arg("max_length_factor") = 5, py::arg("threshold") = 0.05,
          py::arg("seed") = 0);

    m.def("pearson", [](const std::vector<double> &x, const std::vector<double> &y) { return pearson(x, y); });
    m.def("filter_candidates",
          [](const std::vector<double> &predictions, double threshold) {
              return filter_candidates(predictions, threshold);
          },
          py::arg("predictions"), py::arg("threshold") = 0.1);

    py::class_<Generator>(m, "Generator")
        .def(py::init([](int n_qubits, int hidden, int latent, int max_len, std::uint64_t seed) {
                 return Generator(GeneratorConfig{n_qubits, hidden, latent, max_len}, seed);
             }),
             py::arg("n_qubits") = 3, py::arg("hidden") = kDefaultHiddenDim, py::arg("latent") = kDefaultHiddenDim,
             py::arg("max_len") = kDefaultMaxLen, py::arg("seed") = 0)
        .def_static("load", &Generator::load)
        .def("save", [](const Generator &g, const std::string &path) { g.save(path); })
        .def("metadata", [](const Generator &g) { return g.metadata().dump(); })
        .def("set_connectivity",
             [](Generator &g, const std::string &name) {
                 g.set_connectivity(Connectivity::from_name(name, g.config().n_qubits));
             })
        .def("encode",
             [](const Generator &g, const CircuitDag &target) {
                 Posterior p = g.encode(target);
                 return py::make_tuple(std::vector<double>(p.mu.data(), p.mu.data() + p.mu.size()),
                                       std::vector<double>(p.sigma.data(), p.sigma.data() + p.sigma.size()));
             })
        .def("sample",
             [](const Generator &g, const CircuitDag &target, std::uint64_t seed, const std::string &strategy) {
                 Rng rng(seed);
                 nn::Vector z = Generator::reparameterize(g.encode(target), rng);
                 return g.decode_sample(z, SamplingStrategy::parse(strategy), rng);
             },
             py::arg("target"), py::arg("seed") = 0, py::arg("strategy") = "stochastic");

    py::class_<Predictor>(m, "Predictor")
        .def(py::init([](int n_qubits, int hidden, int max_len, std::uint64_t seed) {
                 return Predictor(PredictorConfig{n_qubits, hidden, max_len}, seed);
             }),
             py::arg("n_qubits") = 3, py::arg("hidden") = kDefaultHiddenDim, py::arg("max_len") = kDefaultMaxLen,
             py::arg("seed") = 0)
        .def_static("load", &Predictor::load)
        .def("save", [](const Predictor &p, const std::string &path) { p.save(path); })
        .def("predict",
             [](const Predictor &p, const CircuitDag &target, const CircuitDag &compiled) {
                 return p.predict(target, compiled);
             },
             py::arg("target"), py::arg("compiled"));

    m.def("compile_json",
          [](const CircuitDag &target, const Generator &gen, const Predictor *pred, int n_candidates,
             const std::string &strategy, const std::string &connectivity, double threshold, int max_steps,
             double lr, int restarts, std::uint64_t seed, int threads) {
              CompileConfig cfg;
              cfg.n_candidates = n_candidates;
              cfg.strategy = SamplingStrategy::parse(strategy);
              cfg.connectivity = connectivity;
              cfg.filter_threshold = threshold;
              cfg.finetune = finetune_config(max_steps, lr, restarts, 1e-7, 0);
              cfg.seed = seed;
              cfg.threads = threads;
              CompileReport r = compile(target, gen, pred, cfg);
              nlohmann::json j = r.to_json();
              j["config"] = cfg.to_json();
              return j.dump();
          },
          py::arg("target"), py::arg("generator"), py::arg("predictor") = nullptr, py::arg("n_candidates") = 100,
          py::arg("strategy") = "top-k:25", py::arg("connectivity") = "full", py::arg("threshold") = 0.1,
          py::arg("max_steps") = 200, py::arg("lr") = 0.05, py::arg("restarts") = 3, py::arg("seed") = 0,
          py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

    m.def("load_dataset_json",
          [](const std::string &path) {
              LoadedDataset d = load_dataset(path);
              nlohmann::json records = nlohmann::json::array();
              for (const Record &r : d.records) records.push_back(record_to_json(r));
              return nlohmann::json{{"manifest", d.manifest}, {"records", records}}.dump();
          },
          py::arg("path"));
}
