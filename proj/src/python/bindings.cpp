// Python module _qsplit. Spin vectors cross the boundary as lists of +-1,
// matrices as nested lists (row-major).

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsplit/baselines.hpp"
#include "qsplit/bench.hpp"
#include "qsplit/config.hpp"
#include "qsplit/instances.hpp"
#include "qsplit/ising.hpp"
#include "qsplit/model_io.hpp"
#include "qsplit/splitting.hpp"
#include "qsplit/subsolver.hpp"
#include "qsplit/topology.hpp"

namespace py = pybind11;
using namespace qsplit;

namespace {

using Dense = std::vector<std::vector<double>>;

std::vector<double> flatten(const Dense& m) {
    std::vector<double> out;
    for (const auto& row : m) {
        if (row.size() != m.size()) throw std::invalid_argument("matrix must be square");
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

Dense unflatten(const std::vector<double>& flat, std::size_t n) {
    Dense out(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i][j] = flat[i * n + j];
    return out;
}

SpinVector to_spins(const std::vector<int>& s) { return SpinVector(std::span<const int>(s)); }

IsingModel make_model(const Dense& couplings, std::vector<double> biases, double offset) {
    return IsingModel(SymmetricMatrix::from_dense(couplings.size(), flatten(couplings)), std::move(biases), offset);
}

py::list rows_to_list(const std::vector<TraceRow>& rows) {
    py::list out;
    for (const auto& r : rows) {
        py::dict d;
        d["iteration"] = r.iteration;
        d["subiteration"] = r.subiteration;
        d["call"] = r.call;
        d["lambda"] = r.lambda ? py::cast(*r.lambda) : py::none();
        d["energy"] = r.energy;
        d["best_energy"] = r.best_energy;
        d["wall_ms"] = r.wall_ms;
        out.append(std::move(d));
    }
    return out;
}

py::dict result_to_dict(const RunResult& r) {
    py::dict d;
    d["best"] = r.state.best.to_vector();
    d["best_energy"] = r.state.best_energy;
    d["current"] = r.state.current.to_vector();
    d["current_energy"] = r.state.current_energy;
    d["calls"] = r.state.calls;
    d["rows"] = rows_to_list(r.rows);
    return d;
}

SolverConfig solver_config(int num_reads, int sweeps, double beta_start, double beta_end, std::uint64_t seed) {
    SolverConfig cfg;
    cfg.num_reads = num_reads;
    cfg.sweeps = sweeps;
    cfg.beta_start = beta_start;
    cfg.beta_end = beta_end;
    cfg.seed = seed;
    return cfg;
}

// "sa", "exact" or a callable (couplings, biases, seed) -> spins.
std::unique_ptr<Sampler> make_sampler(const py::object& sampler, const SolverConfig& cfg) {
    if (sampler.is_none()) return std::make_unique<AnnealingSampler>(cfg);
    if (py::isinstance<py::str>(sampler)) {
        const auto name = sampler.cast<std::string>();
        if (name == "sa") return std::make_unique<AnnealingSampler>(cfg);
        if (name == "exact") return std::make_unique<ExhaustiveSampler>();
        throw std::invalid_argument("sampler must be 'sa', 'exact' or a callable");
    }
    py::function fn = sampler;
    return std::make_unique<CallbackSampler>(
        [fn](const IsingModel& p, std::uint64_t seed) {
            py::gil_scoped_acquire gil;
            const auto spins = fn(unflatten(p.couplings().to_dense(), p.size()), p.biases(), seed).cast<std::vector<int>>();
            return to_spins(spins);
        },
        "python");
}

} // namespace

PYBIND11_MODULE(_qsplit, m) {
    m.doc() = "Hardware-mask splitting for Ising problems";

    py::class_<IsingModel>(m, "IsingModel")
        .def(py::init(&make_model), py::arg("couplings"), py::arg("biases"), py::arg("offset") = 0.0)
        .def_property_readonly("n", &IsingModel::size)
        .def_property_readonly("biases", &IsingModel::biases)
        .def_property_readonly("offset", &IsingModel::offset)
        .def_property_readonly("couplings",
                               [](const IsingModel& s) { return unflatten(s.couplings().to_dense(), s.size()); })
        .def("to_json", [](const IsingModel& s) { return model_to_json(s); })
        .def_static("from_json", [](const std::string& text) { return model_from_json(text); })
        .def("__repr__", [](const IsingModel& s) { return "<IsingModel n=" + std::to_string(s.size()) + ">"; });

    m.def("energy", [](const IsingModel& model, const std::vector<int>& s) { return energy(model, to_spins(s)); },
          py::arg("model"), py::arg("spins"));
    m.def("delta_energy",
          [](const IsingModel& model, const std::vector<int>& s, std::size_t i) { return delta_energy(model, to_spins(s), i); },
          py::arg("model"), py::arg("spins"), py::arg("i"));
    m.def("local_fields",
          [](const IsingModel& model, const std::vector<int>& s) { return local_fields(model, to_spins(s)); },
          py::arg("model"), py::arg("spins"));
    m.def(
        "qubo_to_ising",
        [](const Dense& q) {
            const auto conv = qubo_to_ising(QuboModel::from_dense(q.size(), flatten(q)));
            return py::make_tuple(conv.model, conv.symmetrized);
        },
        py::arg("q"), "Returns (model, symmetrized).");
    m.def(
        "maxcut_to_ising",
        [](std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
            std::vector<Edge> e;
            for (const auto& [u, v, w] : edges) e.push_back({std::min(u, v), std::max(u, v), w});
            return maxcut_to_ising(WeightedGraph(n, std::move(e)));
        },
        py::arg("n"), py::arg("edges"));
    m.def("apply_diagonal_shift", &apply_diagonal_shift, py::arg("model"), py::arg("c"));

    m.def("reg_instance", [](int N) { return reg_instance(N).model; }, py::arg("N"));
    m.def(
        "reg_ground_state",
        [](int N) {
            const auto gs = reg_ground_state(N);
            py::dict d;
            d["spins"] = gs.spins.to_vector();
            d["energy"] = gs.energy;
            d["k"] = gs.k;
            return d;
        },
        py::arg("N"));

    py::class_<HardwareMask>(m, "HardwareMask")
        .def_property_readonly("n", &HardwareMask::size)
        .def_property_readonly("label", &HardwareMask::label)
        .def_property_readonly("edge_count", &HardwareMask::edge_count)
        .def("edges", &HardwareMask::edges)
        .def("has_edge", &HardwareMask::has_edge)
        .def("degree", &HardwareMask::degree)
        .def("__repr__", [](const HardwareMask& h) {
            return "<HardwareMask " + h.label() + " n=" + std::to_string(h.size()) + ">";
        });
    m.def("pegasus_mask", &pegasus_mask, py::arg("m"));
    m.def("chimera_mask", &chimera_mask, py::arg("rows"), py::arg("cols"), py::arg("shore") = 4);
    m.def("complete_mask", &complete_mask, py::arg("n"));
    m.def("empty_mask", &empty_mask, py::arg("n"));
    m.def(
        "mask_for_problem", [](std::size_t n, const std::string& spec) { return mask_for_problem(n, TopologySpec::parse(spec)); },
        py::arg("n"), py::arg("topology") = "pegasus");

    m.def(
        "sa_solve",
        [](const IsingModel& model, int num_reads, int sweeps, double beta_start, double beta_end, std::uint64_t seed) {
            return sa_solve(model, solver_config(num_reads, sweeps, beta_start, beta_end, seed)).to_vector();
        },
        py::arg("model"), py::arg("num_reads") = 100, py::arg("sweeps") = 1000, py::arg("beta_start") = 0.1,
        py::arg("beta_end") = 10.0, py::arg("seed") = 0);
    m.def(
        "brute_force_solve",
        [](const IsingModel& model) {
            const auto r = brute_force_solve(model);
            return py::make_tuple(r.spins.to_vector(), r.energy);
        },
        py::arg("model"), "Returns (spins, energy).");

    m.def(
        "run_splitting",
        [](const IsingModel& model, const HardwareMask& mask, int maxiter, int maxsubiter, const std::string& lambda_mode,
           std::uint64_t seed, const py::object& sampler, int num_reads, int sweeps) {
            SplitConfig cfg;
            cfg.maxiter = maxiter;
            cfg.maxsubiter = maxsubiter;
            cfg.lambda = LambdaPolicy::parse(lambda_mode);
            cfg.seed = seed;
            auto s = make_sampler(sampler, solver_config(num_reads, sweeps, 0.1, 10.0, 0));
            return result_to_dict(run_splitting(model, mask, cfg, *s));
        },
        py::arg("model"), py::arg("mask"), py::arg("maxiter") = 25, py::arg("maxsubiter") = 15,
        py::arg("lambda_mode") = "scan", py::arg("seed") = 0, py::arg("sampler") = py::none(),
        py::arg("num_reads") = 100, py::arg("sweeps") = 1000);
    m.def(
        "lnls_run",
        [](const IsingModel& model, std::size_t m_size, int maxiter, std::uint64_t seed, const py::object& sampler,
           int num_reads, int sweeps) {
            LnlsConfig cfg{m_size, maxiter, seed};
            auto s = make_sampler(sampler, solver_config(num_reads, sweeps, 0.1, 10.0, 0));
            return result_to_dict(lnls_run(model, cfg, *s));
        },
        py::arg("model"), py::arg("m") = 10, py::arg("maxiter") = 25, py::arg("seed") = 0,
        py::arg("sampler") = py::none(), py::arg("num_reads") = 100, py::arg("sweeps") = 1000);
    m.def(
        "k_opt",
        [](const IsingModel& model, const std::vector<int>& start, int k, int max_scans) {
            const auto r = k_opt(model, to_spins(start), k, max_scans);
            py::dict d;
            d["spins"] = r.spins.to_vector();
            d["energy"] = r.energy;
            d["scans"] = r.scans;
            d["rows"] = rows_to_list(r.rows);
            return d;
        },
        py::arg("model"), py::arg("start"), py::arg("k") = 1, py::arg("max_scans") = -1);

    m.def(
        "execute_run",
        [](const std::vector<std::string>& instances, const std::vector<std::string>& methods,
           const std::vector<std::uint64_t>& seeds, const std::string& config_path, int threads) {
            RunSpec spec;
            spec.instances = instances;
            for (const auto& text : methods) spec.methods.push_back(MethodSpec::parse(text));
            spec.seeds = seeds;
            spec.settings = config_path.empty() ? builtin_defaults() : load_defaults_file(config_path);
            spec.threads = threads;
            RunOutput out;
            {
                py::gil_scoped_release release;
                out = execute_run(spec);
            }
            py::dict d;
            d["trace_csv"] = format_trace_csv(out);
            d["summary_json"] = format_summary_json(spec, out);
            d["warnings"] = out.warnings;
            return d;
        },
        py::arg("instances"), py::arg("methods") = std::vector<std::string>{"splitting"},
        py::arg("seeds") = std::vector<std::uint64_t>{0}, py::arg("config_path") = "", py::arg("threads") = 0,
        "Runs the benchmark harness; returns the trace CSV and summary JSON text.");
}
