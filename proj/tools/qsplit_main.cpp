// qsplit command-line harness.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsplit/bench.hpp"
#include "qsplit/config.hpp"
#include "qsplit/instances.hpp"
#include "qsplit/model_io.hpp"
#include "qsplit/topology.hpp"

namespace {

using namespace qsplit;

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        const std::string part = text.substr(start, end - start);
        if (const auto dots = part.find(".."); dots != std::string::npos) {
            const auto lo = std::stoull(part.substr(0, dots));
            const auto hi = std::stoull(part.substr(dots + 2));
            if (hi < lo) throw std::invalid_argument("seed range '" + part + "' is empty");
            for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
        } else {
            std::size_t used = 0;
            seeds.push_back(std::stoull(part, &used));
            if (used != part.size()) throw std::invalid_argument("invalid seed '" + part + "'");
        }
        start = end + 1;
    }
    return seeds;
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty() || out_path == "-") std::cout << text;
    else write_text_file(out_path, text);
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct LoadedRuns {
    std::vector<TraceRecord> records;
    std::map<std::string, InstanceMeta> metas;
};

LoadedRuns load_runs(const std::vector<std::string>& dirs, const std::string& best_known) {
    LoadedRuns out;
    for (const auto& dir : dirs) {
        auto recs = parse_trace_csv(read_text_file(dir + "/trace.csv"));
        out.records.insert(out.records.end(), recs.begin(), recs.end());
        try {
            for (auto& [name, meta] : parse_summary_instances(read_text_file(dir + "/summary.json"))) {
                out.metas[name] = meta;
            }
        } catch (const std::runtime_error&) {
            std::cerr << "warning: no summary.json in '" << dir << "'; only Reg references are known\n";
        }
    }
    if (!best_known.empty()) {
        apply_best_known(out.metas, load_best_known(read_text_file(best_known), best_known));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qsplit: masked splitting heuristics for Ising problems"};
    app.require_subcommand(1);

    // run ------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Run methods on instances and write trace.csv and summary.json");
    std::vector<std::string> instances;
    std::vector<std::string> methods{"splitting"};
    std::string config_path;
    std::string topology;
    std::string lambda_mode;
    std::string seeds_text = "0";
    std::string best_known;
    std::string out_dir = "qsplit_out";
    int maxiter = -1;
    int maxsubiter = -1;
    int m = -1;
    int k = -1;
    int max_scans = -2;
    int reads = -1;
    int sweeps = -1;
    int threads = 0;
    long min_n = -1;
    long max_n = -1;
    double diagonal_shift = 0.0;
    bool no_factor_two = false;
    run->add_option("-i,--instances", instances, "reg:N, reg:N1,N2, reg, .json model, edge-list file or directory")
        ->required();
    run->add_option("--method", methods,
                    "splitting[:lambda], lnls[:m], kopt[:k], sa-full, sa-restricted, sa-reg (repeatable)");
    run->add_option("--config", config_path, "defaults TOML (default: $QSPLIT_DEFAULTS or the bundled file)");
    run->add_option("--topology", topology, "pegasus[:m] | chimera[:R,C,S] | complete | empty");
    run->add_option("--maxiter", maxiter, "outer iterations (SA methods: solver calls)");
    run->add_option("--maxsubiter", maxsubiter, "lambda candidates per splitting iteration");
    run->add_option("--lambda-mode", lambda_mode, "scan | fixed:<v> | monotone | zero");
    run->add_option("--m", m, "LNLS subset size");
    run->add_option("--k", k, "k-Opt order (1 or 2)");
    run->add_option("--max-scans", max_scans, "k-Opt scan limit (-1: until locally optimal)");
    run->add_option("--reads", reads, "annealing reads per solver call");
    run->add_option("--sweeps", sweeps, "annealing sweeps per read");
    run->add_option("--diagonal-shift", diagonal_shift, "constant added to the coupling diagonal (splitting)");
    run->add_flag("--no-factor-two", no_factor_two, "use A_lin s instead of 2 A_lin s as the gradient term");
    run->add_option("--seeds", seeds_text, "seed list, e.g. 0,1,2 or 0..9");
    run->add_option("--best-known", best_known, "CSV of best known values (name,value)");
    run->add_option("--min-n", min_n, "skip instances with fewer variables");
    run->add_option("--max-n", max_n, "skip instances with more variables");
    run->add_option("--threads", threads, "worker threads (default: $QSPLIT_THREADS or all cores)");
    run->add_option("--out", out_dir, "output directory");

    // curves ---------------------------------------------------------------
    auto* curves = app.add_subcommand("curves", "Mean approximation ratio per solver call");
    std::vector<std::string> curve_runs;
    std::string curve_best_known;
    std::string group_by = "method";
    std::string filter_text;
    std::string curve_out;
    curves->add_option("--run", curve_runs, "run directory (repeatable)")->required();
    curves->add_option("--best-known", curve_best_known, "CSV of best known values");
    curves->add_option("--group-by", group_by, "method | instance")->check(CLI::IsMember({"method", "instance"}));
    curves->add_option("--filter", filter_text, "instance size filter, e.g. \">150\"");
    curves->add_option("--out", curve_out, "output CSV (default: stdout)");

    // rank -----------------------------------------------------------------
    auto* rank = app.add_subcommand("rank", "Per-instance final ratios, or pairwise comparison counts");
    std::vector<std::string> rank_runs;
    std::string rank_best_known;
    std::string sort_by;
    std::string compare;
    double factor = 1.001;
    std::string rank_out;
    rank->add_option("--run", rank_runs, "run directory (repeatable)")->required();
    rank->add_option("--best-known", rank_best_known, "CSV of best known values");
    rank->add_option("--sort-by", sort_by, "method whose ratio orders the rows");
    rank->add_option("--compare", compare, "A,B: count instances where A is better / equal / worse than B");
    rank->add_option("--factor", factor, "improvement factor for the scaled counts");
    rank->add_option("--out", rank_out, "output CSV (default: stdout)");

    // topology dump ----------------------------------------------------------
    auto* topo = app.add_subcommand("topology", "Hardware graphs");
    topo->require_subcommand(1);
    auto* dump = topo->add_subcommand("dump", "Write a hardware graph");
    std::string family = "pegasus";
    std::string size = "2";
    std::string format = "edgelist";
    std::string topo_out;
    dump->add_option("--family", family, "pegasus | chimera")->check(CLI::IsMember({"pegasus", "chimera"}));
    dump->add_option("--size", size, "pegasus: m; chimera: R[,C[,S]]");
    dump->add_option("--format", format, "edgelist | json")->check(CLI::IsMember({"edgelist", "json"}));
    dump->add_option("--out", topo_out, "output file (default: stdout)");

    // instance gen -------------------------------------------------------------
    auto* inst = app.add_subcommand("instance", "Instance generation");
    inst->require_subcommand(1);
    auto* gen = inst->add_subcommand("gen", "Generate an instance");
    gen->require_subcommand(1);
    auto* gen_reg = gen->add_subcommand("reg", "Regular spin glass as a JSON model");
    int gen_n = 0;
    std::string gen_out;
    gen_reg->add_option("--n", gen_n, "dimension")->required();
    gen_reg->add_option("--out", gen_out, "output file (default: stdout)");
    auto* gen_mc = gen->add_subcommand("maxcut", "Random weighted graph as an MQLib edge list");
    double edge_p = 0.5;
    int max_weight = 0;
    std::uint64_t gen_seed = 0;
    gen_mc->add_option("--n", gen_n, "vertices")->required();
    gen_mc->add_option("--p", edge_p, "edge probability");
    gen_mc->add_option("--max-weight", max_weight, "integer weights in [-w, w] without 0; 0 gives unit weights");
    gen_mc->add_option("--seed", gen_seed, "generator seed");
    gen_mc->add_option("--out", gen_out, "output file (default: stdout)");

    // oracle reg -------------------------------------------------------------
    auto* oracle = app.add_subcommand("oracle", "Exact reference values");
    oracle->require_subcommand(1);
    auto* oracle_reg = oracle->add_subcommand("reg", "Ground state of the regular spin glass");
    int oracle_n = 0;
    oracle_reg->add_option("--n", oracle_n, "dimension")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            RunSpec spec;
            spec.settings = load_defaults_file(config_path.empty() ? default_config_path() : config_path);
            auto& s = spec.settings;
            if (!topology.empty()) s.topology = topology;
            if (maxiter >= 0) {
                s.splitting.maxiter = maxiter;
                s.lnls.maxiter = maxiter;
                s.sa_reg_maxiter = maxiter;
                s.sa_calls = maxiter;
            }
            if (maxsubiter >= 0) s.splitting.maxsubiter = maxsubiter;
            if (!lambda_mode.empty()) s.splitting.lambda = LambdaPolicy::parse(lambda_mode);
            if (no_factor_two) s.splitting.gradient_factor_two = false;
            if (diagonal_shift != 0.0) s.splitting.diagonal_shift = diagonal_shift;
            if (m >= 0) s.lnls.m = static_cast<std::size_t>(m);
            if (k >= 0) s.kopt_k = k;
            if (max_scans != -2) s.kopt_max_scans = max_scans;
            if (reads >= 0) s.solver.num_reads = reads;
            if (sweeps >= 0) s.solver.sweeps = sweeps;
            if (min_n >= 0) s.min_n = static_cast<std::size_t>(min_n);
            if (max_n >= 0) s.max_n = static_cast<std::size_t>(max_n);
            spec.instances = instances;
            spec.methods.clear();
            for (const auto& text : methods) spec.methods.push_back(MethodSpec::parse(text));
            spec.seeds = parse_seeds(seeds_text);
            if (!best_known.empty()) spec.best_known = load_best_known(read_text_file(best_known), best_known);
            spec.threads = threads;
            const auto output = execute_run(spec);
            write_run(out_dir, spec, output);
            print_warnings(output.warnings);
            std::size_t failed = 0;
            for (const auto& c : output.cells) failed += c.error.empty() ? 0 : 1;
            std::cerr << output.cells.size() << " cells, " << failed << " failed; wrote " << out_dir
                      << "/trace.csv and " << out_dir << "/summary.json\n";
            return failed == output.cells.size() && failed > 0 ? 1 : 0;
        }
        if (curves->parsed()) {
            auto runs = load_runs(curve_runs, curve_best_known);
            std::optional<SizeFilter> filter;
            if (!filter_text.empty()) filter = SizeFilter::parse(filter_text);
            const auto result = compute_curves(runs.records, runs.metas,
                                               group_by == "method" ? GroupBy::method : GroupBy::instance, filter);
            print_warnings(result.warnings);
            emit(curve_out, format_curves_csv(result));
            return 0;
        }
        if (rank->parsed()) {
            auto runs = load_runs(rank_runs, rank_best_known);
            if (!compare.empty()) {
                const auto comma = compare.find(',');
                if (comma == std::string::npos) throw std::invalid_argument("--compare expects A,B");
                const auto counts =
                    compare_methods(runs.records, compare.substr(0, comma), compare.substr(comma + 1), factor);
                print_warnings(counts.warnings);
                emit(rank_out, format_compare_csv(counts));
            } else {
                const auto table = compute_rank(runs.records, runs.metas, sort_by);
                print_warnings(table.warnings);
                emit(rank_out, format_rank_csv(table));
            }
            return 0;
        }
        if (dump->parsed()) {
            const auto spec = TopologySpec::parse(family + ":" + size);
            const HardwareMask mask = spec.family == TopologyFamily::pegasus
                                          ? pegasus_mask(spec.pegasus_size)
                                          : chimera_mask(spec.chimera_rows, spec.chimera_cols, spec.chimera_shore);
            std::string text;
            if (format == "edgelist") {
                for (const auto& [u, v] : mask.edges()) text += std::to_string(u) + ' ' + std::to_string(v) + '\n';
            } else {
                nlohmann::json edges = nlohmann::json::array();
                for (const auto& [u, v] : mask.edges()) edges.push_back({u, v});
                text = nlohmann::json{{"label", mask.label()}, {"n", mask.size()}, {"edges", edges}}.dump() + "\n";
            }
            emit(topo_out, text);
            return 0;
        }
        if (gen_reg->parsed()) {
            emit(gen_out, model_to_json(reg_instance(gen_n).model));
            return 0;
        }
        if (gen_mc->parsed()) {
            if (gen_n < 1) throw std::invalid_argument("--n must be >= 1");
            Rng rng = make_rng(gen_seed, 0);
            emit(gen_out, format_maxcut_edgelist(random_graph(static_cast<std::size_t>(gen_n), edge_p, max_weight, rng)));
            return 0;
        }
        if (oracle_reg->parsed()) {
            const auto gs = reg_ground_state(oracle_n);
            nlohmann::json doc = {{"N", oracle_n}, {"energy", gs.energy}, {"k", gs.k}, {"spins", gs.spins.to_vector()}};
            std::cout << doc.dump() << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
