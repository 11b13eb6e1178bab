#include "qsplit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "qsplit/baselines.hpp"
#include "qsplit/model_io.hpp"
#include "qsplit/rng.hpp"
#include "qsplit/splitting.hpp"
#include "qsplit/subsolver.hpp"
#include "qsplit/topology.hpp"

namespace qsplit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

template <typename T>
T parse_integer(std::string_view text, const std::string& what) {
    T out{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("invalid " + what + " '" + std::string(text) + "'");
    }
    return out;
}

double parse_real(std::string_view text, const std::string& what) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("invalid " + what + " '" + std::string(text) + "'");
    }
    return out;
}

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

SpinVector random_start(std::size_t n, std::uint64_t seed) {
    Rng rng = make_rng(seed, streams::kInitialState);
    std::vector<int> init(n);
    for (auto& v : init) v = random_spin(rng);
    return SpinVector(std::span<const int>(init));
}

void check_name(const std::string& name) {
    if (name.find_first_of(",\"\n\r") != std::string::npos) {
        throw std::invalid_argument("instance and method names may not contain commas, quotes or newlines: '" +
                                    name + "'");
    }
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

// ---------------------------------------------------------------------------
// Methods

MethodSpec MethodSpec::parse(const std::string& text) {
    MethodSpec spec;
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? std::string() : text.substr(colon + 1);
    if (colon != std::string::npos && arg.empty()) throw std::invalid_argument("method '" + text + "': empty argument");
    if (head == "splitting") {
        spec.kind = MethodKind::splitting;
        if (!arg.empty()) spec.lambda = LambdaPolicy::parse(arg);
    } else if (head == "lnls") {
        spec.kind = MethodKind::lnls;
        if (!arg.empty()) {
            spec.m = parse_integer<std::size_t>(arg, "LNLS subset size");
            if (*spec.m == 0) throw std::invalid_argument("LNLS subset size must be >= 1");
        }
    } else if (head == "kopt") {
        spec.kind = MethodKind::kopt;
        if (!arg.empty()) {
            spec.k = parse_integer<int>(arg, "k-Opt order");
            if (*spec.k != 1 && *spec.k != 2) throw std::invalid_argument("k-Opt supports k = 1 or 2");
        }
    } else if (head == "sa-full" || head == "sa-restricted" || head == "sa-reg") {
        if (!arg.empty()) throw std::invalid_argument("method '" + head + "' takes no argument");
        spec.kind = head == "sa-full" ? MethodKind::sa_full
                  : head == "sa-restricted" ? MethodKind::sa_restricted
                                            : MethodKind::sa_reg;
    } else {
        throw std::invalid_argument("unknown method '" + text +
                                    "' (expected splitting, lnls, kopt, sa-full, sa-restricted or sa-reg)");
    }
    return spec;
}

std::string MethodSpec::label(const Defaults& settings) const {
    switch (kind) {
    case MethodKind::splitting: return lambda ? "splitting:" + lambda->to_string() : "splitting";
    case MethodKind::lnls: return "lnls:" + std::to_string(m.value_or(settings.lnls.m));
    case MethodKind::kopt: return "kopt:" + std::to_string(k.value_or(settings.kopt_k));
    case MethodKind::sa_full: return "sa-full";
    case MethodKind::sa_restricted: return "sa-restricted";
    case MethodKind::sa_reg: return "sa-reg";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Instances

std::string to_string(InstanceKind kind) {
    switch (kind) {
    case InstanceKind::reg: return "reg";
    case InstanceKind::ising: return "ising";
    case InstanceKind::maxcut: return "maxcut";
    }
    return "?";
}

InstanceKind parse_instance_kind(const std::string& text) {
    if (text == "reg") return InstanceKind::reg;
    if (text == "ising") return InstanceKind::ising;
    if (text == "maxcut") return InstanceKind::maxcut;
    throw std::invalid_argument("unknown instance kind '" + text + "'");
}

std::vector<std::string> expand_instance_selectors(const std::vector<std::string>& selectors,
                                                   const std::vector<int>& reg_sizes) {
    std::vector<std::string> out;
    for (const auto& sel : selectors) {
        if (sel == "reg") {
            for (int n : reg_sizes) out.push_back("reg:" + std::to_string(n));
        } else if (starts_with(sel, "reg:")) {
            for (auto part : split_fields(std::string_view(sel).substr(4), ',')) {
                const int n = parse_integer<int>(part, "Reg size");
                if (n < 2) throw std::invalid_argument("Reg size must be >= 2");
                out.push_back("reg:" + std::to_string(n));
            }
        } else if (fs::is_directory(sel)) {
            std::vector<std::string> files;
            for (const auto& entry : fs::directory_iterator(sel)) {
                if (entry.is_regular_file()) files.push_back(entry.path().string());
            }
            std::sort(files.begin(), files.end());
            out.insert(out.end(), files.begin(), files.end());
        } else {
            out.push_back(sel);
        }
    }
    return out;
}

std::string instance_name(const std::string& selector) {
    if (starts_with(selector, "reg:")) return selector;
    return fs::path(selector).stem().string();
}

LoadedInstance load_instance(const std::string& selector, const BestKnownTable* best_known) {
    if (starts_with(selector, "reg:")) {
        const int n = parse_integer<int>(std::string_view(selector).substr(4), "Reg size");
        auto inst = reg_instance(n);
        InstanceMeta meta{selector, static_cast<std::size_t>(n), InstanceKind::reg, reg_ground_state(n).energy, 0.0};
        return {std::move(meta), std::move(inst.model)};
    }
    const std::string name = instance_name(selector);
    const std::string text = read_text_file(selector);
    std::optional<double> reference;
    if (best_known) {
        if (const auto* entry = best_known->find(name); entry && entry->usable_for_ratio) reference = entry->value;
    }
    if (fs::path(selector).extension() == ".json") {
        auto model = model_from_json(text);
        InstanceMeta meta{name, model.size(), InstanceKind::ising, reference, 0.0};
        return {std::move(meta), std::move(model)};
    }
    const auto graph = parse_maxcut_edgelist(text);
    InstanceMeta meta{name, graph.size(), InstanceKind::maxcut, reference, graph.total_weight()};
    return {std::move(meta), maxcut_to_ising(graph)};
}

double objective_value(const InstanceMeta& meta, double energy) {
    return meta.kind == InstanceKind::maxcut ? 0.5 * (meta.total_weight - energy) : energy;
}

std::optional<double> instance_ratio(const InstanceMeta& meta, double energy) {
    if (!meta.reference || *meta.reference == 0.0) return std::nullopt;
    const auto kind = meta.kind == InstanceKind::maxcut ? RatioKind::cut_best : RatioKind::ising_ground;
    return approximation_ratio(objective_value(meta, energy), *meta.reference, kind);
}

// ---------------------------------------------------------------------------
// Running

void RunSpec::validate() const {
    if (instances.empty()) throw std::invalid_argument("run: no instances given");
    if (methods.empty()) throw std::invalid_argument("run: no methods given");
    if (seeds.empty()) throw std::invalid_argument("run: no seeds given");
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) throw std::invalid_argument("run: duplicate seeds");
    std::set<std::string> labels;
    for (const auto& m : methods) {
        if (!labels.insert(m.label(settings)).second) {
            throw std::invalid_argument("run: method '" + m.label(settings) + "' given twice");
        }
    }
    settings.solver.validate();
    settings.splitting.validate();
    TopologySpec::parse(settings.topology);
    if (settings.lnls.maxiter < 0 || settings.sa_reg_maxiter < 0) throw std::invalid_argument("run: maxiter must be >= 0");
    if (settings.sa_calls < 1) throw std::invalid_argument("run: SA call budget must be >= 1");
    if (settings.kopt_k != 1 && settings.kopt_k != 2) throw std::invalid_argument("run: k-Opt supports k = 1 or 2");
    if (threads < 0) throw std::invalid_argument("run: thread count must be >= 0");
}

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QSPLIT_THREADS"); env && *env) {
        const int n = parse_integer<int>(env, "QSPLIT_THREADS");
        if (n < 1) throw std::invalid_argument("QSPLIT_THREADS must be >= 1");
        return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

CellResult run_cell(const LoadedInstance& instance, const MethodSpec& method, const Defaults& settings,
                    std::uint64_t seed) {
    CellResult out;
    out.instance = instance.meta.name;
    out.method = method.label(settings);
    out.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    const IsingModel& model = instance.model;
    try {
        AnnealingSampler sampler(settings.solver);
        IterationState final_state;
        switch (method.kind) {
        case MethodKind::splitting: {
            SplitConfig cfg = settings.splitting;
            cfg.seed = seed;
            if (method.lambda) cfg.lambda = *method.lambda;
            const auto mask = mask_for_problem(model.size(), TopologySpec::parse(settings.topology));
            auto result = run_splitting(model, mask, cfg, sampler);
            final_state = std::move(result.state);
            out.rows = std::move(result.rows);
            break;
        }
        case MethodKind::lnls: {
            LnlsConfig cfg = settings.lnls;
            cfg.seed = seed;
            if (method.m) cfg.m = *method.m;
            auto result = lnls_run(model, cfg, sampler);
            final_state = std::move(result.state);
            out.rows = std::move(result.rows);
            break;
        }
        case MethodKind::kopt: {
            auto result = k_opt(model, random_start(model.size(), seed), method.k.value_or(settings.kopt_k),
                                settings.kopt_max_scans);
            final_state.current = result.spins;
            final_state.current_energy = result.energy;
            final_state.best = std::move(result.spins);
            final_state.best_energy = result.energy;
            final_state.iteration = result.scans;
            final_state.calls = result.scans;
            out.rows = std::move(result.rows);
            break;
        }
        case MethodKind::sa_full:
        case MethodKind::sa_restricted: {
            std::optional<HardwareMask> mask;
            if (method.kind == MethodKind::sa_restricted) {
                mask = mask_for_problem(model.size(), TopologySpec::parse(settings.topology));
            }
            IterationState state = IterationState::start(model, random_start(model.size(), seed));
            TraceRecorder trace;
            trace.record(0, 0, std::nullopt, state.current_energy, state.best_energy);
            const std::uint64_t base = derive_seed(seed, streams::kSamplerCall);
            for (int c = 1; c <= settings.sa_calls; ++c) {
                SolverConfig sc = settings.solver;
                sc.seed = derive_seed(base, static_cast<std::uint64_t>(c - 1));
                SpinVector s = mask ? restricted_sa_solve(model, *mask, sc) : sa_solve(model, sc);
                state.current_energy = energy(model, s);
                state.current = std::move(s);
                state.offer(state.current, state.current_energy);
                state.iteration = c;
                ++state.calls;
                trace.record(c, 0, std::nullopt, state.current_energy, state.best_energy);
            }
            final_state = std::move(state);
            out.rows = std::move(trace).take();
            break;
        }
        case MethodKind::sa_reg: {
            IterationState state = IterationState::start(model, random_start(model.size(), seed));
            TraceRecorder trace;
            trace.record(0, 0, std::nullopt, state.current_energy, state.best_energy);
            Rng rng = make_rng(seed, streams::kRegularization);
            for (int k = 1; k <= settings.sa_reg_maxiter; ++k) {
                state = sa_reg_step(model, state, settings.sa_reg, k, sampler, rng);
                trace.record(state.iteration, 0, std::nullopt, state.current_energy, state.best_energy);
            }
            final_state = std::move(state);
            out.rows = std::move(trace).take();
            break;
        }
        }
        out.final_energy = final_state.current_energy;
        out.best_energy = final_state.best_energy;
        out.ratio = instance_ratio(instance.meta, final_state.best_energy);
        out.calls = final_state.calls;
    } catch (const std::exception& e) {
        out.error = e.what();
        out.rows.clear();
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

RunOutput execute_run(const RunSpec& spec) {
    spec.validate();
    RunOutput output;
    const auto selectors = expand_instance_selectors(spec.instances, spec.settings.reg_sizes);
    const BestKnownTable* table = spec.best_known ? &*spec.best_known : nullptr;

    struct Slot {
        std::string name;
        std::optional<LoadedInstance> instance;
        std::string error;
    };
    std::vector<Slot> slots;
    std::set<std::string> names;
    for (const auto& sel : selectors) {
        Slot slot{instance_name(sel), std::nullopt, {}};
        check_name(slot.name);
        if (!names.insert(slot.name).second) throw std::invalid_argument("run: duplicate instance name '" + slot.name + "'");
        try {
            slot.instance = load_instance(sel, table);
            const std::size_t n = slot.instance->meta.n;
            if ((spec.settings.min_n && n < spec.settings.min_n) || (spec.settings.max_n && n > spec.settings.max_n)) {
                output.warnings.push_back("instance '" + slot.name + "' (n = " + std::to_string(n) +
                                          ") is outside the size filter; skipped");
                continue;
            }
            if (slot.instance->meta.kind != InstanceKind::reg && !slot.instance->meta.reference) {
                output.warnings.push_back("instance '" + slot.name + "' has no usable reference value; no ratio");
            }
            output.instances.push_back(slot.instance->meta);
        } catch (const std::exception& e) {
            slot.error = e.what();
            output.warnings.push_back("instance '" + slot.name + "' failed to load: " + slot.error);
        }
        slots.push_back(std::move(slot));
    }

    struct Job {
        const Slot* slot;
        const MethodSpec* method;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& slot : slots) {
        for (const auto& m : spec.methods) {
            for (auto seed : spec.seeds) jobs.push_back({&slot, &m, seed});
        }
    }
    output.cells.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& job = jobs[i];
            if (job.slot->instance) {
                output.cells[i] = run_cell(*job.slot->instance, *job.method, spec.settings, job.seed);
            } else {
                CellResult& cell = output.cells[i];
                cell.instance = job.slot->name;
                cell.method = job.method->label(spec.settings);
                cell.seed = job.seed;
                cell.error = job.slot->error;
            }
        }
    };
    const int threads = std::min<int>(resolve_thread_count(spec.threads), static_cast<int>(std::max<std::size_t>(1, jobs.size())));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& cell : output.cells) {
        if (!cell.error.empty()) {
            output.warnings.push_back("cell " + cell.instance + " / " + cell.method + " / seed " +
                                      std::to_string(cell.seed) + " failed: " + cell.error);
        }
    }
    return output;
}

std::string format_trace_csv(const RunOutput& output, bool include_wall_ms) {
    std::string out(kTraceHeader);
    if (!include_wall_ms) out.resize(out.rfind(','));
    out += '\n';
    for (const auto& cell : output.cells) {
        for (const auto& r : cell.rows) {
            out += cell.instance;
            out += ',' + cell.method;
            out += ',' + std::to_string(cell.seed);
            out += ',' + std::to_string(r.iteration);
            out += ',' + std::to_string(r.subiteration);
            out += ',' + std::to_string(r.call);
            out += ',' + (r.lambda ? format_real(*r.lambda) : std::string());
            out += ',' + format_real(r.energy);
            out += ',' + format_real(r.best_energy);
            if (include_wall_ms) out += ',' + format_real(std::round(r.wall_ms * 1000.0) / 1000.0);
            out += '\n';
        }
    }
    return out;
}

std::string format_summary_json(const RunSpec& spec, const RunOutput& output) {
    json instances = json::array();
    for (const auto& m : output.instances) {
        json entry = {{"name", m.name}, {"n", m.n}, {"kind", to_string(m.kind)}, {"reference", optional_json(m.reference)}};
        if (m.kind == InstanceKind::maxcut) entry["total_weight"] = m.total_weight;
        instances.push_back(std::move(entry));
    }
    json cells = json::array();
    double total_ms = 0.0;
    for (const auto& c : output.cells) {
        total_ms += c.wall_ms;
        json entry = {{"instance", c.instance},
                      {"method", c.method},
                      {"seed", c.seed},
                      {"final_energy", optional_json(c.final_energy)},
                      {"best_energy", optional_json(c.best_energy)},
                      {"ratio", optional_json(c.ratio)},
                      {"calls", c.calls},
                      {"wall_ms", c.wall_ms}};
        if (!c.error.empty()) entry["error"] = c.error;
        cells.push_back(std::move(entry));
    }
    const auto& s = spec.settings;
    json methods = json::array();
    for (const auto& m : spec.methods) methods.push_back(m.label(s));
    json config = {
        {"methods", methods},
        {"seeds", spec.seeds},
        {"topology", s.topology},
        {"solver",
         {{"num_reads", s.solver.num_reads},
          {"sweeps", s.solver.sweeps},
          {"beta_start", s.solver.beta_start},
          {"beta_end", s.solver.beta_end},
          {"schedule", s.solver.schedule == BetaScheduleKind::geometric ? "geometric" : "linear"}}},
        {"splitting",
         {{"maxiter", s.splitting.maxiter},
          {"maxsubiter", s.splitting.maxsubiter},
          {"lambda", s.splitting.lambda.to_string()},
          {"gradient_factor_two", s.splitting.gradient_factor_two},
          {"diagonal_shift", s.splitting.diagonal_shift}}},
        {"lnls", {{"m", s.lnls.m}, {"maxiter", s.lnls.maxiter}}},
        {"kopt", {{"k", s.kopt_k}, {"max_scans", s.kopt_max_scans}}},
        {"sa", {{"calls", s.sa_calls}}},
        {"sa_reg", {{"temperature_c", s.sa_reg.temperature_c}, {"subset_size", s.sa_reg.subset_size}, {"maxiter", s.sa_reg_maxiter}}},
    };
    if (spec.best_known) config["best_known_provenance"] = spec.best_known->provenance;
    json doc = {{"config", config},
                {"instances", instances},
                {"cells", cells},
                {"total_wall_ms", total_ms},
                {"warnings", output.warnings}};
    return doc.dump(2) + "\n";
}

void write_run(const std::string& dir, const RunSpec& spec, const RunOutput& output) {
    fs::create_directories(dir);
    write_text_file((fs::path(dir) / "trace.csv").string(), format_trace_csv(output));
    write_text_file((fs::path(dir) / "summary.json").string(), format_summary_json(spec, output));
}

// ---------------------------------------------------------------------------
// Post-processing

std::vector<TraceRecord> parse_trace_csv(std::string_view text) {
    std::vector<TraceRecord> out;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header = true;
    while (pos < text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const auto f = split_fields(line, ',');
        if (header) {
            header = false;
            if (line != kTraceHeader && line != kTraceHeader.substr(0, kTraceHeader.rfind(','))) {
                throw ParseError(line_no, "unexpected trace header");
            }
            continue;
        }
        if (f.size() != 9 && f.size() != 10) throw ParseError(line_no, "expected 9 or 10 fields");
        try {
            TraceRecord rec;
            rec.instance = std::string(f[0]);
            rec.method = std::string(f[1]);
            rec.seed = parse_integer<std::uint64_t>(f[2], "seed");
            rec.row.iteration = parse_integer<int>(f[3], "iteration");
            rec.row.subiteration = parse_integer<int>(f[4], "subiteration");
            rec.row.call = parse_integer<int>(f[5], "call");
            if (!f[6].empty()) rec.row.lambda = parse_real(f[6], "lambda");
            rec.row.energy = parse_real(f[7], "energy");
            rec.row.best_energy = parse_real(f[8], "best_energy");
            if (f.size() == 10) rec.row.wall_ms = parse_real(f[9], "wall_ms");
            out.push_back(std::move(rec));
        } catch (const std::invalid_argument& e) {
            throw ParseError(line_no, e.what());
        }
    }
    return out;
}

std::map<std::string, InstanceMeta> parse_summary_instances(std::string_view json_text) {
    std::map<std::string, InstanceMeta> out;
    try {
        const auto doc = json::parse(json_text);
        for (const auto& entry : doc.at("instances")) {
            InstanceMeta meta;
            meta.name = entry.at("name").get<std::string>();
            meta.n = entry.at("n").get<std::size_t>();
            meta.kind = parse_instance_kind(entry.at("kind").get<std::string>());
            if (entry.contains("reference") && !entry.at("reference").is_null()) {
                meta.reference = entry.at("reference").get<double>();
            }
            meta.total_weight = entry.value("total_weight", 0.0);
            out[meta.name] = std::move(meta);
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("summary JSON: ") + e.what());
    }
    return out;
}

void apply_best_known(std::map<std::string, InstanceMeta>& metas, const BestKnownTable& table) {
    for (auto& [name, meta] : metas) {
        if (meta.kind == InstanceKind::reg) continue;
        if (const auto* entry = table.find(name)) {
            meta.reference = entry->usable_for_ratio ? std::optional<double>(entry->value) : std::nullopt;
        }
    }
}

SizeFilter SizeFilter::parse(const std::string& text) {
    SizeFilter f;
    std::string_view rest = text;
    if (starts_with(rest, ">=")) f.op = Op::ge, rest.remove_prefix(2);
    else if (starts_with(rest, "<=")) f.op = Op::le, rest.remove_prefix(2);
    else if (starts_with(rest, ">")) f.op = Op::gt, rest.remove_prefix(1);
    else if (starts_with(rest, "<")) f.op = Op::lt, rest.remove_prefix(1);
    else if (starts_with(rest, "=")) f.op = Op::eq, rest.remove_prefix(1);
    else f.op = Op::eq;
    f.value = parse_integer<std::size_t>(rest, "size filter");
    return f;
}

bool SizeFilter::accepts(std::size_t n) const {
    switch (op) {
    case Op::gt: return n > value;
    case Op::ge: return n >= value;
    case Op::lt: return n < value;
    case Op::le: return n <= value;
    case Op::eq: return n == value;
    }
    return false;
}

namespace {

using SeriesKey = std::tuple<std::string, std::string, std::uint64_t>; // instance, method, seed

std::map<SeriesKey, std::vector<TraceRow>> group_series(const std::vector<TraceRecord>& records) {
    std::map<SeriesKey, std::vector<TraceRow>> series;
    for (const auto& r : records) series[{r.instance, r.method, r.seed}].push_back(r.row);
    for (auto& [key, rows] : series) {
        std::stable_sort(rows.begin(), rows.end(), [](const TraceRow& a, const TraceRow& b) { return a.call < b.call; });
    }
    return series;
}

// Fills in Reg metadata that can be recomputed from the name.
const InstanceMeta* lookup_meta(std::map<std::string, InstanceMeta>& metas, const std::string& name) {
    auto it = metas.find(name);
    if (it != metas.end()) return &it->second;
    if (starts_with(name, "reg:")) {
        try {
            const int n = parse_integer<int>(std::string_view(name).substr(4), "Reg size");
            InstanceMeta meta{name, static_cast<std::size_t>(n), InstanceKind::reg, reg_ground_state(n).energy, 0.0};
            return &metas.emplace(name, std::move(meta)).first->second;
        } catch (const std::exception&) {
            return nullptr;
        }
    }
    return nullptr;
}

} // namespace

CurveResult compute_curves(const std::vector<TraceRecord>& records, std::map<std::string, InstanceMeta> metas,
                           GroupBy group_by, const std::optional<SizeFilter>& filter) {
    CurveResult result;
    const auto series = group_series(records);

    // group -> instance -> list of (rows) over seeds
    std::map<std::string, std::map<std::string, std::vector<const std::vector<TraceRow>*>>> groups;
    std::set<std::string> excluded;
    for (const auto& [key, rows] : series) {
        const auto& [instance, method, seed] = key;
        const InstanceMeta* meta = lookup_meta(metas, instance);
        if (!meta || !meta->reference || *meta->reference == 0.0) {
            if (excluded.insert(instance).second) {
                result.warnings.push_back("instance '" + instance + "' has no reference value; excluded");
            }
            continue;
        }
        if (filter && !filter->accepts(meta->n)) continue;
        const std::string group = group_by == GroupBy::method ? method : instance;
        groups[group][instance].push_back(&rows);
    }

    for (const auto& [group, instances] : groups) {
        int max_call = 0;
        for (const auto& [instance, list] : instances) {
            for (const auto* rows : list) max_call = std::max(max_call, rows->back().call);
        }
        for (int c = 0; c <= max_call; ++c) {
            double sum = 0.0;
            std::size_t count = 0;
            for (const auto& [instance, list] : instances) {
                const InstanceMeta& meta = metas.at(instance);
                double inst_sum = 0.0;
                std::size_t inst_count = 0;
                for (const auto* rows : list) {
                    // last row with call <= c
                    auto it = std::upper_bound(rows->begin(), rows->end(), c,
                                               [](int v, const TraceRow& r) { return v < r.call; });
                    if (it == rows->begin()) continue;
                    inst_sum += *instance_ratio(meta, std::prev(it)->best_energy);
                    ++inst_count;
                }
                if (inst_count == 0) continue;
                sum += inst_sum / static_cast<double>(inst_count);
                ++count;
            }
            if (count > 0) result.points.push_back({group, c, sum / static_cast<double>(count), count});
        }
    }
    return result;
}

std::string format_curves_csv(const CurveResult& curves) {
    std::string out = "method,iteration,mean_ratio,n_instances\n";
    for (const auto& p : curves.points) {
        out += p.group + ',' + std::to_string(p.call) + ',' + format_real(p.mean_ratio) + ',' +
               std::to_string(p.n_instances) + '\n';
    }
    return out;
}

namespace {

// instance -> method -> mean final best energy over seeds, in first-seen order
struct FinalTable {
    std::vector<std::string> instances;
    std::vector<std::string> methods;
    std::map<std::pair<std::string, std::string>, std::map<std::uint64_t, double>> finals;
};

FinalTable final_energies(const std::vector<TraceRecord>& records) {
    FinalTable t;
    std::set<std::string> seen_i;
    std::set<std::string> seen_m;
    for (const auto& r : records) {
        if (seen_i.insert(r.instance).second) t.instances.push_back(r.instance);
        if (seen_m.insert(r.method).second) t.methods.push_back(r.method);
    }
    for (const auto& [key, rows] : group_series(records)) {
        const auto& [instance, method, seed] = key;
        t.finals[{instance, method}][seed] = rows.back().best_energy;
    }
    return t;
}

double mean_of(const std::map<std::uint64_t, double>& values) {
    double sum = 0.0;
    for (const auto& [seed, v] : values) sum += v;
    return sum / static_cast<double>(values.size());
}

} // namespace

RankTable compute_rank(const std::vector<TraceRecord>& records, std::map<std::string, InstanceMeta> metas,
                       const std::string& sort_method) {
    RankTable table;
    const FinalTable finals = final_energies(records);
    table.methods = finals.methods;
    if (table.methods.empty()) return table;

    std::size_t sort_idx = 0;
    if (!sort_method.empty()) {
        auto it = std::find(table.methods.begin(), table.methods.end(), sort_method);
        if (it == table.methods.end()) throw std::invalid_argument("rank: method '" + sort_method + "' not in traces");
        sort_idx = static_cast<std::size_t>(it - table.methods.begin());
    } else {
        auto it = std::find_if(table.methods.begin(), table.methods.end(),
                               [](const std::string& m) { return starts_with(m, "splitting"); });
        if (it != table.methods.end()) sort_idx = static_cast<std::size_t>(it - table.methods.begin());
    }

    for (const auto& instance : finals.instances) {
        RankRow row{instance, {}, {}};
        const InstanceMeta* meta = lookup_meta(metas, instance);
        if (!meta || !meta->reference) table.warnings.push_back("instance '" + instance + "' has no reference value");
        for (const auto& method : table.methods) {
            auto it = finals.finals.find({instance, method});
            if (it == finals.finals.end()) {
                row.energy.push_back(std::nullopt);
                row.ratio.push_back(std::nullopt);
                continue;
            }
            const double e = mean_of(it->second);
            row.energy.push_back(e);
            row.ratio.push_back(meta ? instance_ratio(*meta, e) : std::nullopt);
        }
        table.rows.push_back(std::move(row));
    }

    // ascending ratio (worst first); descending energy when there is no ratio
    auto key = [sort_idx](const RankRow& r) -> std::optional<double> {
        if (r.ratio[sort_idx]) return *r.ratio[sort_idx];
        if (r.energy[sort_idx]) return -*r.energy[sort_idx];
        return std::nullopt;
    };
    std::stable_sort(table.rows.begin(), table.rows.end(), [&](const RankRow& a, const RankRow& b) {
        const auto ka = key(a);
        const auto kb = key(b);
        if (!ka || !kb) return ka.has_value() && !kb.has_value();
        return *ka < *kb;
    });
    return table;
}

std::string format_rank_csv(const RankTable& table) {
    std::string out = "instance";
    for (const auto& m : table.methods) out += ",ratio:" + m;
    for (const auto& m : table.methods) out += ",energy:" + m;
    out += '\n';
    for (const auto& row : table.rows) {
        out += row.instance;
        for (const auto& v : row.ratio) out += ',' + (v ? format_real(*v) : std::string());
        for (const auto& v : row.energy) out += ',' + (v ? format_real(*v) : std::string());
        out += '\n';
    }
    return out;
}

CompareCounts compare_methods(const std::vector<TraceRecord>& records, const std::string& method_a,
                              const std::string& method_b, double factor) {
    if (!(factor >= 1.0)) throw std::invalid_argument("compare: factor must be >= 1");
    if (method_a == method_b) throw std::invalid_argument("compare: the two methods must differ");
    CompareCounts counts;
    counts.method_a = method_a;
    counts.method_b = method_b;
    counts.factor = factor;
    const FinalTable finals = final_energies(records);
    for (const auto& m : {method_a, method_b}) {
        if (std::find(finals.methods.begin(), finals.methods.end(), m) == finals.methods.end()) {
            throw std::invalid_argument("compare: method '" + m + "' not in traces");
        }
    }
    const double slack = factor - 1.0;
    for (const auto& instance : finals.instances) {
        auto ia = finals.finals.find({instance, method_a});
        auto ib = finals.finals.find({instance, method_b});
        if (ia == finals.finals.end() || ib == finals.finals.end()) {
            counts.warnings.push_back("instance '" + instance + "' lacks one of the methods; skipped");
            continue;
        }
        std::map<std::uint64_t, double> ea;
        std::map<std::uint64_t, double> eb;
        for (const auto& [seed, v] : ia->second) {
            if (auto jt = ib->second.find(seed); jt != ib->second.end()) {
                ea[seed] = v;
                eb[seed] = jt->second;
            }
        }
        if (ea.empty()) {
            counts.warnings.push_back("instance '" + instance + "' has no common seeds; skipped");
            continue;
        }
        const double a = mean_of(ea);
        const double b = mean_of(eb);
        ++counts.total;
        if (energies_equal(a, b)) ++counts.equal;
        else if (a < b) ++counts.better;
        else ++counts.worse;
        if (a - slack * std::abs(a) < b && !energies_equal(a - slack * std::abs(a), b)) ++counts.better_scaled;
        if (b - slack * std::abs(b) < a && !energies_equal(b - slack * std::abs(b), a)) ++counts.worse_scaled;
    }
    return counts;
}

std::string format_compare_csv(const CompareCounts& c) {
    std::ostringstream out;
    out << "method_a,method_b,factor,better,equal,worse,better_scaled,worse_scaled,total\n"
        << c.method_a << ',' << c.method_b << ',' << format_real(c.factor) << ',' << c.better << ',' << c.equal << ','
        << c.worse << ',' << c.better_scaled << ',' << c.worse_scaled << ',' << c.total << '\n';
    return out.str();
}

} // namespace qsplit
