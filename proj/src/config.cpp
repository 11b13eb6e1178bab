#include "qsplit/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#ifndef QSPLIT_DEFAULTS_PATH
#define QSPLIT_DEFAULTS_PATH "config/defaults.toml"
#endif

namespace qsplit {

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw std::invalid_argument("defaults: '" + key + "' " + what);
}

void check_keys(const toml::table& tbl, const std::string& prefix, const std::set<std::string>& allowed) {
    for (const auto& [k, v] : tbl) {
        const std::string key(k.str());
        if (!allowed.count(key)) fail(prefix + key, "is not a known setting");
    }
}

const toml::table* section(const toml::table& root, const std::string& name) {
    const auto* node = root.get(name);
    if (!node) return nullptr;
    const auto* tbl = node->as_table();
    if (!tbl) fail(name, "must be a table");
    return tbl;
}

template <typename T>
void read_int(const toml::table& tbl, const std::string& sec, const std::string& key, T& out) {
    const auto* node = tbl.get(key);
    if (!node) return;
    const auto v = node->value<std::int64_t>();
    if (!v || !node->is_integer()) fail(sec + "." + key, "must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
        if (*v < 0) fail(sec + "." + key, "must be non-negative");
    }
    out = static_cast<T>(*v);
}

void read_double(const toml::table& tbl, const std::string& sec, const std::string& key, double& out) {
    const auto* node = tbl.get(key);
    if (!node) return;
    if (!node->is_number()) fail(sec + "." + key, "must be a number");
    out = *node->value<double>();
}

void read_bool(const toml::table& tbl, const std::string& sec, const std::string& key, bool& out) {
    const auto* node = tbl.get(key);
    if (!node) return;
    if (!node->is_boolean()) fail(sec + "." + key, "must be true or false");
    out = *node->value<bool>();
}

void read_string(const toml::table& tbl, const std::string& sec, const std::string& key, std::string& out) {
    const auto* node = tbl.get(key);
    if (!node) return;
    if (!node->is_string()) fail(sec + "." + key, "must be a string");
    out = *node->value<std::string>();
}

std::vector<int> size_range(int start, int stop, int step) {
    if (step < 1 || start < 2 || stop < start) throw std::invalid_argument("defaults: invalid bench.reg_sizes range");
    std::vector<int> out;
    for (int n = start; n <= stop; n += step) out.push_back(n);
    return out;
}

} // namespace

Defaults builtin_defaults() {
    Defaults d;
    d.reg_sizes = size_range(10, 270, 10);
    return d;
}

Defaults parse_defaults(std::string_view toml_text) {
    toml::table root;
    try {
        root = toml::parse(toml_text);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "defaults: " << e.description() << " at line " << e.source().begin.line;
        throw std::invalid_argument(msg.str());
    }
    check_keys(root, "", {"solver", "splitting", "lnls", "kopt", "sa_reg", "sa", "bench"});
    Defaults d = builtin_defaults();

    if (const auto* t = section(root, "solver")) {
        check_keys(*t, "solver.", {"num_reads", "sweeps", "beta_start", "beta_end", "schedule"});
        read_int(*t, "solver", "num_reads", d.solver.num_reads);
        read_int(*t, "solver", "sweeps", d.solver.sweeps);
        read_double(*t, "solver", "beta_start", d.solver.beta_start);
        read_double(*t, "solver", "beta_end", d.solver.beta_end);
        std::string schedule = "geometric";
        read_string(*t, "solver", "schedule", schedule);
        if (schedule == "geometric") d.solver.schedule = BetaScheduleKind::geometric;
        else if (schedule == "linear") d.solver.schedule = BetaScheduleKind::linear;
        else fail("solver.schedule", "must be \"geometric\" or \"linear\"");
    }
    if (const auto* t = section(root, "splitting")) {
        check_keys(*t, "splitting.", {"maxiter", "maxsubiter", "lambda", "gradient_factor_two", "diagonal_shift"});
        read_int(*t, "splitting", "maxiter", d.splitting.maxiter);
        read_int(*t, "splitting", "maxsubiter", d.splitting.maxsubiter);
        std::string lambda = d.splitting.lambda.to_string();
        read_string(*t, "splitting", "lambda", lambda);
        d.splitting.lambda = LambdaPolicy::parse(lambda);
        read_bool(*t, "splitting", "gradient_factor_two", d.splitting.gradient_factor_two);
        read_double(*t, "splitting", "diagonal_shift", d.splitting.diagonal_shift);
    }
    if (const auto* t = section(root, "lnls")) {
        check_keys(*t, "lnls.", {"m", "maxiter"});
        read_int(*t, "lnls", "m", d.lnls.m);
        read_int(*t, "lnls", "maxiter", d.lnls.maxiter);
    }
    if (const auto* t = section(root, "kopt")) {
        check_keys(*t, "kopt.", {"k", "max_scans"});
        read_int(*t, "kopt", "k", d.kopt_k);
        read_int(*t, "kopt", "max_scans", d.kopt_max_scans);
    }
    if (const auto* t = section(root, "sa_reg")) {
        check_keys(*t, "sa_reg.", {"temperature_c", "subset_size", "maxiter"});
        read_double(*t, "sa_reg", "temperature_c", d.sa_reg.temperature_c);
        read_int(*t, "sa_reg", "subset_size", d.sa_reg.subset_size);
        read_int(*t, "sa_reg", "maxiter", d.sa_reg_maxiter);
    }
    if (const auto* t = section(root, "sa")) {
        check_keys(*t, "sa.", {"calls"});
        read_int(*t, "sa", "calls", d.sa_calls);
    }
    if (const auto* t = section(root, "bench")) {
        check_keys(*t, "bench.", {"topology", "reg_sizes", "min_n", "max_n"});
        read_string(*t, "bench", "topology", d.topology);
        TopologySpec::parse(d.topology);
        if (const auto* node = t->get("reg_sizes")) {
            if (const auto* arr = node->as_array()) {
                d.reg_sizes.clear();
                for (const auto& el : *arr) {
                    const auto v = el.value<std::int64_t>();
                    if (!v || !el.is_integer() || *v < 2) fail("bench.reg_sizes", "entries must be integers >= 2");
                    d.reg_sizes.push_back(static_cast<int>(*v));
                }
            } else if (const auto* range = node->as_table()) {
                check_keys(*range, "bench.reg_sizes.", {"start", "stop", "step"});
                int start = 10, stop = 270, step = 10;
                read_int(*range, "bench.reg_sizes", "start", start);
                read_int(*range, "bench.reg_sizes", "stop", stop);
                read_int(*range, "bench.reg_sizes", "step", step);
                d.reg_sizes = size_range(start, stop, step);
            } else {
                fail("bench.reg_sizes", "must be an array or a {start, stop, step} table");
            }
        }
        read_int(*t, "bench", "min_n", d.min_n);
        read_int(*t, "bench", "max_n", d.max_n);
    }

    d.solver.validate();
    d.splitting.validate();
    if (d.lnls.m < 1 || d.lnls.maxiter < 0) throw std::invalid_argument("defaults: invalid [lnls] values");
    if (d.kopt_k != 1 && d.kopt_k != 2) fail("kopt.k", "must be 1 or 2");
    if (d.sa_calls < 1 || d.sa_reg_maxiter < 0) throw std::invalid_argument("defaults: invalid call budgets");
    return d;
}

Defaults load_defaults_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open defaults file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_defaults(ss.str());
}

std::string default_config_path() {
    if (const char* env = std::getenv("QSPLIT_DEFAULTS"); env && *env) return env;
    return QSPLIT_DEFAULTS_PATH;
}

} // namespace qsplit
