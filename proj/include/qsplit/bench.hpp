#pragma once

// Benchmark harness: runs (instance x method x seed) cells, writes per-call
// traces and a JSON summary, and turns traces into ratio curves and rank
// tables.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qsplit/config.hpp"
#include "qsplit/instances.hpp"
#include "qsplit/ising.hpp"
#include "qsplit/trace.hpp"

namespace qsplit {

enum class MethodKind { splitting, lnls, kopt, sa_full, sa_restricted, sa_reg };

struct MethodSpec {
    MethodKind kind = MethodKind::splitting;
    std::optional<LambdaPolicy> lambda; // splitting: overrides the run's policy
    std::optional<std::size_t> m;       // lnls: overrides the run's subset size
    std::optional<int> k;               // kopt: overrides the run's k

    /// "splitting[:<lambda policy>]", "lnls[:m]", "kopt[:k]", "sa-full",
    /// "sa-restricted" or "sa-reg".
    static MethodSpec parse(const std::string& text);
    /// Label written to traces, with the run defaults filled in for lnls and
    /// kopt ("lnls:10", "kopt:2"). Splitting keeps its written form.
    std::string label(const Defaults& settings) const;
};

enum class InstanceKind { reg, ising, maxcut };

std::string to_string(InstanceKind kind);
InstanceKind parse_instance_kind(const std::string& text);

struct InstanceMeta {
    std::string name;
    std::size_t n = 0;
    InstanceKind kind = InstanceKind::ising;
    /// Ground-state energy (reg), best known energy (ising) or best known
    /// cut value (maxcut). Absent when unknown or unusable.
    std::optional<double> reference;
    double total_weight = 0.0; // maxcut only
};

struct LoadedInstance {
    InstanceMeta meta;
    IsingModel model;
};

/// "reg:N", "reg:N1,N2,..." or "reg" (the configured sizes) expand to one
/// selector per size; directories expand to their regular files in sorted
/// order; anything else is kept as a file path.
std::vector<std::string> expand_instance_selectors(const std::vector<std::string>& selectors,
                                                   const std::vector<int>& reg_sizes);

/// Name used in traces: "reg:N" for Reg instances, the file stem otherwise.
std::string instance_name(const std::string& selector);

/// Reg instances get the exact oracle as reference. Files ending in .json are
/// Ising models, anything else is read as an MQLib edge list; their
/// references come from `best_known` when present.
LoadedInstance load_instance(const std::string& selector, const BestKnownTable* best_known);

/// Objective value behind the ratio: the energy itself, or the cut value
/// (W - E) / 2 for Max-Cut instances.
double objective_value(const InstanceMeta& meta, double energy);

/// Approximation ratio of `energy`, or nothing when there is no reference.
std::optional<double> instance_ratio(const InstanceMeta& meta, double energy);

struct RunSpec {
    std::vector<std::string> instances; // selectors
    std::vector<MethodSpec> methods;
    Defaults settings = builtin_defaults();
    std::vector<std::uint64_t> seeds{0};
    std::optional<BestKnownTable> best_known;
    /// 0 uses QSPLIT_THREADS, or the hardware concurrency when unset.
    int threads = 0;

    void validate() const;
};

struct CellResult {
    std::string instance;
    std::string method;
    std::uint64_t seed = 0;
    std::vector<TraceRow> rows;
    std::optional<double> final_energy;
    std::optional<double> best_energy;
    std::optional<double> ratio;
    int calls = 0;
    double wall_ms = 0.0;
    std::string error; // empty on success
};

struct RunOutput {
    std::vector<InstanceMeta> instances;
    std::vector<CellResult> cells; // instance-major, then method, then seed
    std::vector<std::string> warnings;
};

/// Number of worker threads for `requested` (see RunSpec::threads).
int resolve_thread_count(int requested);

/// Runs every cell. Failures are recorded in CellResult::error and the run
/// continues. The output does not depend on the number of threads.
RunOutput execute_run(const RunSpec& spec);

/// Runs one method on one loaded instance.
CellResult run_cell(const LoadedInstance& instance, const MethodSpec& method, const Defaults& settings,
                    std::uint64_t seed);

inline constexpr std::string_view kTraceHeader =
    "instance,method,seed,iteration,subiteration,call,lambda,energy,best_energy,wall_ms";

std::string format_trace_csv(const RunOutput& output, bool include_wall_ms = true);
std::string format_summary_json(const RunSpec& spec, const RunOutput& output);

/// Creates `dir` and writes trace.csv and summary.json into it.
void write_run(const std::string& dir, const RunSpec& spec, const RunOutput& output);

// ---------------------------------------------------------------------------
// Post-processing

struct TraceRecord {
    std::string instance;
    std::string method;
    std::uint64_t seed = 0;
    TraceRow row;
};

std::vector<TraceRecord> parse_trace_csv(std::string_view text);

/// Instance metadata from a summary.json document.
std::map<std::string, InstanceMeta> parse_summary_instances(std::string_view json_text);

/// Replaces references of non-Reg instances by the table's usable values.
void apply_best_known(std::map<std::string, InstanceMeta>& metas, const BestKnownTable& table);

struct SizeFilter {
    enum class Op { gt, ge, lt, le, eq } op = Op::gt;
    std::size_t value = 0;

    /// ">150", ">=150", "<150", "<=150", "=150" or "150".
    static SizeFilter parse(const std::string& text);
    bool accepts(std::size_t n) const;
};

enum class GroupBy { method, instance };

struct CurvePoint {
    std::string group;
    int call = 0;
    double mean_ratio = 0.0;
    std::size_t n_instances = 0;
};

struct CurveResult {
    std::vector<CurvePoint> points;
    std::vector<std::string> warnings;
};

/// Mean approximation ratio per solver call. Within an instance the ratio of
/// best_energy is carried forward past the last row of a series and
/// averaged over seeds; the group value is the mean over instances. Reg
/// instances without metadata get the oracle; other instances without a
/// reference are excluded with a warning.
CurveResult compute_curves(const std::vector<TraceRecord>& records, std::map<std::string, InstanceMeta> metas,
                           GroupBy group_by, const std::optional<SizeFilter>& filter = std::nullopt);

std::string format_curves_csv(const CurveResult& curves);

struct RankRow {
    std::string instance;
    std::vector<std::optional<double>> ratio;  // per method
    std::vector<std::optional<double>> energy; // mean final best energy over seeds
};

struct RankTable {
    std::vector<std::string> methods;
    std::vector<RankRow> rows;
    std::vector<std::string> warnings;
};

/// Per-instance final values, rows stably sorted by ascending ratio of
/// `sort_method` (by descending energy when no reference is known; rows
/// without a value for it go last). Empty `sort_method` picks the first
/// method whose label starts with "splitting", else the first method.
RankTable compute_rank(const std::vector<TraceRecord>& records, std::map<std::string, InstanceMeta> metas,
                       const std::string& sort_method = {});

std::string format_rank_csv(const RankTable& table);

struct CompareCounts {
    std::string method_a;
    std::string method_b;
    double factor = 1.001;
    std::size_t better = 0; // a reaches a lower final energy than b
    std::size_t equal = 0;
    std::size_t worse = 0;
    std::size_t better_scaled = 0; // a wins once its energy is improved by the factor
    std::size_t worse_scaled = 0;  // b wins once its energy is improved by the factor
    std::size_t total = 0;
    std::vector<std::string> warnings;
};

/// Pairwise comparison of final best energies (mean over common seeds).
/// "Improved by the factor" moves an energy E to E - (factor - 1) |E|.
CompareCounts compare_methods(const std::vector<TraceRecord>& records, const std::string& method_a,
                              const std::string& method_b, double factor = 1.001);

std::string format_compare_csv(const CompareCounts& counts);

} // namespace qsplit
