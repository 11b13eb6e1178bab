#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qsplit {

/// One solver call (or the initial state, iteration 0).
struct TraceRow {
    int iteration = 0;    // outer iteration; 0 is the initial state
    int subiteration = 0; // position within the outer iteration
    int call = 0;         // cumulative inner-solver calls, the x-axis for curves
    std::optional<double> lambda;
    double energy = 0.0;
    double best_energy = 0.0;
    double wall_ms = 0.0;
};

struct Trace {
    std::string instance;
    std::string method;
    std::uint64_t seed = 0;
    std::vector<TraceRow> rows;
};

/// Appends rows with wall time measured from construction.
class TraceRecorder {
public:
    TraceRecorder() : start_(std::chrono::steady_clock::now()) {}

    void record(int iteration, int subiteration, std::optional<double> lambda, double energy,
                double best_energy) {
        if (iteration > 0 || !rows_.empty()) ++calls_;
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        rows_.push_back({iteration, subiteration, calls_, lambda, energy, best_energy,
                         std::chrono::duration<double, std::milli>(elapsed).count()});
    }

    int calls() const noexcept { return calls_; }
    const std::vector<TraceRow>& rows() const noexcept { return rows_; }
    std::vector<TraceRow> take() && { return std::move(rows_); }

private:
    std::chrono::steady_clock::time_point start_;
    std::vector<TraceRow> rows_;
    int calls_ = 0;
};

} // namespace qsplit
