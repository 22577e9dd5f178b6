#pragma once

#include "pevca/sim_result.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace pevca {

// N x T boolean action matrix with rows ordered by ascending bid price.
// Cell (r, k) is true iff the r-th cheapest particle took an action of
// `kind` in period k+1.
struct Lattice {
    ActionKind kind = ActionKind::Shift;
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> cells;  // row-major
    std::vector<int> row_particle;    // particle id occupying each row

    bool at(int row, int col) const { return cells[static_cast<std::size_t>(row) * cols + col] != 0; }
    void set(int row, int col) { cells[static_cast<std::size_t>(row) * cols + col] = 1; }
};

Lattice action_lattice(const SimResult& result, ActionKind kind);

struct TrajectoryPoint {
    double responses = 0.0;  // v(k) + w(k)
    double calls = 0.0;
};

// One point per period in time order: (responses, calls).
std::vector<TrajectoryPoint> trajectory(const SimResult& result);

// Absolute shoelace area of the closed polygon traced by the points in
// order (closing last to first); 0 for fewer than 3 points.
double loop_area(const std::vector<TrajectoryPoint>& points);

// Fraction of discharge cells sitting at the wave front of the shift
// lattice. Per column the front is the deepest (highest-row) shift cell; a
// discharge cell counts when its row is within the top decile of the rows
// the shifts cover in that column, or beyond them. Columns without shifts
// count every discharge. 0 when there are no discharge cells.
double wavefront_concentration(const Lattice& shifts, const Lattice& discharges);

struct RunSummary {
    long long total_shifts = 0;
    long long total_discharges = 0;
    double discharge_shift_ratio = 0.0;  // 0 when both totals are 0
    int max_calls = 0;
    int peak_responses = 0;
    std::optional<double> calls_at_half_peak;
    double tracking_error = 0.0;         // sum over k of max(0, p(k) - p*(k))
};

RunSummary summarize(const SimResult& result);

// Interpolated calls(k) where v(k)+w(k) first reaches `level` scanning
// forward in time; empty when the level is never reached.
std::optional<double> calls_at_response_level(const SimResult& result, double level);

} // namespace pevca
