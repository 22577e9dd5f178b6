#include "pevca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pevca {

Lattice action_lattice(const SimResult& result, ActionKind kind) {
    const Population& pop = result.initial_population;
    Lattice lat;
    lat.kind = kind;
    lat.rows = pop.size();
    lat.cols = result.horizon();
    lat.cells.assign(static_cast<std::size_t>(lat.rows) * lat.cols, 0);
    lat.row_particle = bid_sorted_ids(pop);

    std::vector<int> row_of(static_cast<std::size_t>(lat.rows) + 1, 0);
    for (int r = 0; r < lat.rows; ++r)
        row_of[static_cast<std::size_t>(lat.row_particle[static_cast<std::size_t>(r)])] = r;

    for (const ActionEvent& e : result.events)
        if (e.kind == kind)
            lat.set(row_of[static_cast<std::size_t>(e.particle_id)], e.time - 1);
    return lat;
}

std::vector<TrajectoryPoint> trajectory(const SimResult& result) {
    std::vector<TrajectoryPoint> points;
    points.reserve(static_cast<std::size_t>(result.horizon()));
    for (int i = 0; i < result.horizon(); ++i) {
        const std::size_t idx = static_cast<std::size_t>(i);
        points.push_back({static_cast<double>(result.v_series[idx] + result.w_series[idx]),
                          static_cast<double>(result.calls_series[idx])});
    }
    return points;
}

double loop_area(const std::vector<TrajectoryPoint>& points) {
    const std::size_t n = points.size();
    if (n < 3) return 0.0;
    double twice_area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const TrajectoryPoint& a = points[i];
        const TrajectoryPoint& b = points[(i + 1) % n];
        twice_area += a.responses * b.calls - b.responses * a.calls;
    }
    return std::abs(twice_area) / 2.0;
}

double wavefront_concentration(const Lattice& shifts, const Lattice& discharges) {
    if (shifts.rows != discharges.rows || shifts.cols != discharges.cols)
        throw std::invalid_argument("wavefront_concentration: lattice dimensions differ");

    // Deepest shift row per column; -1 where the column has no shifts.
    std::vector<int> frontier(static_cast<std::size_t>(shifts.cols), -1);
    for (int r = 0; r < shifts.rows; ++r)
        for (int c = 0; c < shifts.cols; ++c)
            if (shifts.at(r, c)) frontier[static_cast<std::size_t>(c)] = r;

    long long total = 0;
    long long hits = 0;
    for (int r = 0; r < discharges.rows; ++r) {
        for (int c = 0; c < discharges.cols; ++c) {
            if (!discharges.at(r, c)) continue;
            ++total;
            const int f = frontier[static_cast<std::size_t>(c)];
            // Top decile of the covered rows, exact in integers, or deeper.
            if (f < 0 || 10LL * (r + 1) >= 9LL * (f + 1)) ++hits;
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

std::optional<double> calls_at_response_level(const SimResult& result, double level) {
    const int t = result.horizon();
    for (int i = 0; i < t; ++i) {
        const std::size_t idx = static_cast<std::size_t>(i);
        const double resp = result.v_series[idx] + result.w_series[idx];
        if (resp < level) continue;
        if (i == 0) return static_cast<double>(result.calls_series[idx]);
        const std::size_t prev = idx - 1;
        const double r0 = result.v_series[prev] + result.w_series[prev];
        const double c0 = result.calls_series[prev];
        const double c1 = result.calls_series[idx];
        const double frac = (level - r0) / (resp - r0);
        return c0 + frac * (c1 - c0);
    }
    return std::nullopt;
}

RunSummary summarize(const SimResult& result) {
    RunSummary s;
    for (int i = 0; i < result.horizon(); ++i) {
        const std::size_t idx = static_cast<std::size_t>(i);
        s.total_shifts += result.v_series[idx];
        s.total_discharges += result.w_series[idx];
        s.max_calls = std::max(s.max_calls, result.calls_series[idx]);
        s.peak_responses =
            std::max(s.peak_responses, result.v_series[idx] + result.w_series[idx]);
        s.tracking_error +=
            std::max(0.0, result.p_series[idx] - result.target.values[idx]);
    }
    if (s.total_shifts > 0)
        s.discharge_shift_ratio =
            static_cast<double>(s.total_discharges) / static_cast<double>(s.total_shifts);
    else if (s.total_discharges > 0)
        s.discharge_shift_ratio = std::numeric_limits<double>::infinity();
    if (s.peak_responses > 0)
        s.calls_at_half_peak =
            calls_at_response_level(result, 0.5 * static_cast<double>(s.peak_responses));
    return s;
}

} // namespace pevca
