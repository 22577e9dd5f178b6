#pragma once

#include "pevca/config.hpp"
#include "pevca/population.hpp"
#include "pevca/targets.hpp"

#include <optional>
#include <vector>

namespace pevca {

// Everything one run produces. Immutable once assembled; safe to share.
//
// All series have one entry per period k = 1..T (index k-1). p_series(k) is
// the aggregate load stored after the sweep at k; clearing and next-bid
// entries are only ever present in price mode.
struct SimResult {
    std::vector<int> p_series;
    std::vector<int> p_initial_series;    // uncontrolled aggregate of the initial schedules
    std::vector<int> v_series;            // shift count per period
    std::vector<int> w_series;            // discharge count per period
    std::vector<int> calls_series;        // particles examined per period
    std::vector<std::optional<double>> clearing_series;   // pi*(k)
    std::vector<std::optional<double>> next_bid_series;   // first bid the sweep never reached
    std::vector<ActionEvent> events;      // ordered log, replayable
    Population initial_population;
    Population final_population;
    ControlConfig config;
    TargetProfile target;

    int horizon() const { return static_cast<int>(p_series.size()); }
};

} // namespace pevca
