#pragma once

#include "pevca/sim_result.hpp"

#include <optional>
#include <vector>

namespace pevca {

// Outcome of one sweep at period k.
struct StepReport {
    int k = 0;
    std::vector<ActionEvent> actions;
    int calls = 0;                         // particles examined, eligible or not
    std::optional<double> clearing_price;  // price mode: bid of the last applied action
    std::optional<double> next_bid;        // price mode: bid of the first particle never reached
    int final_load = 0;                    // p(k) after the sweep
};

// One sweep at period k. Particles are visited by ascending id in direct
// mode, by ascending bid (ties by id) in price mode; the sweep stops as soon
// as p(k) <= p*(k). Each visited particle counts as a call and acts if it
// can: shift when d(k)=1 and d(k+1)=0, else discharge when V2G is enabled,
// d(k)=d(k+1)=0 and the discharge gates pass.
StepReport step(Population& pop, const TargetProfile& target, int k,
                const ControlConfig& cfg);

// Full run over k = 1..T-1, recording period T with no actions. The caller's
// population is untouched (taken by value); the result holds snapshots of the
// initial and final state. Deterministic given (population, target, cfg).
SimResult run(Population pop, const TargetProfile& target, const ControlConfig& cfg);

struct ModeComparison {
    SimResult without_v2g;
    SimResult with_v2g;
};

// Generates one population from pop_params and runs it twice, with V2G
// disabled and enabled, for differential analysis.
ModeComparison compare_modes(const PopulationParams& pop_params,
                             const TargetProfile& target, ControlConfig cfg);

} // namespace pevca
