#include "pevca/controller.hpp"

#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

namespace pevca {

namespace {

std::vector<int> visit_order(const Population& pop, ControlMode mode) {
    if (mode == ControlMode::Price) return bid_sorted_ids(pop);
    std::vector<int> ids(static_cast<std::size_t>(pop.size()));
    std::iota(ids.begin(), ids.end(), 1);
    return ids;
}

bool discharge_allowed(const Population& pop, int id, int k, const ControlConfig& cfg) {
    if (!pop.can_discharge(id, k, cfg.require_prior_charge)) return false;
    if (cfg.max_discharges_per_particle &&
        pop.discharge_count(id) >= *cfg.max_discharges_per_particle)
        return false;
    return true;
}

StepReport step_impl(Population& pop, const TargetProfile& target, int k,
                     const ControlConfig& cfg, const std::vector<int>& order) {
    StepReport rep;
    rep.k = k;
    const double star = target.at(k);
    const int n = pop.size();
    int stopped_at = n;
    for (int i = 0; i < n; ++i) {
        if (!(pop.aggregate(k) > star)) {
            stopped_at = i;
            break;
        }
        const int id = order[static_cast<std::size_t>(i)];
        ++rep.calls;
        if (pop.can_shift(id, k)) {
            rep.actions.push_back(pop.apply_shift(id, k));
        } else if (cfg.v2g_enabled && discharge_allowed(pop, id, k, cfg)) {
            rep.actions.push_back(pop.apply_discharge(id, k, cfg.require_prior_charge));
        }
    }
    rep.final_load = pop.aggregate(k);
    if (cfg.mode == ControlMode::Price) {
        if (!rep.actions.empty())
            rep.clearing_price = pop.particle(rep.actions.back().particle_id).bid;
        if (stopped_at < n)
            rep.next_bid = pop.particle(order[static_cast<std::size_t>(stopped_at)]).bid;
    }
    return rep;
}

} // namespace

StepReport step(Population& pop, const TargetProfile& target, int k,
                const ControlConfig& cfg) {
    if (pop.horizon() != target.horizon())
        throw std::invalid_argument("step: population and target horizons differ");
    if (k < 1 || k > pop.horizon() - 1)
        throw std::out_of_range("step: period " + std::to_string(k) + " outside 1.." +
                                std::to_string(pop.horizon() - 1));
    return step_impl(pop, target, k, cfg, visit_order(pop, cfg.mode));
}

SimResult run(Population pop, const TargetProfile& target, const ControlConfig& cfg) {
    if (pop.horizon() != target.horizon())
        throw std::invalid_argument("run: population and target horizons differ");
    const int t = pop.horizon();

    SimResult result;
    result.config = cfg;
    result.target = target;
    result.initial_population = pop;
    result.p_initial_series = pop.aggregate_series();
    result.p_series.assign(static_cast<std::size_t>(t), 0);
    result.v_series.assign(static_cast<std::size_t>(t), 0);
    result.w_series.assign(static_cast<std::size_t>(t), 0);
    result.calls_series.assign(static_cast<std::size_t>(t), 0);
    result.clearing_series.assign(static_cast<std::size_t>(t), std::nullopt);
    result.next_bid_series.assign(static_cast<std::size_t>(t), std::nullopt);

    const std::vector<int> order = visit_order(pop, cfg.mode);
    for (int k = 1; k <= t - 1; ++k) {
        StepReport rep = step_impl(pop, target, k, cfg, order);
        const std::size_t idx = static_cast<std::size_t>(k - 1);
        for (const ActionEvent& e : rep.actions)
            (e.kind == ActionKind::Shift ? result.v_series[idx] : result.w_series[idx])++;
        result.calls_series[idx] = rep.calls;
        result.clearing_series[idx] = rep.clearing_price;
        result.next_bid_series[idx] = rep.next_bid;
        result.p_series[idx] = rep.final_load;
        result.events.insert(result.events.end(), rep.actions.begin(), rep.actions.end());
    }
    // No slot T+1 exists, so the last period is recorded without a sweep.
    if (t >= 1)
        result.p_series[static_cast<std::size_t>(t - 1)] = pop.aggregate(t);
    result.final_population = std::move(pop);
    return result;
}

ModeComparison compare_modes(const PopulationParams& pop_params,
                             const TargetProfile& target, ControlConfig cfg) {
    Population base = generate_population(pop_params);
    cfg.seed = pop_params.seed;
    ControlConfig off = cfg;
    off.v2g_enabled = false;
    ControlConfig on = cfg;
    on.v2g_enabled = true;
    ModeComparison cmp;
    cmp.without_v2g = run(base, target, off);
    cmp.with_v2g = run(std::move(base), target, on);
    return cmp;
}

} // namespace pevca
