#pragma once

#include "pevca/config.hpp"

#include <cstdint>
#include <vector>

namespace pevca {

enum class ActionKind { Shift, Discharge };

struct ActionEvent {
    int particle_id = 0;                  // 1..N
    int time = 0;                         // period k the action was taken in
    ActionKind kind = ActionKind::Shift;

    friend bool operator==(const ActionEvent&, const ActionEvent&) = default;
};

// One vehicle: a demand vector over the horizon plus a fixed bid price.
//
// demand[k-1] is the output in period k, one charging quantum per period,
// always in {-1, 0, 1}. has_charged_by[k-1] is true iff the current schedule
// holds a +1 somewhere in periods 1..k; Population keeps it in sync after
// every mutation.
struct ParticleSchedule {
    int id = 0;            // 1..N
    double bid = 0.0;      // [0, 1), fixed for the whole run
    std::vector<std::int8_t> demand;
    std::vector<std::uint8_t> has_charged_by;
};

// N particle schedules with a cached aggregate load vector.
//
// The two atomic mutations (apply_shift, apply_discharge) are the only
// sanctioned way to change schedules; they keep the aggregate cache, the
// prior-charge flags and the per-particle discharge counters coherent.
// Single-owner mutable object: not safe for concurrent mutation.
class Population {
public:
    Population() = default;

    // Takes ownership of hand-built schedules. Ids must be exactly 1..N in
    // order, demand vectors equal length with entries in {-1,0,1}, bids
    // finite in [0,1). has_charged_by is recomputed, any provided content
    // is ignored.
    explicit Population(std::vector<ParticleSchedule> particles);

    int size() const { return static_cast<int>(particles_.size()); }
    int horizon() const { return horizon_; }

    const ParticleSchedule& particle(int id) const;
    const std::vector<ParticleSchedule>& particles() const { return particles_; }

    // d_n(k), 1-based period index.
    int demand(int id, int k) const;
    // Aggregate load p(k) from the cache; equals the sum over particles.
    int aggregate(int k) const;
    const std::vector<int>& aggregate_series() const { return aggregate_; }

    bool has_charged_by(int id, int k) const;
    // Number of discharges applied to this object since construction.
    int discharge_count(int id) const;

    bool can_shift(int id, int k) const;
    bool can_discharge(int id, int k, bool require_prior_charge) const;

    // Move a scheduled charge one period later: d(k)=1,d(k+1)=0 becomes 0,1.
    // Throws std::logic_error if the particle is not eligible.
    ActionEvent apply_shift(int id, int k);

    // Discharge one quantum now and recharge next period: d(k)=0,d(k+1)=0
    // becomes -1,1. With require_prior_charge the particle must already hold
    // a realized charge in 1..k.
    ActionEvent apply_discharge(int id, int k, bool require_prior_charge);

    // Compares schedules and bids (not discharge counters).
    friend bool operator==(const Population& a, const Population& b);

private:
    const ParticleSchedule& checked(int id) const;
    void check_time(int k) const;
    void refresh_charged_from(ParticleSchedule& p, int k);

    std::vector<ParticleSchedule> particles_;
    std::vector<int> aggregate_;
    std::vector<int> discharge_counts_;
    int horizon_ = 0;
};

// Particle ids sorted by ascending bid price, ties broken by id.
std::vector<int> bid_sorted_ids(const Population& pop);

// Random initial population: each demand slot is independently 1 with
// probability `density`, bids are i.i.d. uniform on [0,1), all drawn from one
// stream seeded with `seed`. Identical inputs yield bit-identical output.
Population generate_population(int n_particles, double density, int horizon,
                               std::uint64_t seed);
Population generate_population(const PopulationParams& params);

} // namespace pevca
