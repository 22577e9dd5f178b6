#pragma once

#include <optional>
#include <vector>

// Straightforward re-implementation of the control sweep, executed
// symbol-by-symbol with no caching: the aggregate load is recomputed by a
// full sum on every inspection. Kept deliberately independent of the library
// so the two can be compared cell by cell.
namespace oracle {

struct Particle {
    int id = 0;
    double bid = 0.0;
    std::vector<int> demand;
};

struct Config {
    bool price_mode = true;
    bool v2g = false;
    bool require_prior_charge = false;
    int max_discharges = -1;  // -1: unlimited
};

struct Action {
    int kind = 0;  // 0 shift, 1 discharge
    int id = 0;
    int k = 0;

    friend bool operator==(const Action&, const Action&) = default;
};

struct StepOutcome {
    std::vector<Action> actions;
    int calls = 0;
    std::optional<double> clearing;
    std::optional<double> next_bid;
    int final_load = 0;
};

class Simulator {
public:
    Simulator(std::vector<Particle> particles, Config config);

    // One sweep at period k (1-based). target holds one value per period.
    StepOutcome step(const std::vector<double>& target, int k);

    // Sum over particles of d_n(k), recomputed from scratch.
    int load(int k) const;

    const std::vector<Particle>& particles() const { return parts_; }

private:
    std::vector<Particle> parts_;
    std::vector<int> discharges_used_;
    Config cfg_;
};

} // namespace oracle
