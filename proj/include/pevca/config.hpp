#pragma once

#include <cstdint>
#include <optional>

namespace pevca {

enum class ControlMode { Direct, Price };

// Parameters of the random initial population.
struct PopulationParams {
    int n_particles = 5000;
    double density = 0.167;   // probability that a slot holds a scheduled charge
    int horizon = 100;        // number of periods T
    std::uint64_t seed = 1;
};

// Fixed per-run controller settings.
struct ControlConfig {
    ControlMode mode = ControlMode::Price;
    bool v2g_enabled = false;
    bool require_prior_charge = false;
    // Cap on discharge actions per particle; unlimited when unset.
    std::optional<int> max_discharges_per_particle;
    // Seed of the population this run controls; carried into outputs.
    std::uint64_t seed = 1;
};

} // namespace pevca
