#include "pevca/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace pevca {

namespace {

// 53-bit mantissa draw, uniform on [0,1). Fixed mapping so the same seed
// reproduces the same population on any platform.
double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

Population::Population(std::vector<ParticleSchedule> particles)
    : particles_(std::move(particles)) {
    const int n = size();
    horizon_ = n > 0 ? static_cast<int>(particles_[0].demand.size()) : 0;
    for (int i = 0; i < n; ++i) {
        ParticleSchedule& p = particles_[static_cast<std::size_t>(i)];
        if (p.id != i + 1)
            throw std::invalid_argument("Population: particle ids must be 1..N in order");
        if (static_cast<int>(p.demand.size()) != horizon_)
            throw std::invalid_argument("Population: all demand vectors must have equal length");
        if (!(std::isfinite(p.bid) && p.bid >= 0.0 && p.bid < 1.0))
            throw std::invalid_argument("Population: bid must be in [0,1)");
        for (std::int8_t d : p.demand)
            if (d < -1 || d > 1)
                throw std::invalid_argument("Population: demand values must be in {-1,0,1}");
    }
    aggregate_.assign(static_cast<std::size_t>(horizon_), 0);
    for (const ParticleSchedule& p : particles_)
        for (int k = 0; k < horizon_; ++k)
            aggregate_[static_cast<std::size_t>(k)] += p.demand[static_cast<std::size_t>(k)];
    for (ParticleSchedule& p : particles_) {
        p.has_charged_by.assign(static_cast<std::size_t>(horizon_), 0);
        refresh_charged_from(p, 1);
    }
    discharge_counts_.assign(static_cast<std::size_t>(n), 0);
}

const ParticleSchedule& Population::checked(int id) const {
    if (id < 1 || id > size())
        throw std::out_of_range("Population: particle id " + std::to_string(id) +
                                " outside 1.." + std::to_string(size()));
    return particles_[static_cast<std::size_t>(id - 1)];
}

void Population::check_time(int k) const {
    if (k < 1 || k > horizon_)
        throw std::out_of_range("Population: period " + std::to_string(k) +
                                " outside 1.." + std::to_string(horizon_));
}

const ParticleSchedule& Population::particle(int id) const { return checked(id); }

int Population::demand(int id, int k) const {
    const ParticleSchedule& p = checked(id);
    check_time(k);
    return p.demand[static_cast<std::size_t>(k - 1)];
}

int Population::aggregate(int k) const {
    check_time(k);
    return aggregate_[static_cast<std::size_t>(k - 1)];
}

bool Population::has_charged_by(int id, int k) const {
    const ParticleSchedule& p = checked(id);
    check_time(k);
    return p.has_charged_by[static_cast<std::size_t>(k - 1)] != 0;
}

int Population::discharge_count(int id) const {
    checked(id);
    return discharge_counts_[static_cast<std::size_t>(id - 1)];
}

bool Population::can_shift(int id, int k) const {
    const ParticleSchedule& p = checked(id);
    if (k < 1 || k > horizon_ - 1) return false;
    return p.demand[static_cast<std::size_t>(k - 1)] == 1 &&
           p.demand[static_cast<std::size_t>(k)] == 0;
}

bool Population::can_discharge(int id, int k, bool require_prior_charge) const {
    const ParticleSchedule& p = checked(id);
    if (k < 1 || k > horizon_ - 1) return false;
    if (p.demand[static_cast<std::size_t>(k - 1)] != 0 ||
        p.demand[static_cast<std::size_t>(k)] != 0)
        return false;
    if (require_prior_charge && p.has_charged_by[static_cast<std::size_t>(k - 1)] == 0)
        return false;
    return true;
}

void Population::refresh_charged_from(ParticleSchedule& p, int k) {
    bool seen = k >= 2 && p.has_charged_by[static_cast<std::size_t>(k - 2)] != 0;
    for (int j = k; j <= horizon_; ++j) {
        seen = seen || p.demand[static_cast<std::size_t>(j - 1)] == 1;
        p.has_charged_by[static_cast<std::size_t>(j - 1)] = seen ? 1 : 0;
    }
}

ActionEvent Population::apply_shift(int id, int k) {
    checked(id);
    if (k < 1 || k > horizon_ - 1)
        throw std::out_of_range("apply_shift: period " + std::to_string(k) +
                                " outside 1.." + std::to_string(horizon_ - 1));
    ParticleSchedule& p = particles_[static_cast<std::size_t>(id - 1)];
    if (p.demand[static_cast<std::size_t>(k - 1)] != 1 ||
        p.demand[static_cast<std::size_t>(k)] != 0)
        throw std::logic_error("apply_shift: particle " + std::to_string(id) +
                               " needs d(k)=1 and d(k+1)=0 at k=" + std::to_string(k));
    p.demand[static_cast<std::size_t>(k - 1)] = 0;
    p.demand[static_cast<std::size_t>(k)] = 1;
    --aggregate_[static_cast<std::size_t>(k - 1)];
    ++aggregate_[static_cast<std::size_t>(k)];
    refresh_charged_from(p, k);
    return ActionEvent{id, k, ActionKind::Shift};
}

ActionEvent Population::apply_discharge(int id, int k, bool require_prior_charge) {
    checked(id);
    if (k < 1 || k > horizon_ - 1)
        throw std::out_of_range("apply_discharge: period " + std::to_string(k) +
                                " outside 1.." + std::to_string(horizon_ - 1));
    ParticleSchedule& p = particles_[static_cast<std::size_t>(id - 1)];
    if (p.demand[static_cast<std::size_t>(k - 1)] != 0 ||
        p.demand[static_cast<std::size_t>(k)] != 0)
        throw std::logic_error("apply_discharge: particle " + std::to_string(id) +
                               " needs d(k)=0 and d(k+1)=0 at k=" + std::to_string(k));
    if (require_prior_charge && p.has_charged_by[static_cast<std::size_t>(k - 1)] == 0)
        throw std::logic_error("apply_discharge: particle " + std::to_string(id) +
                               " has no realized charge by k=" + std::to_string(k));
    p.demand[static_cast<std::size_t>(k - 1)] = -1;
    p.demand[static_cast<std::size_t>(k)] = 1;
    --aggregate_[static_cast<std::size_t>(k - 1)];
    ++aggregate_[static_cast<std::size_t>(k)];
    ++discharge_counts_[static_cast<std::size_t>(id - 1)];
    refresh_charged_from(p, k);
    return ActionEvent{id, k, ActionKind::Discharge};
}

bool operator==(const Population& a, const Population& b) {
    if (a.size() != b.size() || a.horizon_ != b.horizon_) return false;
    for (int i = 0; i < a.size(); ++i) {
        const ParticleSchedule& pa = a.particles_[static_cast<std::size_t>(i)];
        const ParticleSchedule& pb = b.particles_[static_cast<std::size_t>(i)];
        if (pa.id != pb.id || pa.bid != pb.bid || pa.demand != pb.demand) return false;
    }
    return true;
}

std::vector<int> bid_sorted_ids(const Population& pop) {
    std::vector<int> ids(static_cast<std::size_t>(pop.size()));
    std::iota(ids.begin(), ids.end(), 1);
    std::sort(ids.begin(), ids.end(), [&pop](int a, int b) {
        const double ba = pop.particle(a).bid;
        const double bb = pop.particle(b).bid;
        return ba != bb ? ba < bb : a < b;
    });
    return ids;
}

Population generate_population(int n_particles, double density, int horizon,
                               std::uint64_t seed) {
    if (n_particles < 1)
        throw std::invalid_argument("generate_population: n_particles must be positive");
    if (!(density >= 0.0 && density <= 1.0))
        throw std::invalid_argument("generate_population: density must be in [0,1]");
    if (horizon < 2)
        throw std::invalid_argument("generate_population: horizon must be at least 2");
    std::mt19937_64 rng(seed);
    std::vector<ParticleSchedule> particles(static_cast<std::size_t>(n_particles));
    for (int i = 0; i < n_particles; ++i) {
        ParticleSchedule& p = particles[static_cast<std::size_t>(i)];
        p.id = i + 1;
        p.demand.resize(static_cast<std::size_t>(horizon));
        for (int k = 0; k < horizon; ++k)
            p.demand[static_cast<std::size_t>(k)] = next_unit(rng) < density ? 1 : 0;
        p.bid = next_unit(rng);
    }
    return Population(std::move(particles));
}

Population generate_population(const PopulationParams& params) {
    return generate_population(params.n_particles, params.density, params.horizon,
                               params.seed);
}

} // namespace pevca
