#pragma once

#include <filesystem>
#include <vector>

namespace pevca {

// Reference trajectory p*(k) the controller tracks. Immutable after
// construction; freely shareable.
struct TargetProfile {
    std::vector<double> values;   // one entry per period
    double mean_load = 0.0;       // expected uncontrolled aggregate it is relative to

    int horizon() const { return static_cast<int>(values.size()); }
    double at(int k) const;       // 1-based period index
};

// Constant profile equal to mean_load everywhere except a single symmetric
// V-shaped dip: linear descent from mean_load at dip_start down to
// mean_load*(1-magnitude_fraction) at floor((dip_start+dip_end)/2), then
// linear ascent back to mean_load at dip_end.
TargetProfile triangular_target(double mean_load, double magnitude_fraction,
                                int dip_start, int dip_end, int horizon);

TargetProfile constant_target(double level, int horizon);

// One-column header-less CSV, one decimal number per line. mean_load is set
// to the arithmetic mean of the values.
TargetProfile target_from_file(const std::filesystem::path& path);
void target_to_file(const TargetProfile& target, const std::filesystem::path& path);

} // namespace pevca
