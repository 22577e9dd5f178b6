#include "pevca/targets.hpp"

#include "pevca/numfmt.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pevca {

double TargetProfile::at(int k) const {
    if (k < 1 || k > horizon())
        throw std::out_of_range("TargetProfile: period " + std::to_string(k) +
                                " outside 1.." + std::to_string(horizon()));
    return values[static_cast<std::size_t>(k - 1)];
}

TargetProfile triangular_target(double mean_load, double magnitude_fraction,
                                int dip_start, int dip_end, int horizon) {
    if (horizon < 1)
        throw std::invalid_argument("triangular_target: horizon must be positive");
    if (!(dip_start >= 1 && dip_start < dip_end && dip_end <= horizon))
        throw std::invalid_argument("triangular_target: need 1 <= dip_start < dip_end <= horizon");
    if (!(magnitude_fraction >= 0.0 && magnitude_fraction <= 1.0))
        throw std::invalid_argument("triangular_target: magnitude_fraction must be in [0,1]");
    if (!std::isfinite(mean_load))
        throw std::invalid_argument("triangular_target: mean_load must be finite");

    TargetProfile t;
    t.mean_load = mean_load;
    t.values.assign(static_cast<std::size_t>(horizon), mean_load);
    const double low = mean_load * (1.0 - magnitude_fraction);
    const int mid = (dip_start + dip_end) / 2;
    for (int k = dip_start; k <= dip_end; ++k) {
        double v;
        if (k <= mid) {
            const double tt = mid == dip_start
                                  ? 1.0
                                  : static_cast<double>(k - dip_start) / (mid - dip_start);
            v = std::lerp(mean_load, low, tt);
        } else {
            const double tt = static_cast<double>(k - mid) / (dip_end - mid);
            v = std::lerp(low, mean_load, tt);
        }
        t.values[static_cast<std::size_t>(k - 1)] = v;
    }
    return t;
}

TargetProfile constant_target(double level, int horizon) {
    if (horizon < 1)
        throw std::invalid_argument("constant_target: horizon must be positive");
    if (!std::isfinite(level))
        throw std::invalid_argument("constant_target: level must be finite");
    TargetProfile t;
    t.mean_load = level;
    t.values.assign(static_cast<std::size_t>(horizon), level);
    return t;
}

TargetProfile target_from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("target_from_file: cannot open " + path.string());
    TargetProfile t;
    double sum = 0.0;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        double v;
        try {
            v = parse_double(line.substr(start));
        } catch (const std::exception&) {
            throw std::runtime_error("target_from_file: " + path.string() + " line " +
                                     std::to_string(line_no) + " is not a number");
        }
        if (!std::isfinite(v))
            throw std::runtime_error("target_from_file: " + path.string() + " line " +
                                     std::to_string(line_no) + " is not finite");
        t.values.push_back(v);
        sum += v;
    }
    if (t.values.empty())
        throw std::runtime_error("target_from_file: " + path.string() + " holds no values");
    t.mean_load = sum / static_cast<double>(t.values.size());
    return t;
}

void target_to_file(const TargetProfile& target, const std::filesystem::path& path) {
    std::ostringstream out;
    for (double v : target.values) out << format_double(v) << '\n';
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("target_to_file: cannot open " + path.string());
    f << out.str();
    if (!f)
        throw std::runtime_error("target_to_file: write failed for " + path.string());
}

} // namespace pevca
