#pragma once

#include "pevca/controller.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pevca {

inline constexpr int kBundleSchemaVersion = 1;

// A complete, self-describing record of one run.
struct RunBundle {
    int schema_version = kBundleSchemaVersion;
    PopulationParams population;
    ControlConfig control;
    TargetProfile target;
    SimResult result;
};

// Writes `k,p_initial,p,p_star,v,w,calls,clearing_price` plus T rows, LF line
// endings; absent clearing prices serialize as an empty field.
void export_series_csv(const SimResult& result, const std::filesystem::path& path);

struct SeriesTable {
    std::vector<int> k;
    std::vector<int> p_initial;
    std::vector<int> p;
    std::vector<double> p_star;
    std::vector<int> v;
    std::vector<int> w;
    std::vector<int> calls;
    std::vector<std::optional<double>> clearing_price;
};
SeriesTable read_series_csv(const std::filesystem::path& path);

void export_bundle_json(const RunBundle& bundle, const std::filesystem::path& path);
RunBundle import_bundle_json(const std::filesystem::path& path);

// Two bundles of the same scenario (V2G off / on) in one file.
void export_pair_json(const RunBundle& without_v2g, const RunBundle& with_v2g,
                      const std::filesystem::path& path);
std::pair<RunBundle, RunBundle> import_pair_json(const std::filesystem::path& path);

// fig2.svg: load overlay, action counts and both action lattices of the
// with-V2G run; fig3.svg: shift lattice of the V1G-only run; fig4.svg: the
// two (responses, calls) trajectories. Self-contained SVG 1.1, byte-stable
// across invocations.
void emit_figures(const ModeComparison& pair, const std::filesystem::path& out_dir);

// Writes content to a temp file next to `path` and renames it into place, so
// a failure never leaves a partial file behind.
void atomic_write(const std::filesystem::path& path, const std::string& content);

} // namespace pevca
