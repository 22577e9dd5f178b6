#include <doctest.h>

#include "pevca/controller.hpp"
#include "pevca/persistence.hpp"
#include "test_util.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

using namespace pevca;
using testutil::particle;

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

RunBundle sample_bundle(std::uint64_t seed, bool v2g) {
    const PopulationParams params{20, 0.4, 8, seed};
    const TargetProfile target = triangular_target(8.0, 0.75, 2, 7, 8);
    ControlConfig cfg;
    cfg.v2g_enabled = v2g;
    RunBundle bundle;
    bundle.population = params;
    bundle.result = run(generate_population(params), target, cfg);
    bundle.control = bundle.result.config;
    bundle.target = bundle.result.target;
    return bundle;
}

} // namespace

TEST_CASE("series CSV has the fixed header and one row per period") {
    const testutil::TempDir dir("csv");

    SUBCASE("a two-period run gives three lines") {
        const SimResult r = run(generate_population(2, 0.0, 2, 1),
                                constant_target(0.0, 2), ControlConfig{});
        const auto path = dir.path / "series.csv";
        export_series_csv(r, path);
        const auto lines = lines_of(slurp(path));
        REQUIRE(lines.size() == 3);
        CHECK(lines[0] == "k,p_initial,p,p_star,v,w,calls,clearing_price");
        CHECK(lines[1] == "1,0,0,0,0,0,0,");
        CHECK(lines[2] == "2,0,0,0,0,0,0,");
    }
    SUBCASE("the three-particle trace lands in row one") {
        const SimResult r = run(testutil::three_particles(), constant_target(1.0, 5),
                                ControlConfig{});
        const auto path = dir.path / "trace.csv";
        export_series_csv(r, path);
        const auto lines = lines_of(slurp(path));
        REQUIRE(lines.size() == 6);
        CHECK(lines[1] == "1,2,1,1,1,0,1,0.1");
        CHECK(lines[2] == "2,0,1,1,0,0,0,");
    }
    SUBCASE("reading back reproduces every column") {
        ControlConfig cfg;
        cfg.v2g_enabled = true;
        const SimResult r = run(generate_population(30, 0.4, 10, 2),
                                triangular_target(12.0, 0.6, 2, 9, 10), cfg);
        const auto path = dir.path / "roundtrip.csv";
        export_series_csv(r, path);
        const SeriesTable table = read_series_csv(path);
        REQUIRE(table.k.size() == 10);
        for (int i = 0; i < 10; ++i) {
            const std::size_t idx = static_cast<std::size_t>(i);
            CHECK(table.k[idx] == i + 1);
            CHECK(table.p_initial[idx] == r.p_initial_series[idx]);
            CHECK(table.p[idx] == r.p_series[idx]);
            CHECK(table.p_star[idx] == r.target.values[idx]);
            CHECK(table.v[idx] == r.v_series[idx]);
            CHECK(table.w[idx] == r.w_series[idx]);
            CHECK(table.calls[idx] == r.calls_series[idx]);
            CHECK(table.clearing_price[idx] == r.clearing_series[idx]);
        }
    }
    SUBCASE("a wrong header is rejected") {
        const auto path = dir.path / "bad.csv";
        std::ofstream(path) << "k,p\n1,2\n";
        CHECK_THROWS_AS(read_series_csv(path), std::runtime_error);
    }
}

TEST_CASE("bundles survive a JSON round trip bit-exactly") {
    const testutil::TempDir dir("bundle");
    const RunBundle bundle = sample_bundle(5, true);
    const auto path = dir.path / "bundle.json";
    export_bundle_json(bundle, path);
    const RunBundle back = import_bundle_json(path);

    CHECK(back.schema_version == kBundleSchemaVersion);
    CHECK(back.population.n_particles == bundle.population.n_particles);
    CHECK(back.population.density == bundle.population.density);
    CHECK(back.population.horizon == bundle.population.horizon);
    CHECK(back.population.seed == bundle.population.seed);
    CHECK(back.control.mode == bundle.control.mode);
    CHECK(back.control.v2g_enabled == bundle.control.v2g_enabled);
    CHECK(back.control.require_prior_charge == bundle.control.require_prior_charge);
    CHECK(back.control.max_discharges_per_particle ==
          bundle.control.max_discharges_per_particle);
    CHECK(back.target.values == bundle.target.values);
    CHECK(back.target.mean_load == bundle.target.mean_load);

    const SimResult& a = back.result;
    const SimResult& b = bundle.result;
    CHECK(a.p_series == b.p_series);
    CHECK(a.p_initial_series == b.p_initial_series);
    CHECK(a.v_series == b.v_series);
    CHECK(a.w_series == b.w_series);
    CHECK(a.calls_series == b.calls_series);
    CHECK(a.clearing_series == b.clearing_series);
    CHECK(a.next_bid_series == b.next_bid_series);
    CHECK(a.events == b.events);
    CHECK(a.initial_population == b.initial_population);
    CHECK(a.final_population == b.final_population);
    CHECK(a.target.values == b.target.values);

    // Export of the re-imported bundle is byte-identical.
    const auto again = dir.path / "again.json";
    export_bundle_json(back, again);
    CHECK(slurp(again) == slurp(path));
}

TEST_CASE("bundle import rejects damaged input") {
    const testutil::TempDir dir("badbundle");
    const RunBundle bundle = sample_bundle(6, false);
    const auto path = dir.path / "bundle.json";
    export_bundle_json(bundle, path);

    SUBCASE("truncation is a parse error") {
        const std::string text = slurp(path);
        std::ofstream(dir.path / "cut.json", std::ios::binary)
            << text.substr(0, text.size() / 2);
        CHECK_THROWS_AS(import_bundle_json(dir.path / "cut.json"), std::runtime_error);
    }
    SUBCASE("unknown schema versions are named in the error") {
        std::string text = slurp(path);
        const std::string needle = "\"version\":1";
        const std::size_t pos = text.find(needle);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, needle.size(), "\"version\":99");
        std::ofstream(dir.path / "v99.json", std::ios::binary) << text;
        try {
            import_bundle_json(dir.path / "v99.json");
            FAIL("expected a version error");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("version") != std::string::npos);
        }
    }
    SUBCASE("a tampered series is caught by validation") {
        std::string text = slurp(path);
        const std::string needle = "\"p_initial\":[";
        const std::size_t pos = text.find(needle);
        REQUIRE(pos != std::string::npos);
        text.insert(pos + needle.size(), "7777,");
        std::ofstream(dir.path / "tampered.json", std::ios::binary) << text;
        CHECK_THROWS_AS(import_bundle_json(dir.path / "tampered.json"),
                        std::runtime_error);
    }
    SUBCASE("missing files fail loudly") {
        CHECK_THROWS_AS(import_bundle_json(dir.path / "nope.json"), std::runtime_error);
    }
}

TEST_CASE("pair bundles carry both runs") {
    const testutil::TempDir dir("pair");
    const RunBundle a = sample_bundle(7, false);
    const RunBundle b = sample_bundle(7, true);
    const auto path = dir.path / "pair.json";
    export_pair_json(a, b, path);
    const auto [back_a, back_b] = import_pair_json(path);
    CHECK(back_a.result.p_series == a.result.p_series);
    CHECK(back_a.result.events == a.result.events);
    CHECK_FALSE(back_a.control.v2g_enabled);
    CHECK(back_b.result.p_series == b.result.p_series);
    CHECK(back_b.result.events == b.result.events);
    CHECK(back_b.control.v2g_enabled);

    std::ofstream(dir.path / "plain.json") << "{\"schema\":\"other\"}";
    CHECK_THROWS_AS(import_pair_json(dir.path / "plain.json"), std::runtime_error);
}

TEST_CASE("atomic_write leaves no trace on failure") {
    const testutil::TempDir dir("atomic");
    atomic_write(dir.path / "ok.txt", "content");
    CHECK(slurp(dir.path / "ok.txt") == "content");
    CHECK_FALSE(std::filesystem::exists(dir.path / "ok.txt.tmp"));

    const auto missing = dir.path / "no_such_dir" / "f.txt";
    CHECK_THROWS_AS(atomic_write(missing, "x"), std::runtime_error);
    CHECK_FALSE(std::filesystem::exists(missing));
}

TEST_CASE("figures are emitted deterministically") {
    const testutil::TempDir dir("figs");
    const PopulationParams params{40, 0.3, 12, 4};
    const TargetProfile target = triangular_target(12.0, 0.6, 3, 10, 12);
    const ModeComparison pair = compare_modes(params, target, ControlConfig{});

    emit_figures(pair, dir.path);
    for (const char* name : {"fig2.svg", "fig3.svg", "fig4.svg"}) {
        const std::string text = slurp(dir.path / name);
        CHECK(text.rfind("<svg", 0) == 0);
        CHECK(text.find("</svg>") != std::string::npos);
    }

    const std::string fig4 = slurp(dir.path / "fig4.svg");
    CHECK(count_of(fig4, "<polyline") == 2);

    // Re-emitting reproduces the same bytes.
    const std::string fig2_before = slurp(dir.path / "fig2.svg");
    const std::string fig3_before = slurp(dir.path / "fig3.svg");
    emit_figures(pair, dir.path);
    CHECK(slurp(dir.path / "fig2.svg") == fig2_before);
    CHECK(slurp(dir.path / "fig3.svg") == fig3_before);
    CHECK(slurp(dir.path / "fig4.svg") == fig4);

    // The empty scenario still yields well-formed figures.
    const ModeComparison zero = compare_modes(PopulationParams{3, 0.0, 5, 1},
                                              constant_target(0.0, 5), ControlConfig{});
    emit_figures(zero, dir.path);
    CHECK(count_of(slurp(dir.path / "fig4.svg"), "<polyline") == 2);
}
