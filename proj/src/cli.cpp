#include "pevca/cli.hpp"

#include "pevca/controller.hpp"
#include "pevca/metrics.hpp"
#include "pevca/numfmt.hpp"
#include "pevca/persistence.hpp"
#include "pevca/population.hpp"
#include "pevca/targets.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace pevca {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliOptions {
    int n = 5000;
    double density = 0.167;
    int horizon = 100;
    std::uint64_t seed = 1;
    double fraction = 0.35;
    int dip_start = -1;  // -1: t/5
    int dip_end = -1;    // -1: 4t/5
    std::string mode = "price";
    bool v2g = false;
    bool require_prior_charge = false;
    int max_discharges = 0;
    bool max_discharges_set = false;
    std::string out_dir = "out";
    std::string target_file;
    int seeds = 20;
    int jobs = 0;
};

struct Scenario {
    PopulationParams pop;
    ControlConfig control;
    TargetProfile target;
};

Scenario make_scenario(const CliOptions& o) {
    Scenario s;
    s.pop.n_particles = o.n;
    s.pop.density = o.density;
    s.pop.seed = o.seed;
    if (!o.target_file.empty()) {
        s.target = target_from_file(o.target_file);
        s.pop.horizon = s.target.horizon();
    } else {
        s.pop.horizon = o.horizon;
        const int dip_start = o.dip_start > 0 ? o.dip_start : std::max(1, o.horizon / 5);
        const int dip_end = o.dip_end > 0 ? o.dip_end
                                          : std::max(dip_start + 1, 4 * o.horizon / 5);
        s.target = triangular_target(o.n * o.density, o.fraction, dip_start, dip_end,
                                     o.horizon);
    }
    s.control.mode = o.mode == "direct" ? ControlMode::Direct : ControlMode::Price;
    s.control.v2g_enabled = o.v2g;
    s.control.require_prior_charge = o.require_prior_charge;
    if (o.max_discharges_set) s.control.max_discharges_per_particle = o.max_discharges;
    s.control.seed = o.seed;
    return s;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("n/a");
}

void print_summary(std::ostream& out, const RunSummary& s) {
    out << "  total shifts:        " << s.total_shifts << '\n'
        << "  total discharges:    " << s.total_discharges << '\n'
        << "  discharge/shift:     " << format_double(s.discharge_shift_ratio) << '\n'
        << "  max calls:           " << s.max_calls << '\n'
        << "  peak responses:      " << s.peak_responses << '\n'
        << "  calls at half peak:  " << fmt_opt(s.calls_at_half_peak) << '\n'
        << "  tracking error:      " << format_double(s.tracking_error) << '\n';
}

json finite_or_null(double v) {
    return std::isfinite(v) ? json(v) : json(nullptr);
}

json opt_or_null(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json mode_summary_json(const SimResult& result, double level) {
    const RunSummary s = summarize(result);
    const double area = loop_area(trajectory(result));
    const double wf = wavefront_concentration(action_lattice(result, ActionKind::Shift),
                                              action_lattice(result, ActionKind::Discharge));
    return json{{"total_shifts", s.total_shifts},
                {"total_discharges", s.total_discharges},
                {"discharge_shift_ratio", finite_or_null(s.discharge_shift_ratio)},
                {"max_calls", s.max_calls},
                {"peak_responses", s.peak_responses},
                {"tracking_error", s.tracking_error},
                {"loop_area", area},
                {"wavefront_concentration", wf},
                {"calls_at_level", opt_or_null(calls_at_response_level(result, level))}};
}

RunBundle make_bundle(const PopulationParams& pop, SimResult result) {
    RunBundle bundle;
    bundle.population = pop;
    bundle.control = result.config;
    bundle.target = result.target;
    bundle.result = std::move(result);
    return bundle;
}

int cmd_run(const CliOptions& o, std::ostream& out) {
    const Scenario sc = make_scenario(o);
    SimResult result = run(generate_population(sc.pop), sc.target, sc.control);
    const RunSummary summary = summarize(result);

    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    export_series_csv(result, dir / "series.csv");
    export_bundle_json(make_bundle(sc.pop, std::move(result)), dir / "bundle.json");

    out << "run: n=" << sc.pop.n_particles << " t=" << sc.pop.horizon << " mode="
        << o.mode << " v2g=" << (sc.control.v2g_enabled ? "on" : "off") << " seed="
        << sc.pop.seed << '\n';
    print_summary(out, summary);
    out << "wrote " << (dir / "series.csv").string() << ' '
        << (dir / "bundle.json").string() << '\n';
    return 0;
}

int cmd_compare(const CliOptions& o, std::ostream& out) {
    const Scenario sc = make_scenario(o);
    const ModeComparison pair = compare_modes(sc.pop, sc.target, sc.control);

    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);
    export_series_csv(pair.without_v2g, dir / "series_v1g.csv");
    export_series_csv(pair.with_v2g, dir / "series_v2g.csv");
    export_bundle_json(make_bundle(sc.pop, pair.without_v2g), dir / "bundle_v1g.json");
    export_bundle_json(make_bundle(sc.pop, pair.with_v2g), dir / "bundle_v2g.json");
    emit_figures(pair, dir);

    const double level = 0.5 * summarize(pair.without_v2g).peak_responses;
    json summary{{"response_level", level},
                 {"without_v2g", mode_summary_json(pair.without_v2g, level)},
                 {"with_v2g", mode_summary_json(pair.with_v2g, level)}};
    atomic_write(dir / "summary.json", summary.dump(2) + "\n");

    out << "compare: n=" << sc.pop.n_particles << " t=" << sc.pop.horizon << " mode="
        << o.mode << " seed=" << sc.pop.seed << '\n';
    out << "without v2g:\n";
    print_summary(out, summarize(pair.without_v2g));
    out << "  loop area:           "
        << format_double(loop_area(trajectory(pair.without_v2g))) << '\n';
    out << "with v2g:\n";
    print_summary(out, summarize(pair.with_v2g));
    out << "  loop area:           "
        << format_double(loop_area(trajectory(pair.with_v2g))) << '\n';
    out << "response level (half the v1g peak): " << format_double(level) << '\n'
        << "calls at level: without=" << fmt_opt(calls_at_response_level(pair.without_v2g, level))
        << " with=" << fmt_opt(calls_at_response_level(pair.with_v2g, level)) << '\n';
    out << "wrote series, bundles, fig2-fig4 and summary.json under " << dir.string()
        << '\n';
    return 0;
}

struct SeedRow {
    std::uint64_t seed = 0;
    double level = 0.0;
    RunSummary v1g;
    double v1g_loop = 0.0;
    std::optional<double> v1g_calls_at_level;
    RunSummary v2g;
    double v2g_loop = 0.0;
    std::optional<double> v2g_calls_at_level;
    double v2g_wavefront = 0.0;
};

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
    int count = 0;
};

Stats stats_of(const std::vector<double>& values) {
    Stats s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.count;
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / (s.count - 1));
    }
    return s;
}

int cmd_sweep(const CliOptions& o, std::ostream& out) {
    if (o.seeds < 1) throw std::invalid_argument("--seeds must be at least 1");
    const Scenario sc = make_scenario(o);
    fs::create_directories(o.out_dir);
    const fs::path dir(o.out_dir);

    std::vector<SeedRow> rows(static_cast<std::size_t>(o.seeds));
    int workers = o.jobs > 0 ? o.jobs
                             : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, o.seeds));

    std::atomic<int> next{0};
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));

    auto work = [&](int worker_index) {
        try {
            for (;;) {
                const int i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= o.seeds) return;
                PopulationParams pp = sc.pop;
                pp.seed = o.seed + static_cast<std::uint64_t>(i);
                const ModeComparison pair = compare_modes(pp, sc.target, sc.control);

                SeedRow& row = rows[static_cast<std::size_t>(i)];
                row.seed = pp.seed;
                row.v1g = summarize(pair.without_v2g);
                row.v2g = summarize(pair.with_v2g);
                row.level = 0.5 * row.v1g.peak_responses;
                row.v1g_loop = loop_area(trajectory(pair.without_v2g));
                row.v2g_loop = loop_area(trajectory(pair.with_v2g));
                row.v1g_calls_at_level =
                    calls_at_response_level(pair.without_v2g, row.level);
                row.v2g_calls_at_level =
                    calls_at_response_level(pair.with_v2g, row.level);
                row.v2g_wavefront = wavefront_concentration(
                    action_lattice(pair.with_v2g, ActionKind::Shift),
                    action_lattice(pair.with_v2g, ActionKind::Discharge));

                export_pair_json(make_bundle(pp, pair.without_v2g),
                                 make_bundle(pp, pair.with_v2g),
                                 dir / ("pair_seed" + std::to_string(pp.seed) + ".json"));
            }
        } catch (...) {
            failures[static_cast<std::size_t>(worker_index)] = std::current_exception();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& e : failures)
        if (e) std::rethrow_exception(e);

    std::ostringstream csv;
    csv << "seed,response_level,v1g_shifts,v1g_discharges,v1g_loop_area,v1g_max_calls,"
           "v1g_calls_at_level,v2g_shifts,v2g_discharges,v2g_discharge_shift_ratio,"
           "v2g_loop_area,v2g_max_calls,v2g_calls_at_level,v2g_wavefront\n";
    for (const SeedRow& r : rows) {
        csv << r.seed << ',' << format_double(r.level) << ',' << r.v1g.total_shifts
            << ',' << r.v1g.total_discharges << ',' << format_double(r.v1g_loop) << ','
            << r.v1g.max_calls << ',';
        if (r.v1g_calls_at_level) csv << format_double(*r.v1g_calls_at_level);
        csv << ',' << r.v2g.total_shifts << ',' << r.v2g.total_discharges << ','
            << format_double(r.v2g.discharge_shift_ratio) << ','
            << format_double(r.v2g_loop) << ',' << r.v2g.max_calls << ',';
        if (r.v2g_calls_at_level) csv << format_double(*r.v2g_calls_at_level);
        csv << ',' << format_double(r.v2g_wavefront) << '\n';
    }
    atomic_write(dir / "sweep.csv", csv.str());

    struct Metric {
        const char* name;
        std::vector<double> values;
    };
    std::vector<Metric> metrics{
        {"response_level", {}},       {"v1g_shifts", {}},
        {"v1g_discharges", {}},       {"v1g_loop_area", {}},
        {"v1g_max_calls", {}},        {"v1g_calls_at_level", {}},
        {"v2g_shifts", {}},           {"v2g_discharges", {}},
        {"v2g_discharge_shift_ratio", {}},
        {"v2g_loop_area", {}},        {"v2g_max_calls", {}},
        {"v2g_calls_at_level", {}},   {"v2g_wavefront", {}}};
    for (const SeedRow& r : rows) {
        metrics[0].values.push_back(r.level);
        metrics[1].values.push_back(static_cast<double>(r.v1g.total_shifts));
        metrics[2].values.push_back(static_cast<double>(r.v1g.total_discharges));
        metrics[3].values.push_back(r.v1g_loop);
        metrics[4].values.push_back(r.v1g.max_calls);
        if (r.v1g_calls_at_level) metrics[5].values.push_back(*r.v1g_calls_at_level);
        metrics[6].values.push_back(static_cast<double>(r.v2g.total_shifts));
        metrics[7].values.push_back(static_cast<double>(r.v2g.total_discharges));
        if (std::isfinite(r.v2g.discharge_shift_ratio))
            metrics[8].values.push_back(r.v2g.discharge_shift_ratio);
        metrics[9].values.push_back(r.v2g_loop);
        metrics[10].values.push_back(r.v2g.max_calls);
        if (r.v2g_calls_at_level) metrics[11].values.push_back(*r.v2g_calls_at_level);
        metrics[12].values.push_back(r.v2g_wavefront);
    }
    std::ostringstream stats_csv;
    stats_csv << "metric,mean,stddev,count\n";
    for (const Metric& m : metrics) {
        const Stats s = stats_of(m.values);
        stats_csv << m.name << ',';
        if (s.count > 0)
            stats_csv << format_double(s.mean) << ',' << format_double(s.stddev);
        else
            stats_csv << ',';
        stats_csv << ',' << s.count << '\n';
    }
    atomic_write(dir / "sweep_stats.csv", stats_csv.str());

    const Stats ratio = stats_of(metrics[8].values);
    const Stats v1g_calls = stats_of(metrics[5].values);
    const Stats v2g_calls = stats_of(metrics[11].values);
    out << "sweep: " << o.seeds << " seeds starting at " << o.seed << '\n'
        << "  mean discharge/shift ratio (v2g): "
        << (ratio.count ? format_double(ratio.mean) : std::string("n/a")) << '\n'
        << "  mean calls at level: v1g="
        << (v1g_calls.count ? format_double(v1g_calls.mean) : std::string("n/a"))
        << " v2g="
        << (v2g_calls.count ? format_double(v2g_calls.mean) : std::string("n/a"))
        << '\n'
        << "wrote " << (dir / "sweep.csv").string() << ' '
        << (dir / "sweep_stats.csv").string() << " and " << o.seeds
        << " pair bundles" << '\n';
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"pevca: EV load particle simulator with V1G/V2G control"};
    CliOptions o;

    app.add_option("--n", o.n, "number of particles")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--density", o.density, "probability a demand slot starts occupied")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--t", o.horizon, "number of periods")
        ->capture_default_str()
        ->check(CLI::Range(2, 1000000));
    app.add_option("--seed", o.seed, "population seed (sweep: first seed)")
        ->capture_default_str();
    app.add_option("--fraction,--target-fraction", o.fraction,
                   "target dip magnitude as a fraction of the mean load")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--dip-start", o.dip_start,
                   "first period of the target dip (default t/5)")
        ->check(CLI::PositiveNumber);
    app.add_option("--dip-end", o.dip_end,
                   "last period of the target dip (default 4t/5)")
        ->check(CLI::PositiveNumber);
    app.add_option("--mode", o.mode, "visit order: price (merit order) or direct (by id)")
        ->capture_default_str()
        ->check(CLI::IsMember({"price", "direct"}));
    app.add_flag("--v2g", o.v2g, "enable discharging (run subcommand only)");
    app.add_flag("--require-prior-charge", o.require_prior_charge,
                 "discharge only after a realized charge");
    CLI::Option* md = app.add_option("--max-discharges", o.max_discharges,
                                     "cap on discharges per particle")
                          ->check(CLI::NonNegativeNumber);
    app.add_option("--out", o.out_dir, "output directory")->capture_default_str();
    app.add_option("--target-file", o.target_file,
                   "load the target profile from a file (one value per line, "
                   "overrides --t and the dip flags)");
    app.add_option("--seeds", o.seeds, "sweep: number of consecutive seeds")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--jobs", o.jobs, "sweep: worker threads (0 = hardware)")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.set_config("--config", "", "key = value file supplying flag defaults");

    CLI::App* c_run = app.add_subcommand("run", "simulate one scenario");
    CLI::App* c_compare =
        app.add_subcommand("compare", "run one population with and without V2G");
    CLI::App* c_sweep =
        app.add_subcommand("sweep", "compare across a grid of consecutive seeds");
    for (CLI::App* sub : {c_run, c_compare, c_sweep}) sub->fallthrough();
    app.require_subcommand(1);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }
    o.max_discharges_set = md->count() > 0;

    bool out_on_cmdline = false;
    for (const std::string& a : args) {
        if (a == "--") break;
        if (a == "--out" || a.rfind("--out=", 0) == 0) {
            out_on_cmdline = true;
            break;
        }
    }
    if (!out_on_cmdline) {
        const char* env_dir = std::getenv("PEVCA_OUT_DIR");
        if (env_dir && *env_dir) o.out_dir = env_dir;
    }

    try {
        if (c_run->parsed()) return cmd_run(o, out);
        if (c_compare->parsed()) return cmd_compare(o, out);
        return cmd_sweep(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args, std::cout, std::cerr);
}

} // namespace pevca
