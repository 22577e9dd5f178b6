#include "pevca/persistence.hpp"

#include "pevca/numfmt.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pevca {

namespace {

using nlohmann::json;

constexpr const char* kBundleSchemaName = "pevca.bundle";
constexpr const char* kPairSchemaName = "pevca.pair";

std::string mode_name(ControlMode mode) {
    return mode == ControlMode::Price ? "price" : "direct";
}

ControlMode mode_from_name(const std::string& name) {
    if (name == "price") return ControlMode::Price;
    if (name == "direct") return ControlMode::Direct;
    throw std::runtime_error("bundle: unknown control mode '" + name + "'");
}

json population_to_json(const Population& pop) {
    json bids = json::array();
    json demand = json::array();
    for (const ParticleSchedule& p : pop.particles()) {
        bids.push_back(p.bid);
        json row = json::array();
        for (std::int8_t d : p.demand) row.push_back(static_cast<int>(d));
        demand.push_back(std::move(row));
    }
    return json{{"bids", std::move(bids)}, {"demand", std::move(demand)}};
}

Population population_from_json(const json& j) {
    const auto& bids = j.at("bids");
    const auto& demand = j.at("demand");
    if (bids.size() != demand.size())
        throw std::runtime_error("bundle: population bids/demand size mismatch");
    std::vector<ParticleSchedule> particles(bids.size());
    for (std::size_t i = 0; i < bids.size(); ++i) {
        ParticleSchedule& p = particles[i];
        p.id = static_cast<int>(i) + 1;
        p.bid = bids[i].get<double>();
        for (const auto& d : demand[i])
            p.demand.push_back(static_cast<std::int8_t>(d.get<int>()));
    }
    return Population(std::move(particles));
}

json optional_series_to_json(const std::vector<std::optional<double>>& series) {
    json arr = json::array();
    for (const auto& v : series) {
        if (v)
            arr.push_back(*v);
        else
            arr.push_back(nullptr);
    }
    return arr;
}

std::vector<std::optional<double>> optional_series_from_json(const json& arr) {
    std::vector<std::optional<double>> series;
    series.reserve(arr.size());
    for (const auto& v : arr) {
        if (v.is_null())
            series.emplace_back(std::nullopt);
        else
            series.emplace_back(v.get<double>());
    }
    return series;
}

json bundle_to_json(const RunBundle& bundle) {
    const SimResult& r = bundle.result;
    json events = json::array();
    for (const ActionEvent& e : r.events)
        events.push_back(json::array(
            {e.kind == ActionKind::Shift ? 0 : 1, e.particle_id, e.time}));

    json control{{"mode", mode_name(bundle.control.mode)},
                 {"v2g", bundle.control.v2g_enabled},
                 {"require_prior_charge", bundle.control.require_prior_charge},
                 {"seed", bundle.control.seed}};
    if (bundle.control.max_discharges_per_particle)
        control["max_discharges"] = *bundle.control.max_discharges_per_particle;
    else
        control["max_discharges"] = nullptr;

    return json{
        {"schema", kBundleSchemaName},
        {"version", bundle.schema_version},
        {"population_params",
         {{"n", bundle.population.n_particles},
          {"density", bundle.population.density},
          {"horizon", bundle.population.horizon},
          {"seed", bundle.population.seed}}},
        {"control", std::move(control)},
        {"target", {{"mean_load", bundle.target.mean_load}, {"values", bundle.target.values}}},
        {"result",
         {{"p", r.p_series},
          {"p_initial", r.p_initial_series},
          {"v", r.v_series},
          {"w", r.w_series},
          {"calls", r.calls_series},
          {"clearing", optional_series_to_json(r.clearing_series)},
          {"next_bid", optional_series_to_json(r.next_bid_series)},
          {"events", std::move(events)},
          {"initial_population", population_to_json(r.initial_population)},
          {"final_population", population_to_json(r.final_population)}}}};
}

void validate_result(const SimResult& r) {
    const std::size_t t = r.p_series.size();
    if (r.p_initial_series.size() != t || r.v_series.size() != t ||
        r.w_series.size() != t || r.calls_series.size() != t ||
        r.clearing_series.size() != t || r.next_bid_series.size() != t ||
        r.target.values.size() != t ||
        r.initial_population.horizon() != static_cast<int>(t) ||
        r.final_population.horizon() != static_cast<int>(t))
        throw std::runtime_error("bundle: series lengths disagree");
    if (r.initial_population.size() != r.final_population.size())
        throw std::runtime_error("bundle: population sizes disagree");

    std::vector<int> v_count(t, 0);
    std::vector<int> w_count(t, 0);
    for (const ActionEvent& e : r.events) {
        if (e.time < 1 || e.time > static_cast<int>(t) - 1)
            throw std::runtime_error("bundle: event period out of range");
        if (e.particle_id < 1 || e.particle_id > r.initial_population.size())
            throw std::runtime_error("bundle: event particle out of range");
        (e.kind == ActionKind::Shift ? v_count : w_count)[static_cast<std::size_t>(e.time - 1)]++;
    }
    long long sum_p = 0;
    long long sum_p0 = 0;
    for (std::size_t i = 0; i < t; ++i) {
        if (v_count[i] != r.v_series[i] || w_count[i] != r.w_series[i])
            throw std::runtime_error("bundle: event log disagrees with action series");
        sum_p += r.p_series[i];
        sum_p0 += r.p_initial_series[i];
    }
    if (sum_p != sum_p0)
        throw std::runtime_error("bundle: aggregate conservation violated");
}

RunBundle bundle_from_json(const json& j) {
    if (!j.is_object() || j.value("schema", std::string{}) != kBundleSchemaName)
        throw std::runtime_error("bundle: not a pevca.bundle document");
    RunBundle bundle;
    bundle.schema_version = j.at("version").get<int>();
    if (bundle.schema_version != kBundleSchemaVersion)
        throw std::runtime_error("bundle: unsupported schema version " +
                                 std::to_string(bundle.schema_version));

    const json& pp = j.at("population_params");
    bundle.population.n_particles = pp.at("n").get<int>();
    bundle.population.density = pp.at("density").get<double>();
    bundle.population.horizon = pp.at("horizon").get<int>();
    bundle.population.seed = pp.at("seed").get<std::uint64_t>();

    const json& c = j.at("control");
    bundle.control.mode = mode_from_name(c.at("mode").get<std::string>());
    bundle.control.v2g_enabled = c.at("v2g").get<bool>();
    bundle.control.require_prior_charge = c.at("require_prior_charge").get<bool>();
    bundle.control.seed = c.at("seed").get<std::uint64_t>();
    if (!c.at("max_discharges").is_null())
        bundle.control.max_discharges_per_particle = c.at("max_discharges").get<int>();

    bundle.target.mean_load = j.at("target").at("mean_load").get<double>();
    bundle.target.values = j.at("target").at("values").get<std::vector<double>>();

    const json& res = j.at("result");
    SimResult& r = bundle.result;
    r.p_series = res.at("p").get<std::vector<int>>();
    r.p_initial_series = res.at("p_initial").get<std::vector<int>>();
    r.v_series = res.at("v").get<std::vector<int>>();
    r.w_series = res.at("w").get<std::vector<int>>();
    r.calls_series = res.at("calls").get<std::vector<int>>();
    r.clearing_series = optional_series_from_json(res.at("clearing"));
    r.next_bid_series = optional_series_from_json(res.at("next_bid"));
    for (const auto& e : res.at("events")) {
        const int kind = e.at(0).get<int>();
        if (kind != 0 && kind != 1)
            throw std::runtime_error("bundle: unknown event kind");
        r.events.push_back(ActionEvent{e.at(1).get<int>(), e.at(2).get<int>(),
                                       kind == 0 ? ActionKind::Shift : ActionKind::Discharge});
    }
    r.initial_population = population_from_json(res.at("initial_population"));
    r.final_population = population_from_json(res.at("final_population"));
    r.config = bundle.control;
    r.target = bundle.target;
    validate_result(r);
    return bundle;
}

json parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

} // namespace

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << content;
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

void export_series_csv(const SimResult& result, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "k,p_initial,p,p_star,v,w,calls,clearing_price\n";
    for (int i = 0; i < result.horizon(); ++i) {
        const std::size_t idx = static_cast<std::size_t>(i);
        out << (i + 1) << ',' << result.p_initial_series[idx] << ','
            << result.p_series[idx] << ',' << format_double(result.target.values[idx])
            << ',' << result.v_series[idx] << ',' << result.w_series[idx] << ','
            << result.calls_series[idx] << ',';
        if (result.clearing_series[idx])
            out << format_double(*result.clearing_series[idx]);
        out << '\n';
    }
    atomic_write(path, out.str());
}

SeriesTable read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "k,p_initial,p,p_star,v,w,calls,clearing_price")
        throw std::runtime_error("series CSV: bad header in " + path.string());
    SeriesTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (std::size_t pos = 0; pos <= line.size(); ++pos) {
            if (pos == line.size() || line[pos] == ',') {
                fields.push_back(line.substr(start, pos - start));
                start = pos + 1;
            }
        }
        if (fields.size() != 8)
            throw std::runtime_error("series CSV: bad row in " + path.string());
        table.k.push_back(static_cast<int>(parse_double(fields[0])));
        table.p_initial.push_back(static_cast<int>(parse_double(fields[1])));
        table.p.push_back(static_cast<int>(parse_double(fields[2])));
        table.p_star.push_back(parse_double(fields[3]));
        table.v.push_back(static_cast<int>(parse_double(fields[4])));
        table.w.push_back(static_cast<int>(parse_double(fields[5])));
        table.calls.push_back(static_cast<int>(parse_double(fields[6])));
        if (fields[7].empty())
            table.clearing_price.emplace_back(std::nullopt);
        else
            table.clearing_price.emplace_back(parse_double(fields[7]));
    }
    return table;
}

void export_bundle_json(const RunBundle& bundle, const std::filesystem::path& path) {
    atomic_write(path, bundle_to_json(bundle).dump() + "\n");
}

RunBundle import_bundle_json(const std::filesystem::path& path) {
    return bundle_from_json(parse_file(path));
}

void export_pair_json(const RunBundle& without_v2g, const RunBundle& with_v2g,
                      const std::filesystem::path& path) {
    json j{{"schema", kPairSchemaName},
           {"version", kBundleSchemaVersion},
           {"without_v2g", bundle_to_json(without_v2g)},
           {"with_v2g", bundle_to_json(with_v2g)}};
    atomic_write(path, j.dump() + "\n");
}

std::pair<RunBundle, RunBundle> import_pair_json(const std::filesystem::path& path) {
    const json j = parse_file(path);
    if (!j.is_object() || j.value("schema", std::string{}) != kPairSchemaName)
        throw std::runtime_error("pair bundle: not a pevca.pair document");
    if (j.at("version").get<int>() != kBundleSchemaVersion)
        throw std::runtime_error("pair bundle: unsupported schema version");
    return {bundle_from_json(j.at("without_v2g")), bundle_from_json(j.at("with_v2g"))};
}

} // namespace pevca
