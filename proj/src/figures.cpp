#include "pevca/persistence.hpp"

#include "pevca/metrics.hpp"
#include "pevca/numfmt.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pevca {

namespace {

constexpr double kCanvasWidth = 900.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 24.0;
constexpr double kTitleBand = 30.0;
constexpr double kAxisBand = 34.0;
constexpr double kPanelPlotHeight = 170.0;

constexpr const char* kGrey = "#9aa0a6";
constexpr const char* kBlack = "#202124";
constexpr const char* kRed = "#d62728";
constexpr const char* kBlue = "#1f77b4";

std::string fixed2(double v) {
    std::array<char, 40> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::fixed, 2);
    if (ec != std::errc{})
        throw std::runtime_error("figure coordinate formatting failed");
    return std::string(buf.data(), ptr);
}

// Maps a data interval onto a pixel interval.
struct LinearScale {
    double d0 = 0.0;
    double d1 = 1.0;
    double p0 = 0.0;
    double p1 = 1.0;

    double operator()(double v) const {
        const double span = d1 - d0;
        if (span == 0.0) return (p0 + p1) / 2.0;
        return p0 + (v - d0) / span * (p1 - p0);
    }
};

struct Svg {
    std::ostringstream body;

    void line(double x1, double y1, double x2, double y2, const char* stroke,
              double width = 1.0, const char* dash = nullptr) {
        body << "<line x1=\"" << fixed2(x1) << "\" y1=\"" << fixed2(y1)
             << "\" x2=\"" << fixed2(x2) << "\" y2=\"" << fixed2(y2)
             << "\" stroke=\"" << stroke << "\" stroke-width=\"" << fixed2(width) << "\"";
        if (dash) body << " stroke-dasharray=\"" << dash << "\"";
        body << "/>\n";
    }

    void polyline(const std::string& points, const char* stroke, double width,
                  const char* dash = nullptr) {
        body << "<polyline fill=\"none\" stroke=\"" << stroke
             << "\" stroke-width=\"" << fixed2(width) << "\"";
        if (dash) body << " stroke-dasharray=\"" << dash << "\"";
        body << " points=\"" << points << "\"/>\n";
    }

    void rect(double x, double y, double w, double h, const char* fill,
              const char* stroke = nullptr) {
        body << "<rect x=\"" << fixed2(x) << "\" y=\"" << fixed2(y)
             << "\" width=\"" << fixed2(w) << "\" height=\"" << fixed2(h) << "\"";
        body << " fill=\"" << fill << "\"";
        if (stroke) body << " stroke=\"" << stroke << "\" stroke-width=\"1\"";
        body << "/>\n";
    }

    void text(double x, double y, const std::string& content, int size = 11,
              const char* anchor = "start", const char* fill = "#333333",
              const char* weight = nullptr) {
        body << "<text x=\"" << fixed2(x) << "\" y=\"" << fixed2(y)
             << "\" font-family=\"sans-serif\" font-size=\"" << size
             << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill << "\"";
        if (weight) body << " font-weight=\"" << weight << "\"";
        body << ">" << content << "</text>\n";
    }

    std::string finish(double width, double height) const {
        std::ostringstream out;
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(width)
            << "\" height=\"" << fixed2(height) << "\" viewBox=\"0 0 " << fixed2(width)
            << " " << fixed2(height) << "\">\n"
            << "<rect x=\"0\" y=\"0\" width=\"" << fixed2(width) << "\" height=\""
            << fixed2(height) << "\" fill=\"#ffffff\"/>\n"
            << body.str() << "</svg>\n";
        return out.str();
    }
};

struct Panel {
    double x0 = 0.0;  // plot area, pixel coordinates
    double y0 = 0.0;
    double w = 0.0;
    double h = 0.0;
};

Panel panel_at(double top) {
    return Panel{kMarginLeft, top + kTitleBand,
                 kCanvasWidth - kMarginLeft - kMarginRight, kPanelPlotHeight};
}

double panel_stride() { return kTitleBand + kPanelPlotHeight + kAxisBand; }

void frame(Svg& svg, const Panel& p, const std::string& title,
           const std::string& x_label, const std::string& y_label) {
    svg.rect(p.x0, p.y0, p.w, p.h, "none", "#888888");
    svg.text(p.x0, p.y0 - 10.0, title, 13, "start", "#111111", "600");
    svg.text(p.x0 + p.w / 2.0, p.y0 + p.h + 28.0, x_label, 11, "middle");
    svg.text(p.x0 - 52.0, p.y0 + p.h / 2.0, y_label, 11, "start");
}

void x_ticks(Svg& svg, const Panel& p, const LinearScale& sx, double lo, double hi,
             const std::string& lo_label, const std::string& hi_label) {
    svg.line(sx(lo), p.y0 + p.h, sx(lo), p.y0 + p.h + 4.0, "#888888");
    svg.line(sx(hi), p.y0 + p.h, sx(hi), p.y0 + p.h + 4.0, "#888888");
    svg.text(sx(lo), p.y0 + p.h + 15.0, lo_label, 10, "middle");
    svg.text(sx(hi), p.y0 + p.h + 15.0, hi_label, 10, "middle");
}

void y_ticks(Svg& svg, const Panel& p, const LinearScale& sy, double lo, double hi,
             const std::string& lo_label, const std::string& hi_label) {
    svg.line(p.x0 - 4.0, sy(lo), p.x0, sy(lo), "#888888");
    svg.line(p.x0 - 4.0, sy(hi), p.x0, sy(hi), "#888888");
    svg.text(p.x0 - 7.0, sy(lo) + 3.5, lo_label, 10, "end");
    svg.text(p.x0 - 7.0, sy(hi) + 3.5, hi_label, 10, "end");
}

std::string points_string(const std::vector<double>& xs, const std::vector<double>& ys,
                          const LinearScale& sx, const LinearScale& sy) {
    std::ostringstream out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out << ' ';
        out << fixed2(sx(xs[i])) << ',' << fixed2(sy(ys[i]));
    }
    return out.str();
}

std::vector<double> to_doubles(const std::vector<int>& v) {
    return std::vector<double>(v.begin(), v.end());
}

std::vector<double> period_axis(int horizon) {
    std::vector<double> xs(static_cast<std::size_t>(horizon));
    for (int i = 0; i < horizon; ++i) xs[static_cast<std::size_t>(i)] = i + 1;
    return xs;
}

// Rows are grouped into blocks of ceil(rows/1000) so even large populations
// stay near 1000 painted rows; vertically adjacent active blocks in a column
// merge into one rect.
void lattice_panel(Svg& svg, const Panel& p, const Lattice& lat, const char* fill,
                   const std::string& title) {
    frame(svg, p, title, "period k", "particle");
    const int block = std::max(1, (lat.rows + 999) / 1000);
    const int n_blocks = (lat.rows + block - 1) / block;
    const double cw = p.w / lat.cols;
    const double bh = p.h / n_blocks;

    std::vector<std::uint8_t> active(static_cast<std::size_t>(n_blocks));
    for (int c = 0; c < lat.cols; ++c) {
        std::fill(active.begin(), active.end(), std::uint8_t{0});
        for (int r = 0; r < lat.rows; ++r)
            if (lat.at(r, c)) active[static_cast<std::size_t>(r / block)] = 1;
        for (int b = 0; b < n_blocks;) {
            if (!active[static_cast<std::size_t>(b)]) {
                ++b;
                continue;
            }
            int end = b;
            while (end < n_blocks && active[static_cast<std::size_t>(end)]) ++end;
            svg.rect(p.x0 + c * cw, p.y0 + b * bh, cw, (end - b) * bh, fill);
            b = end;
        }
    }

    const LinearScale sx{1.0, static_cast<double>(lat.cols), p.x0 + cw / 2.0,
                         p.x0 + p.w - cw / 2.0};
    x_ticks(svg, p, sx, 1.0, lat.cols, "1", std::to_string(lat.cols));
    svg.text(p.x0 - 7.0, p.y0 + bh / 2.0 + 3.5, "1", 10, "end");
    svg.text(p.x0 - 7.0, p.y0 + p.h - bh / 2.0 + 3.5, std::to_string(lat.rows), 10, "end");
}

void series_panel(Svg& svg, const Panel& p, const std::vector<double>& xs,
                  const std::vector<std::vector<double>>& series,
                  const std::vector<const char*>& colors,
                  const std::vector<const char*>& dashes,
                  const std::vector<std::string>& names, const std::string& title,
                  const std::string& y_label, bool zero_floor) {
    double lo = zero_floor ? 0.0 : series[0][0];
    double hi = zero_floor ? 1.0 : series[0][0];
    for (const auto& s : series)
        for (double v : s) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (hi == lo) hi = lo + 1.0;

    frame(svg, p, title, "period k", y_label);
    const LinearScale sx{xs.front(), xs.back(), p.x0, p.x0 + p.w};
    const LinearScale sy{lo, hi, p.y0 + p.h, p.y0};
    x_ticks(svg, p, sx, xs.front(), xs.back(), format_double(xs.front()),
            format_double(xs.back()));
    y_ticks(svg, p, sy, lo, hi, format_double(lo), format_double(hi));
    for (std::size_t i = 0; i < series.size(); ++i)
        svg.polyline(points_string(xs, series[i], sx, sy), colors[i], 1.4, dashes[i]);

    double lx = p.x0 + p.w - 150.0;
    double ly = p.y0 + 14.0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        svg.line(lx, ly - 3.5, lx + 22.0, ly - 3.5, colors[i], 2.0, dashes[i]);
        svg.text(lx + 28.0, ly, names[i], 10);
        ly += 14.0;
    }
}

std::string render_overview(const SimResult& result) {
    Svg svg;
    const std::vector<double> xs = period_axis(result.horizon());
    const double stride = panel_stride();

    series_panel(svg, panel_at(8.0), xs,
                 {to_doubles(result.p_initial_series), to_doubles(result.p_series),
                  result.target.values},
                 {kGrey, kBlack, kRed}, {nullptr, nullptr, "6 3"},
                 {"initial load", "controlled load", "target"},
                 "aggregate load against the target", "load", false);

    series_panel(svg, panel_at(8.0 + stride), xs,
                 {to_doubles(result.v_series), to_doubles(result.w_series)},
                 {kBlue, kRed}, {nullptr, nullptr}, {"shifts v", "discharges w"},
                 "actions per period", "count", true);

    lattice_panel(svg, panel_at(8.0 + 2.0 * stride),
                  action_lattice(result, ActionKind::Shift), kBlack,
                  "charge shifts by particle (ascending bid)");
    lattice_panel(svg, panel_at(8.0 + 3.0 * stride),
                  action_lattice(result, ActionKind::Discharge), kRed,
                  "discharges by particle (ascending bid)");

    return svg.finish(kCanvasWidth, 8.0 + 4.0 * stride + 8.0);
}

std::string render_shift_lattice(const SimResult& result) {
    Svg svg;
    lattice_panel(svg, panel_at(8.0), action_lattice(result, ActionKind::Shift),
                  kBlack, "charge shifts by particle, charge shifting only");
    return svg.finish(kCanvasWidth, 8.0 + panel_stride() + 8.0);
}

// Exactly two polyline elements: one trajectory per mode. Everything else is
// drawn with line and text elements.
std::string render_trajectories(const ModeComparison& pair) {
    const std::vector<TrajectoryPoint> a = trajectory(pair.without_v2g);
    const std::vector<TrajectoryPoint> b = trajectory(pair.with_v2g);

    double max_resp = 1.0;
    double max_calls = 1.0;
    for (const auto* traj : {&a, &b})
        for (const TrajectoryPoint& pt : *traj) {
            max_resp = std::max(max_resp, pt.responses);
            max_calls = std::max(max_calls, pt.calls);
        }

    Svg svg;
    const Panel p{kMarginLeft, 8.0 + kTitleBand, kCanvasWidth - kMarginLeft - kMarginRight,
                  360.0};
    svg.text(p.x0, p.y0 - 10.0, "control effort against response, one point per period",
             13, "start", "#111111", "600");
    svg.line(p.x0, p.y0, p.x0, p.y0 + p.h, "#888888");
    svg.line(p.x0, p.y0 + p.h, p.x0 + p.w, p.y0 + p.h, "#888888");
    svg.text(p.x0 + p.w / 2.0, p.y0 + p.h + 28.0, "responses per period (v + w)", 11,
             "middle");
    svg.text(p.x0 - 52.0, p.y0 + p.h / 2.0, "calls", 11, "start");

    const LinearScale sx{0.0, max_resp, p.x0, p.x0 + p.w};
    const LinearScale sy{0.0, max_calls, p.y0 + p.h, p.y0};
    x_ticks(svg, p, sx, 0.0, max_resp, "0", format_double(max_resp));
    y_ticks(svg, p, sy, 0.0, max_calls, "0", format_double(max_calls));

    auto points_of = [&](const std::vector<TrajectoryPoint>& traj) {
        std::ostringstream out;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            if (i) out << ' ';
            out << fixed2(sx(traj[i].responses)) << ',' << fixed2(sy(traj[i].calls));
        }
        return out.str();
    };
    svg.polyline(points_of(a), kRed, 1.4);
    svg.polyline(points_of(b), kBlue, 1.4);

    const double lx = p.x0 + 16.0;
    svg.line(lx, p.y0 + 12.5, lx + 22.0, p.y0 + 12.5, kRed, 2.0);
    svg.text(lx + 28.0, p.y0 + 16.0, "charge shifting only", 10);
    svg.line(lx, p.y0 + 26.5, lx + 22.0, p.y0 + 26.5, kBlue, 2.0);
    svg.text(lx + 28.0, p.y0 + 30.0, "with discharging", 10);

    return svg.finish(kCanvasWidth, 8.0 + kTitleBand + p.h + kAxisBand + 8.0);
}

} // namespace

void emit_figures(const ModeComparison& pair, const std::filesystem::path& out_dir) {
    atomic_write(out_dir / "fig2.svg", render_overview(pair.with_v2g));
    atomic_write(out_dir / "fig3.svg", render_shift_lattice(pair.without_v2g));
    atomic_write(out_dir / "fig4.svg", render_trajectories(pair));
}

} // namespace pevca
