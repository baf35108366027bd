#include "lanesim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

#include "lanesim/csv.hpp"
#include "lanesim/sweep.hpp"

namespace lanesim {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 600.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#e377c2"};

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// red (slow) -> yellow -> green (fast)
std::string speed_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(255.0 * std::min(1.0, 2.0 * (1.0 - t)));
    const int g = static_cast<int>(255.0 * std::min(1.0, 2.0 * t));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x00", r, g);
    return buf;
}

struct AxisScale {
    double lo = 0.0, hi = 1.0;
    double px_lo = 0.0, px_hi = 1.0;

    double map(double v) const {
        if (hi == lo) return (px_lo + px_hi) / 2.0;
        return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
    }
};

class Svg {
public:
    Svg() {
        body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
              << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
              << kHeight << "\">\n";
    }

    void comment(const std::vector<std::string>& lines) {
        if (lines.empty()) return;
        body_ << "<!--\n";
        for (const auto& line : lines) body_ << line << '\n';
        body_ << "-->\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& color,
              double width = 1.0) {
        body_ << "<line x1=\"" << csv::num(x1) << "\" y1=\"" << csv::num(y1)
              << "\" x2=\"" << csv::num(x2) << "\" y2=\"" << csv::num(y2)
              << "\" stroke=\"" << color << "\" stroke-width=\"" << width << "\"/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts,
                  const std::string& color, double width = 1.0) {
        body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
              << width << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) body_ << ' ';
            body_ << csv::num(pts[i].first) << ',' << csv::num(pts[i].second);
        }
        body_ << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& color) {
        body_ << "<circle cx=\"" << csv::num(cx) << "\" cy=\"" << csv::num(cy)
              << "\" r=\"" << r << "\" fill=\"" << color << "\"/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "start") {
        body_ << "<text x=\"" << csv::num(x) << "\" y=\"" << csv::num(y)
              << "\" font-size=\"" << size << "\" font-family=\"sans-serif\" text-anchor=\""
              << anchor << "\">" << s << "</text>\n";
    }

    void axes(const AxisScale& xs, const AxisScale& ys, const std::string& x_label,
              const std::string& y_label, const std::string& title) {
        const std::string axis_color = "#333333";
        line(xs.px_lo, ys.px_lo, xs.px_hi, ys.px_lo, axis_color, 1.5);
        line(xs.px_lo, ys.px_lo, xs.px_lo, ys.px_hi, axis_color, 1.5);
        for (int i = 0; i <= 5; ++i) {
            const double fx = xs.lo + (xs.hi - xs.lo) * i / 5.0;
            const double px = xs.map(fx);
            line(px, ys.px_lo, px, ys.px_lo + 5, axis_color);
            text(px, ys.px_lo + 20, fmt_tick(fx), 11, "middle");
            const double fy = ys.lo + (ys.hi - ys.lo) * i / 5.0;
            const double py = ys.map(fy);
            line(xs.px_lo - 5, py, xs.px_lo, py, axis_color);
            text(xs.px_lo - 8, py + 4, fmt_tick(fy), 11, "end");
        }
        text((xs.px_lo + xs.px_hi) / 2.0, kHeight - 12, x_label, 13, "middle");
        body_ << "<text x=\"18\" y=\"" << csv::num((ys.px_lo + ys.px_hi) / 2.0)
              << "\" font-size=\"13\" font-family=\"sans-serif\" text-anchor=\"middle\""
              << " transform=\"rotate(-90 18 " << csv::num((ys.px_lo + ys.px_hi) / 2.0)
              << ")\">" << y_label << "</text>\n";
        text((xs.px_lo + xs.px_hi) / 2.0, kMarginTop - 14, title, 15, "middle");
    }

    void write(const std::string& path) {
        body_ << "</svg>\n";
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write SVG: " + path);
        out << body_.str();
    }

private:
    std::ostringstream body_;
};

AxisScale x_scale(double lo, double hi) {
    return {lo, hi, kMarginLeft, kWidth - kMarginRight};
}
AxisScale y_scale(double lo, double hi) {
    return {lo, hi, kHeight - kMarginBottom, kMarginTop};
}

}  // namespace

std::vector<std::string> plot_time_space(const std::string& trajectory_csv,
                                         const std::string& out_dir) {
    const csv::Table table = csv::read_table(trajectory_csv);
    const auto comments = csv::read_comments(trajectory_csv);
    const int c_step = table.column("step");
    const int c_id = table.column("vehicle_id");
    const int c_lane = table.column("lane");
    const int c_x = table.column("x");
    const int c_v = table.column("v");
    if (c_step < 0 || c_id < 0 || c_lane < 0 || c_x < 0 || c_v < 0) {
        throw std::runtime_error(trajectory_csv + ": missing trajectory columns");
    }

    double t_max = 1.0, x_max = 1.0, v_max = 1.0;
    int lane_max = 0;
    for (const auto& row : table.rows) {
        t_max = std::max(t_max, row[c_step]);
        x_max = std::max(x_max, row[c_x]);
        v_max = std::max(v_max, row[c_v]);
        lane_max = std::max(lane_max, static_cast<int>(row[c_lane]));
    }

    // per lane, per vehicle: (step, x, v) samples in row order
    struct Sample {
        double t, x, v;
    };
    std::vector<std::map<int, std::vector<Sample>>> lanes(lane_max + 1);
    for (const auto& row : table.rows) {
        lanes[static_cast<int>(row[c_lane])][static_cast<int>(row[c_id])].push_back(
            {row[c_step], row[c_x], row[c_v]});
    }

    constexpr int kBuckets = 10;
    std::vector<std::string> written;
    for (int lane = 0; lane <= lane_max; ++lane) {
        Svg svg;
        svg.comment(comments);
        const AxisScale xs = x_scale(0.0, t_max);
        const AxisScale ys = y_scale(0.0, x_max);
        svg.axes(xs, ys, "time (steps)", "x (m)", "lane " + std::to_string(lane));

        for (const auto& [id, samples] : lanes[lane]) {
            (void)id;
            // sampling cadence, for detecting departures from this lane
            double cadence = 1.0;
            if (samples.size() >= 2) cadence = std::max(1.0, samples[1].t - samples[0].t);

            std::vector<std::pair<double, double>> run;
            int run_bucket = -1;
            double prev_t = 0.0;
            auto flush = [&] {
                if (run.size() >= 2) {
                    svg.polyline(run, speed_color((run_bucket + 0.5) / kBuckets));
                }
                run.clear();
            };
            for (std::size_t i = 0; i < samples.size(); ++i) {
                const auto& s = samples[i];
                const bool gap = !run.empty() && s.t - prev_t > 1.5 * cadence;
                if (gap) {
                    flush();
                    run_bucket = -1;
                }
                const int bucket = std::min(
                    kBuckets - 1, static_cast<int>(s.v / std::max(v_max, 1e-9) * kBuckets));
                if (run.empty()) {
                    run_bucket = bucket;
                } else if (bucket != run_bucket) {
                    flush();
                    run.push_back({xs.map(samples[i - 1].t), ys.map(samples[i - 1].x)});
                    run_bucket = bucket;
                }
                run.push_back({xs.map(s.t), ys.map(s.x)});
                prev_t = s.t;
            }
            flush();
        }

        // speed legend
        const double lx = kWidth - kMarginRight + 18;
        svg.text(lx, kMarginTop + 4, "speed (m/s)", 12);
        for (int b = 0; b < kBuckets; ++b) {
            const double ly = kMarginTop + 16 + b * 16.0;
            svg.circle(lx + 6, ly + 4, 5, speed_color((b + 0.5) / kBuckets));
            svg.text(lx + 18, ly + 8,
                     fmt_tick(v_max * b / kBuckets) + "-" + fmt_tick(v_max * (b + 1) / kBuckets),
                     10);
        }

        const std::string path = out_dir + "/time_space_lane" + std::to_string(lane) + ".svg";
        svg.write(path);
        written.push_back(path);
    }
    return written;
}

std::string plot_flow_density(const std::vector<std::string>& loop_csvs,
                              const std::vector<std::string>& labels,
                              const std::string& out_path) {
    if (loop_csvs.empty()) throw std::invalid_argument("flow_density: no input CSVs");
    struct Series {
        std::string label;
        std::vector<std::pair<double, double>> points;  // (k, q)
    };
    std::vector<Series> series;
    std::vector<std::string> comments;
    double k_max = 1.0, q_max = 1.0;
    for (std::size_t i = 0; i < loop_csvs.size(); ++i) {
        const csv::Table table = csv::read_table(loop_csvs[i]);
        for (const auto& c : csv::read_comments(loop_csvs[i])) comments.push_back(c);
        const int c_q = table.column("flow_veh_per_h");
        const int c_k = table.column("density_veh_per_km");
        const int c_v = table.column("space_mean_speed");
        if (c_q < 0 || c_k < 0 || c_v < 0) {
            throw std::runtime_error(loop_csvs[i] + ": missing flow-density columns");
        }
        Series s;
        s.label = i < labels.size() ? labels[i] : loop_csvs[i];
        for (const auto& row : table.rows) {
            if (row[c_q] == 0.0 && row[c_v] == 0.0) continue;  // empty window
            s.points.push_back({row[c_k], row[c_q]});
            k_max = std::max(k_max, row[c_k]);
            q_max = std::max(q_max, row[c_q]);
        }
        series.push_back(std::move(s));
    }

    Svg svg;
    svg.comment(comments);
    const AxisScale xs = x_scale(0.0, k_max * 1.05);
    const AxisScale ys = y_scale(0.0, q_max * 1.05);
    svg.axes(xs, ys, "density (veh/km)", "flow (veh/h)", "flow-density relation");
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::string color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        for (const auto& [k, q] : series[i].points) {
            svg.circle(xs.map(k), ys.map(q), 2.5, color);
        }
        const double ly = kMarginTop + 10 + static_cast<double>(i) * 18.0;
        svg.circle(kWidth - kMarginRight + 20, ly, 4, color);
        svg.text(kWidth - kMarginRight + 30, ly + 4, series[i].label, 11);
    }
    svg.write(out_path);
    return out_path;
}

std::string plot_alpha_surface(const std::string& alpha_star_csv,
                               const std::string& out_path) {
    const csv::Table table = csv::read_table(alpha_star_csv);
    const auto comments = csv::read_comments(alpha_star_csv);
    const int c_lanes = table.column("lane_count");
    const int c_tup = table.column("t_up");
    const int c_star = table.column("alpha_star");
    if (c_lanes < 0 || c_tup < 0 || c_star < 0) {
        throw std::runtime_error(alpha_star_csv + ": missing alpha_star columns");
    }
    if (table.rows.empty()) throw std::runtime_error(alpha_star_csv + ": no data rows");

    std::vector<std::array<double, 3>> points;
    double lane_lo = 1e300, lane_hi = -1e300, tup_lo = 1e300, tup_hi = -1e300;
    double a_lo = 0.0, a_hi = -1e300;
    for (const auto& row : table.rows) {
        points.push_back({row[c_lanes], row[c_tup], row[c_star]});
        lane_lo = std::min(lane_lo, row[c_lanes]);
        lane_hi = std::max(lane_hi, row[c_lanes]);
        tup_lo = std::min(tup_lo, row[c_tup]);
        tup_hi = std::max(tup_hi, row[c_tup]);
        a_hi = std::max(a_hi, row[c_star]);
    }
    if (lane_hi == lane_lo) lane_hi = lane_lo + 1;
    if (tup_hi == tup_lo) tup_hi = tup_lo + 1;
    if (a_hi <= a_lo) a_hi = a_lo + 1;

    std::array<double, 3> plane{0.0, 0.0, 0.0};
    bool have_plane = false;
    if (points.size() >= 3) {
        try {
            plane = fit_plane(points);
            have_plane = true;
        } catch (const std::exception&) {
        }
    }

    // isometric projection of normalized (lanes, t_up, alpha*) coordinates
    auto project = [&](double lanes, double tup, double alpha) {
        const double a = (lanes - lane_lo) / (lane_hi - lane_lo);
        const double b = (tup - tup_lo) / (tup_hi - tup_lo);
        const double c = (alpha - a_lo) / (a_hi - a_lo);
        const double u = (a - b) * 0.8660254037844386;
        const double w = (a + b) * 0.5 - c;
        const double px = kMarginLeft + (u + 0.87) / 1.74 * (kWidth - kMarginLeft - kMarginRight);
        const double py = kMarginTop + 40 + (w + 1.0) / 2.0 * (kHeight - kMarginTop - kMarginBottom - 60);
        return std::pair<double, double>{px, py};
    };

    Svg svg;
    svg.comment(comments);
    svg.text(kWidth / 2.0, kMarginTop, "optimal cooperation coefficient", 15, "middle");

    if (have_plane) {
        constexpr int kMesh = 8;
        for (int i = 0; i <= kMesh; ++i) {
            std::vector<std::pair<double, double>> iso_a, iso_b;
            for (int j = 0; j <= kMesh; ++j) {
                const double lanes_i = lane_lo + (lane_hi - lane_lo) * i / kMesh;
                const double tup_j = tup_lo + (tup_hi - tup_lo) * j / kMesh;
                iso_a.push_back(project(lanes_i, tup_j,
                                        plane[0] + plane[1] * lanes_i + plane[2] * tup_j));
                const double lanes_j = lane_lo + (lane_hi - lane_lo) * j / kMesh;
                const double tup_i = tup_lo + (tup_hi - tup_lo) * i / kMesh;
                iso_b.push_back(project(lanes_j, tup_i,
                                        plane[0] + plane[1] * lanes_j + plane[2] * tup_i));
            }
            svg.polyline(iso_a, "#9ecae1");
            svg.polyline(iso_b, "#9ecae1");
        }
    }

    // axis guides from the (lane_lo, tup_lo, 0) corner
    const auto origin = project(lane_lo, tup_lo, a_lo);
    const auto lane_end = project(lane_hi, tup_lo, a_lo);
    const auto tup_end = project(lane_lo, tup_hi, a_lo);
    const auto alpha_end = project(lane_lo, tup_lo, a_hi);
    svg.line(origin.first, origin.second, lane_end.first, lane_end.second, "#333333", 1.5);
    svg.line(origin.first, origin.second, tup_end.first, tup_end.second, "#333333", 1.5);
    svg.line(origin.first, origin.second, alpha_end.first, alpha_end.second, "#333333", 1.5);
    svg.text(lane_end.first + 8, lane_end.second, "lanes " + fmt_tick(lane_lo) + "-" + fmt_tick(lane_hi), 12);
    svg.text(tup_end.first - 8, tup_end.second + 12, "T_up " + fmt_tick(tup_lo) + "-" + fmt_tick(tup_hi) + " s", 12, "end");
    svg.text(alpha_end.first, alpha_end.second - 8, "alpha* 0-" + fmt_tick(a_hi), 12, "middle");

    for (const auto& p : points) {
        const auto [px, py] = project(p[0], p[1], p[2]);
        svg.circle(px, py, 4, "#d62728");
    }

    // legend
    const double lx = kWidth - kMarginRight + 14;
    svg.circle(lx + 6, kMarginTop + 14, 4, "#d62728");
    svg.text(lx + 16, kMarginTop + 18, "alpha*", 11);
    if (have_plane) {
        svg.line(lx, kMarginTop + 34, lx + 12, kMarginTop + 34, "#9ecae1", 2);
        svg.text(lx + 16, kMarginTop + 38, "LS plane", 11);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "b=(%.3g, %.3g, %.3g)", plane[0], plane[1], plane[2]);
        svg.text(lx, kMarginTop + 56, buf, 10);
    }
    svg.write(out_path);
    return out_path;
}

}  // namespace lanesim
