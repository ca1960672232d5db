#include "uavnav/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace uavnav {

namespace {

struct Canvas {
    double width, height;
    double margin_left = 64, margin_right = 24, margin_top = 32, margin_bottom = 48;

    double plot_w() const { return width - margin_left - margin_right; }
    double plot_h() const { return height - margin_top - margin_bottom; }
};

struct AxisRange {
    double lo = 0.0, hi = 1.0;
    double to_unit(double v) const { return hi == lo ? 0.5 : (v - lo) / (hi - lo); }
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt_px(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

class Svg {
   public:
    Svg(const std::string& path, double w, double h) : out_(path) {
        if (!out_) throw std::runtime_error("cannot write svg file: " + path);
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
             << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
        out_ << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
             << "\" fill=\"white\"/>\n";
    }
    ~Svg() { out_ << "</svg>\n"; }

    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, const std::string& dash = "") {
        out_ << "<line x1=\"" << fmt_px(x1) << "\" y1=\"" << fmt_px(y1) << "\" x2=\"" << fmt_px(x2)
             << "\" y2=\"" << fmt_px(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
             << width << "\"";
        if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << "\"";
        out_ << "/>\n";
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width = 1.5) {
        out_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width
             << "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            out_ << (i ? " " : "") << fmt_px(pts[i].first) << "," << fmt_px(pts[i].second);
        }
        out_ << "\"/>\n";
    }

    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& stroke = "none", double opacity = 1.0) {
        out_ << "<circle cx=\"" << fmt_px(cx) << "\" cy=\"" << fmt_px(cy) << "\" r=\"" << fmt_px(r)
             << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"";
        if (opacity < 1.0) out_ << " fill-opacity=\"" << opacity << "\"";
        out_ << "/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none", const std::string& dash = "") {
        out_ << "<rect x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(y) << "\" width=\"" << fmt_px(w)
             << "\" height=\"" << fmt_px(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
             << "\"";
        if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << "\"";
        out_ << "/>\n";
    }

    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "start", const std::string& fill = "#333") {
        out_ << "<text x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(y) << "\" font-size=\"" << size
             << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\" fill=\"" << fill
             << "\">" << s << "</text>\n";
    }

   private:
    std::ofstream out_;
};

// Blue (low) through light gray to red (high).
std::string success_color(double v) {
    v = std::clamp(v, 0.0, 1.0);
    const double stops[5][4] = {
        {0.00, 40, 60, 190},  {0.35, 90, 160, 220}, {0.50, 228, 228, 228},
        {0.65, 240, 150, 80}, {1.00, 190, 25, 40},
    };
    int hi = 1;
    while (hi < 4 && stops[hi][0] < v) ++hi;
    const auto& a = stops[hi - 1];
    const auto& b = stops[hi];
    const double t = (v - a[0]) / (b[0] - a[0]);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(a[1] + t * (b[1] - a[1])),
                  static_cast<int>(a[2] + t * (b[2] - a[2])),
                  static_cast<int>(a[3] + t * (b[3] - a[3])));
    return buf;
}

const char* series_color(DenoiserKind k) {
    switch (k) {
        case DenoiserKind::none: return "#1f77b4";    // blue
        case DenoiserKind::lpf: return "#ff7f0e";     // orange
        case DenoiserKind::kalman: return "#2ca02c";  // green
    }
    return "#000";
}

void draw_axes(Svg& svg, const Canvas& c, const AxisRange& xr, const AxisRange& yr,
               const std::string& xlabel, const std::string& ylabel) {
    const double x0 = c.margin_left, y0 = c.height - c.margin_bottom;
    const double x1 = c.width - c.margin_right, y1 = c.margin_top;
    svg.line(x0, y0, x1, y0, "#333");
    svg.line(x0, y0, x0, y1, "#333");
    const int ticks = 5;
    for (int i = 0; i <= ticks; ++i) {
        const double f = static_cast<double>(i) / ticks;
        const double xv = xr.lo + f * (xr.hi - xr.lo);
        const double yv = yr.lo + f * (yr.hi - yr.lo);
        const double xp = x0 + f * c.plot_w();
        const double yp = y0 - f * c.plot_h();
        svg.line(xp, y0, xp, y0 + 4, "#333");
        svg.text(xp, y0 + 18, fmt(xv), 11, "middle");
        svg.line(x0 - 4, yp, x0, yp, "#333");
        svg.text(x0 - 8, yp + 4, fmt(yv), 11, "end");
    }
    svg.text((x0 + x1) / 2, c.height - 10, xlabel, 12, "middle");
    svg.text(14, (y0 + y1) / 2, ylabel, 12, "middle");
}

}  // namespace

void render_sweep_lines(const std::vector<CellResult>& rows, SweepKind kind,
                        const std::string& svg_path) {
    if (rows.empty()) throw std::invalid_argument("render_sweep_lines: no rows");
    const bool x_is_sigma = (kind != SweepKind::bias_only);

    std::map<DenoiserKind, std::vector<std::pair<double, double>>> series;
    double x_lo = 1e300, x_hi = -1e300;
    for (const CellResult& r : rows) {
        const double x = x_is_sigma ? r.sigma : r.mu;
        series[r.denoiser].push_back({x, r.success_rate});
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;

    Canvas c{640, 420};
    AxisRange xr{x_lo, x_hi};
    AxisRange yr{0.0, 1.0};
    Svg svg(svg_path, c.width, c.height);
    draw_axes(svg, c, xr, yr, x_is_sigma ? "sigma (m)" : "mu (m)", "success rate");

    double legend_y = c.margin_top + 12;
    for (auto& [kind_key, pts] : series) {
        std::sort(pts.begin(), pts.end());
        std::vector<std::pair<double, double>> px;
        px.reserve(pts.size());
        for (const auto& [x, y] : pts) {
            px.push_back({c.margin_left + xr.to_unit(x) * c.plot_w(),
                          c.height - c.margin_bottom - yr.to_unit(y) * c.plot_h()});
        }
        svg.polyline(px, series_color(kind_key));
        for (const auto& [x, y] : px) svg.circle(x, y, 2.2, series_color(kind_key));
        svg.line(c.width - 150, legend_y - 4, c.width - 126, legend_y - 4, series_color(kind_key),
                 2.0);
        svg.text(c.width - 120, legend_y, to_string(kind_key), 11);
        legend_y += 16;
    }
}

void render_sweep_heatmap(const std::vector<CellResult>& rows, const std::string& svg_path) {
    if (rows.empty()) throw std::invalid_argument("render_sweep_heatmap: no rows");

    std::vector<double> mu_vals, sigma_vals;
    for (const CellResult& r : rows) {
        if (std::find(mu_vals.begin(), mu_vals.end(), r.mu) == mu_vals.end())
            mu_vals.push_back(r.mu);
        if (std::find(sigma_vals.begin(), sigma_vals.end(), r.sigma) == sigma_vals.end())
            sigma_vals.push_back(r.sigma);
    }
    std::sort(mu_vals.begin(), mu_vals.end());
    std::sort(sigma_vals.begin(), sigma_vals.end());

    const std::size_t n_rows = mu_vals.size();
    const std::size_t n_cols = sigma_vals.size();
    Canvas c{720, 520};
    c.margin_right = 110;  // room for the colorbar
    Svg svg(svg_path, c.width, c.height);

    const double cell_w = c.plot_w() / static_cast<double>(n_cols);
    const double cell_h = c.plot_h() / static_cast<double>(n_rows);

    auto row_of = [&](double mu) {
        return std::find(mu_vals.begin(), mu_vals.end(), mu) - mu_vals.begin();
    };
    auto col_of = [&](double sigma) {
        return std::find(sigma_vals.begin(), sigma_vals.end(), sigma) - sigma_vals.begin();
    };

    for (const CellResult& r : rows) {
        const auto i = row_of(r.mu);     // mu increases downward from the top
        const auto j = col_of(r.sigma);  // sigma increases rightward
        svg.rect(c.margin_left + j * cell_w, c.margin_top + i * cell_h, cell_w + 0.5, cell_h + 0.5,
                 success_color(r.success_rate));
    }

    // Axis labels on grid edges.
    svg.text(c.margin_left + c.plot_w() / 2, c.height - 12, "sigma (m)", 12, "middle");
    svg.text(16, c.margin_top + c.plot_h() / 2, "mu (m)", 12, "middle");
    const int label_every = std::max<int>(1, static_cast<int>(n_cols) / 6);
    for (std::size_t j = 0; j < n_cols; j += label_every) {
        svg.text(c.margin_left + (j + 0.5) * cell_w, c.height - c.margin_bottom + 16,
                 fmt(sigma_vals[j]), 10, "middle");
    }
    const int row_every = std::max<int>(1, static_cast<int>(n_rows) / 6);
    for (std::size_t i = 0; i < n_rows; i += row_every) {
        svg.text(c.margin_left - 6, c.margin_top + (i + 0.5) * cell_h + 4, fmt(mu_vals[i]), 10,
                 "end");
    }

    // Colorbar, high (warm) on top.
    const double bar_x = c.width - c.margin_right + 28;
    const double bar_w = 18;
    const int bar_steps = 64;
    const double bar_h = c.plot_h() / bar_steps;
    for (int i = 0; i < bar_steps; ++i) {
        const double v = 1.0 - static_cast<double>(i) / (bar_steps - 1);
        svg.rect(bar_x, c.margin_top + i * bar_h, bar_w, bar_h + 0.5, success_color(v));
    }
    svg.rect(bar_x, c.margin_top, bar_w, c.plot_h(), "none", "#333");
    svg.text(bar_x + bar_w + 6, c.margin_top + 10, "1.0", 11);
    svg.text(bar_x + bar_w + 6, c.margin_top + c.plot_h(), "0.0", 11);
    svg.text(bar_x + bar_w / 2, c.margin_top - 8, "success", 11, "middle");
}

void render_train_curves(const std::string& trainlog_csv, const std::string& out_prefix) {
    std::ifstream in(trainlog_csv);
    if (!in) throw std::runtime_error("cannot read train log: " + trainlog_csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("step,episode,", 0) != 0) {
        throw std::runtime_error("malformed train log (bad header): " + trainlog_csv);
    }

    std::vector<double> steps, mean_return, mean_len;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> f;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() < 6) continue;
        steps.push_back(std::stod(f[0]));
        mean_return.push_back(std::stod(f[4]));
        mean_len.push_back(std::stod(f[5]));
    }
    if (steps.empty()) throw std::runtime_error("train log holds no episodes: " + trainlog_csv);

    auto draw = [&](const std::vector<double>& ys, const std::string& ylabel,
                    const std::string& path) {
        Canvas c{640, 420};
        AxisRange xr{steps.front(), std::max(steps.back(), steps.front() + 1.0)};
        const auto [lo_it, hi_it] = std::minmax_element(ys.begin(), ys.end());
        double lo = *lo_it, hi = *hi_it;
        if (hi == lo) hi = lo + 1.0;
        const double pad = 0.05 * (hi - lo);
        AxisRange yr{lo - pad, hi + pad};
        Svg svg(path, c.width, c.height);
        draw_axes(svg, c, xr, yr, "steps", ylabel);
        std::vector<std::pair<double, double>> px;
        px.reserve(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) {
            px.push_back({c.margin_left + xr.to_unit(steps[i]) * c.plot_w(),
                          c.height - c.margin_bottom - yr.to_unit(ys[i]) * c.plot_h()});
        }
        svg.polyline(px, "#1f77b4");
    };
    draw(mean_return, "mean return (last 100 episodes)", out_prefix + "_reward.svg");
    draw(mean_len, "mean episode length (last 100 episodes)", out_prefix + "_length.svg");
}

void render_trajectory(const TrajectoryRecord& record, const EnvConfig& env_config,
                       const std::string& svg_path) {
    if (record.points.empty()) throw std::invalid_argument("render_trajectory: empty record");

    const double world_w = env_config.x_max - env_config.x_min;
    const double world_h = env_config.y_max - env_config.y_min;
    const double scale = std::min(640.0 / world_w, 480.0 / world_h);
    const double margin = 40.0;
    const double w = world_w * scale + 2 * margin;
    const double h = world_h * scale + 2 * margin;

    auto px = [&](const Vec2& p) {
        return std::pair<double, double>{margin + (p.x - env_config.x_min) * scale,
                                         margin + (env_config.y_max - p.y) * scale};
    };

    Svg svg(svg_path, w, h);
    svg.rect(margin, margin, world_w * scale, world_h * scale, "#fafafa", "#222");
    // Safety inset: penalties start inside this band.
    svg.rect(margin + env_config.r_minor * scale, margin + env_config.r_minor * scale,
             (world_w - 2 * env_config.r_minor) * scale, (world_h - 2 * env_config.r_minor) * scale,
             "none", "#999", "6,4");

    const SimState& s0 = record.initial_state;
    for (const Obstacle& o : s0.obstacles) {
        const auto [cx, cy] = px(o.center);
        svg.circle(cx, cy, o.radius * scale, "#8c8c8c", "#555");
    }
    {
        const auto [gx, gy] = px(s0.goal);
        svg.circle(gx, gy, env_config.eps_success * scale, "#7fce7f", "#2a7f2a", 0.7);
    }

    std::vector<std::pair<double, double>> path_px;
    path_px.reserve(record.points.size());
    for (const TrajectoryPoint& p : record.points) path_px.push_back(px(p.true_pos));
    svg.polyline(path_px, "#d62728", 1.8);
    for (const TrajectoryPoint& p : record.points) {
        const auto [ex, ey] = px(p.estimated_pos);
        svg.circle(ex, ey, 1.6, "#2ca02c", "none", 0.8);
    }
    {
        const auto [sx, sy] = px(s0.pos);
        svg.circle(sx, sy, 3.5, "#d62728", "#7a1010");
    }
    svg.text(margin, margin - 10,
             std::string("outcome: ") + to_string(record.outcome) +
                 "  return: " + fmt(record.episode_return),
             12);
}

}  // namespace uavnav
