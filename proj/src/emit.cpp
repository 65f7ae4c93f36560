#include "frachardy/emit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "frachardy/error.hpp"

namespace frachardy::emit {

namespace {

std::string number(double x) { return std::isfinite(x) ? fmt::format("{:.17g}", x) : std::string(); }

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += ch;
        }
    }
    return out;
}

// Roughly five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
        out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    }
    return out;
}

}  // namespace

std::string csv(const harness::RunRecord& r) {
    std::string out;
    for (std::size_t k = 0; k < r.columns.size(); ++k) out += (k ? "," : "") + r.columns[k];
    out += "\n";
    for (const auto& row : r.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + number(row[k]);
        out += "\n";
    }
    return out;
}

std::string svg(const harness::RunRecord& r) {
    constexpr double W = 640, H = 420, left = 80, right = 20, top = 40, bottom = 60;
    std::vector<std::pair<double, double>> pts;
    if (!r.plot_x.empty() && !r.plot_y.empty()) {
        const auto xs = r.column(r.plot_x), ys = r.column(r.plot_y);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            if (std::isfinite(xs[k]) && std::isfinite(ys[k])) pts.emplace_back(xs[k], ys[k]);
        }
    }
    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n"
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        W, H, W, H, W / 2, escape(r.experiment));
    if (pts.empty()) return out + "</svg>\n";

    double x0 = pts.front().first, x1 = x0, y0 = pts.front().second, y1 = y0;
    for (auto [x, y] : pts) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 == y0) {
        y0 -= 0.5;
        y1 += 0.5;
    }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
    auto sy = [&](double y) { return H - bottom - (y - y0) / (y1 - y0) * (H - top - bottom); };

    out += fmt::format("<g stroke=\"black\" stroke-width=\"1\">\n"
                       "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>\n"
                       "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{3}\"/>\n</g>\n",
                       left, H - bottom, W - right, top);
    out += "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double t : ticks(x0, x1)) {
        out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>"
                           "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4:.4g}</text>\n",
                           sx(t), H - bottom, H - bottom + 5, H - bottom + 18, t);
    }
    for (double t : ticks(y0, y1)) {
        out += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"black\"/>"
                           "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.4g}</text>\n",
                           left - 5, sy(t), left, left - 8, sy(t) + 4, t);
    }
    out += "</g>\n";
    if (y0 < 0.0 && y1 > 0.0) {
        out += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#999\" "
                           "stroke-dasharray=\"4 3\"/>\n",
                           left, sy(0.0), W - right);
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" "
                       "text-anchor=\"middle\">{}</text>\n",
                       left + 0.5 * (W - left - right), H - 15, escape(r.plot_x));
    out += fmt::format("<text x=\"18\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
                       "transform=\"rotate(-90 18 {0})\">{1}</text>\n",
                       top + 0.5 * (H - top - bottom), escape(r.plot_y));
    std::string path;
    for (auto [x, y] : pts) path += fmt::format("{}{:.2f},{:.2f}", path.empty() ? "" : " ", sx(x), sy(y));
    out += fmt::format("<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"{}\"/>\n", path);
    for (auto [x, y] : pts) {
        out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"#1f4e9c\"/>\n", sx(x), sy(y));
    }
    return out + "</svg>\n";
}

std::filesystem::path write(const harness::RunRecord& record, const std::string& format,
                            const std::filesystem::path& dir, const std::string& stem) {
    std::string body;
    if (format == "json") body = harness::to_json(record).dump(2) + "\n";
    else if (format == "csv") body = csv(record);
    else if (format == "svg") body = svg(record);
    else throw DomainError("unknown output format " + format);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = dir / (stem + "." + format);
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << body) || !out.flush()) throw IoError("cannot write " + path.string());
    return path;
}

}  // namespace frachardy::emit
