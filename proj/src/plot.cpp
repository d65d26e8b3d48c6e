#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fpme/harness.hpp"

namespace fpme {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 56.0;

std::string fmt(const char* pattern, double a, double b) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, a, b);
    return buf;
}

}  // namespace

void write_convergence_svg(std::ostream& out, const ConvergenceReport& report) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : report.rows) {
        if (r.error_trace > 0.0) pts.emplace_back(std::log10(r.dx), std::log10(r.error_trace));
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (pts.size() < 2) {
        out << "<text x=\"" << kMargin << "\" y=\"" << kHeight / 2 << "\">no positive errors to plot</text>\n</svg>\n";
        return;
    }

    // Guide line of slope `target` through the coarsest point.
    const double gx0 = pts.front().first;
    const double gy0 = pts.front().second;
    const double gx1 = pts.back().first;
    const double gy1 = gy0 + report.target * (gx1 - gx0);

    double xmin = std::min(gx0, gx1), xmax = std::max(gx0, gx1);
    double ymin = std::min(gy0, gy1), ymax = std::max(gy0, gy1);
    for (const auto& [x, y] : pts) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    xmin = std::floor(xmin * 2.0) / 2.0 - 0.1;
    xmax = std::ceil(xmax * 2.0) / 2.0 + 0.1;
    ymin = std::floor(ymin) - 0.1;
    ymax = std::ceil(ymax) + 0.1;

    const auto px = [&](double x) { return kMargin + (x - xmin) / (xmax - xmin) * (kWidth - 1.5 * kMargin); };
    const auto py = [&](double y) { return kHeight - kMargin - (y - ymin) / (ymax - ymin) * (kHeight - 1.5 * kMargin); };

    out << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(xmax) << "\" y2=\"" << py(ymin)
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(xmin) << "\" y2=\"" << py(ymax)
        << "\" stroke=\"black\"/>\n";
    for (double d = std::ceil(ymin); d <= ymax; d += 1.0) {
        out << "<text x=\"" << px(xmin) - 40 << "\" y=\"" << py(d) + 4 << "\">1e" << static_cast<int>(d) << "</text>\n";
    }
    for (const auto& [x, y] : pts) {
        out << "<text x=\"" << px(x) - 14 << "\" y=\"" << py(ymin) + 16 << "\">"
            << fmt("%.3g", std::pow(10.0, x), 0.0) << "</text>\n";
    }
    out << "<text x=\"" << kWidth / 2 - 10 << "\" y=\"" << kHeight - 12 << "\">dx</text>\n";
    out << "<text x=\"8\" y=\"16\">max trace error, sigma = " << fmt("%g, m = %g", report.sigma, report.m) << ", "
        << report.mode.name() << "</text>\n";

    out << "<line x1=\"" << px(gx0) << "\" y1=\"" << py(gy0) << "\" x2=\"" << px(gx1) << "\" y2=\"" << py(gy1)
        << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    out << "<text x=\"" << px(gx1) + 4 << "\" y=\"" << py(gy1) << "\" fill=\"gray\">slope "
        << fmt("%.3g", report.target, 0.0) << "</text>\n";

    out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts) out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n";
    for (const auto& [x, y] : pts) {
        out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    out << "</svg>\n";
}

}  // namespace fpme
