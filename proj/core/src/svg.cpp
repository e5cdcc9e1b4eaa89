#include "specgraph/svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace specgraph {

namespace {
constexpr double kW = 840, kH = 600;
constexpr double kML = 70, kMR = 20, kMT = 20, kMB = 50;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<double> nice_ticks(double lo, double hi, int target = 7) {
    double span = hi - lo;
    if (!(span > 0)) return {lo};
    double raw = span / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-12 * span; v += step)
        ticks.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    return ticks;
}
}  // namespace

SvgPlot::SvgPlot(double x_min, double x_max, double y_min, double y_max,
                 std::string x_label, std::string y_label)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max),
      x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

double SvgPlot::px(double x) const {
    return kML + (x - x_min_) / (x_max_ - x_min_) * (kW - kML - kMR);
}

double SvgPlot::py(double y) const {
    return kH - kMB - (y - y_min_) / (y_max_ - y_min_) * (kH - kMT - kMB);
}

void SvgPlot::add_polyline(const std::vector<std::pair<double, double>>& pts,
                           const std::string& color, double width) {
    if (pts.size() < 2) return;
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\""
       << width << "\" points=\"";
    for (const auto& [x, y] : pts) os << fmt(px(x)) << "," << fmt(py(y)) << " ";
    os << "\"/>";
    body_.push_back(os.str());
}

void SvgPlot::add_points(const std::vector<std::pair<double, double>>& pts,
                         const std::string& color, double radius) {
    for (const auto& [x, y] : pts) {
        std::ostringstream os;
        os << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
           << "\" r=\"" << radius << "\" fill=\"" << color << "\"/>";
        body_.push_back(os.str());
    }
}

std::string SvgPlot::render() const {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kW << " "
       << kH << "\">\n";
    os << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    // frame
    os << "<rect x=\"" << kML << "\" y=\"" << kMT << "\" width=\"" << kW - kML - kMR
       << "\" height=\"" << kH - kMT - kMB
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (double tx : nice_ticks(x_min_, x_max_)) {
        double x = px(tx);
        os << "<line x1=\"" << fmt(x) << "\" y1=\"" << kH - kMB << "\" x2=\""
           << fmt(x) << "\" y2=\"" << kH - kMB + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fmt(x) << "\" y=\"" << kH - kMB + 18
           << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(tx) << "</text>\n";
    }
    for (double ty : nice_ticks(y_min_, y_max_)) {
        double y = py(ty);
        os << "<line x1=\"" << kML - 5 << "\" y1=\"" << fmt(y) << "\" x2=\"" << kML
           << "\" y2=\"" << fmt(y) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << kML - 8 << "\" y=\"" << fmt(y + 4)
           << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(ty) << "</text>\n";
    }
    os << "<text x=\"" << (kML + kW - kMR) / 2 << "\" y=\"" << kH - 12
       << "\" font-size=\"13\" text-anchor=\"middle\">" << x_label_ << "</text>\n";
    os << "<text x=\"16\" y=\"" << (kMT + kH - kMB) / 2
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << (kMT + kH - kMB) / 2 << ")\">" << y_label_ << "</text>\n";
    for (const auto& b : body_) os << b << "\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace specgraph
