#pragma once

#include <string>
#include <vector>

namespace specgraph {

// Minimal deterministic SVG scatter/polyline plot: lambda horizontal,
// t vertical, fixed viewbox, axis ticks.  No external plotting dependency.
class SvgPlot {
public:
    SvgPlot(double x_min, double x_max, double y_min, double y_max,
            std::string x_label = "lambda", std::string y_label = "t");

    void add_polyline(const std::vector<std::pair<double, double>>& pts,
                      const std::string& color, double width = 1.2);
    void add_points(const std::vector<std::pair<double, double>>& pts,
                    const std::string& color, double radius = 2.0);
    std::string render() const;

private:
    double x_min_, x_max_, y_min_, y_max_;
    std::string x_label_, y_label_;
    std::vector<std::string> body_;

    double px(double x) const;
    double py(double y) const;
};

}  // namespace specgraph
