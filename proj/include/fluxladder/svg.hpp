#pragma once

#include <sstream>
#include <string>

namespace fluxladder {

// Minimal SVG canvas; enough for heatmaps, scatter plots and bar charts.
// Coordinates are in user units, origin top-left.
class SvgCanvas {
public:
    SvgCanvas(double width, double height);

    void comment(const std::string& text);
    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none", double stroke_width = 0.0);
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0, bool dashed = false);
    void circle(double cx, double cy, double r, const std::string& fill,
                const std::string& stroke = "none");
    void text(double x, double y, const std::string& content, double size = 12.0,
              const std::string& anchor = "start", const std::string& fill = "#000000");

    std::string finish() const;

private:
    double width_;
    double height_;
    std::ostringstream body_;
};

// Diverging blue-white-red color for v in [-scale, scale].
std::string diverging_color(double v, double scale);

std::string xml_escape(const std::string& s);

}  // namespace fluxladder
