#include "fluxladder/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fluxladder/util.hpp"

namespace fluxladder {

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::comment(const std::string& text) {
    body_ << "<!-- " << xml_escape(text) << " -->\n";
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill,
                     const std::string& stroke, double stroke_width) {
    body_ << "<rect x=\"" << fmt_double(x) << "\" y=\"" << fmt_double(y) << "\" width=\""
          << fmt_double(w) << "\" height=\"" << fmt_double(h) << "\" fill=\"" << fill << "\"";
    if (stroke != "none")
        body_ << " stroke=\"" << stroke << "\" stroke-width=\"" << fmt_double(stroke_width)
              << "\"";
    body_ << "/>\n";
}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double width, bool dashed) {
    body_ << "<line x1=\"" << fmt_double(x1) << "\" y1=\"" << fmt_double(y1) << "\" x2=\""
          << fmt_double(x2) << "\" y2=\"" << fmt_double(y2) << "\" stroke=\"" << stroke
          << "\" stroke-width=\"" << fmt_double(width) << "\"";
    if (dashed) body_ << " stroke-dasharray=\"4 3\"";
    body_ << "/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill,
                       const std::string& stroke) {
    body_ << "<circle cx=\"" << fmt_double(cx) << "\" cy=\"" << fmt_double(cy) << "\" r=\""
          << fmt_double(r) << "\" fill=\"" << fill << "\"";
    if (stroke != "none") body_ << " stroke=\"" << stroke << "\"";
    body_ << "/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& content, double size,
                     const std::string& anchor, const std::string& fill) {
    body_ << "<text x=\"" << fmt_double(x) << "\" y=\"" << fmt_double(y) << "\" font-size=\""
          << fmt_double(size) << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor
          << "\" fill=\"" << fill << "\">" << xml_escape(content) << "</text>\n";
}

std::string SvgCanvas::finish() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt_double(width_)
       << "\" height=\"" << fmt_double(height_) << "\" viewBox=\"0 0 " << fmt_double(width_) << ' '
       << fmt_double(height_) << "\">\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << fmt_double(width_) << "\" height=\""
       << fmt_double(height_) << "\" fill=\"#ffffff\"/>\n";
    os << body_.str();
    os << "</svg>\n";
    return os.str();
}

std::string diverging_color(double v, double scale) {
    double t = scale > 0.0 ? std::clamp(v / scale, -1.0, 1.0) : 0.0;
    // blue (-1) -> white (0) -> red (+1)
    int r, g, b;
    if (t >= 0.0) {
        r = 255;
        g = static_cast<int>(std::lround(255.0 * (1.0 - t)));
        b = g;
    } else {
        b = 255;
        g = static_cast<int>(std::lround(255.0 * (1.0 + t)));
        r = g;
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace fluxladder
