#include <cstdio>
#include <string>

#include "nmfcheck_cli/records.hpp"

namespace nmfcheck::cli {
namespace {

constexpr double kSize = 360.0;
constexpr double kMargin = 48.0;

double px(double u) { return kMargin + u * kSize; }
double py(double u) { return kMargin + (1.0 - u) * kSize; }

std::string fmt(const char* pattern, double a, double b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_pp_svg(const PpPlotData& pp, std::string_view title) {
  const double full = kSize + 2 * kMargin;
  const double t = pp.error_band;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    fmt("%.0f", full, 0) + "\" height=\"" + fmt("%.0f", full, 0) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Band y = x +/- T, clipped to the unit square.
  svg += "<polygon fill=\"#dde6f3\" stroke=\"none\" points=\"";
  svg += fmt("%.2f,%.2f ", px(0), py(std::min(1.0, t)));
  svg += fmt("%.2f,%.2f ", px(std::max(0.0, 1.0 - t)), py(1));
  svg += fmt("%.2f,%.2f ", px(1), py(1));
  svg += fmt("%.2f,%.2f ", px(1), py(std::max(0.0, 1.0 - t)));
  svg += fmt("%.2f,%.2f ", px(std::min(1.0, t)), py(0));
  svg += fmt("%.2f,%.2f", px(0), py(0));
  svg += "\"/>\n";

  svg += "<rect x=\"" + fmt("%.2f", px(0), 0) + "\" y=\"" + fmt("%.2f", py(1), 0) +
         "\" width=\"" + fmt("%.2f", kSize, 0) + "\" height=\"" + fmt("%.2f", kSize, 0) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt("%.2f", px(0), 0) + "\" y1=\"" + fmt("%.2f", py(0), 0) +
         "\" x2=\"" + fmt("%.2f", px(1), 0) + "\" y2=\"" + fmt("%.2f", py(1), 0) +
         "\" stroke=\"#555\" stroke-dasharray=\"4 3\"/>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    const double u = tick / 4.0;
    svg += "<text x=\"" + fmt("%.2f", px(u), 0) + "\" y=\"" + fmt("%.2f", py(0) + 16, 0) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + fmt("%.2f", u, 0) + "</text>\n";
    svg += "<text x=\"" + fmt("%.2f", px(0) - 6, 0) + "\" y=\"" + fmt("%.2f", py(u) + 4, 0) +
           "\" font-size=\"11\" text-anchor=\"end\">" + fmt("%.2f", u, 0) + "</text>\n";
  }

  for (const auto& p : pp.points) {
    svg += "<circle cx=\"" + fmt("%.2f", px(p.theoretical), 0) + "\" cy=\"" +
           fmt("%.2f", py(p.empirical), 0) + "\" r=\"2.5\" fill=\"#1f4e9c\"/>\n";
  }

  svg += "<text x=\"" + fmt("%.2f", full / 2, 0) + "\" y=\"28\" font-size=\"14\" " +
         "text-anchor=\"middle\">" + escape(title) + "</text>\n";
  svg += "<text x=\"" + fmt("%.2f", full / 2, 0) + "\" y=\"" + fmt("%.2f", full - 10, 0) +
         "\" font-size=\"12\" text-anchor=\"middle\">uniform quantile</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace nmfcheck::cli
