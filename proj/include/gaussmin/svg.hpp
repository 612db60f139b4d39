#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "gaussmin/format.hpp"

namespace gaussmin {

/// Single polyline in a fixed 640x400 viewport with axis lines and a title.
inline std::string svg_polyline(const std::string& title, const std::vector<double>& xs,
                                const std::vector<double>& ys) {
  constexpr double kWidth = 640.0;
  constexpr double kHeight = 400.0;
  constexpr double kMargin = 40.0;
  double xlo = xs.empty() ? 0.0 : *std::min_element(xs.begin(), xs.end());
  double xhi = xs.empty() ? 1.0 : *std::max_element(xs.begin(), xs.end());
  double ylo = ys.empty() ? 0.0 : *std::min_element(ys.begin(), ys.end());
  double yhi = ys.empty() ? 1.0 : *std::max_element(ys.begin(), ys.end());
  if (xhi == xlo) xhi = xlo + 1.0;
  if (yhi == ylo) {
    ylo -= 0.5;
    yhi += 0.5;
  }
  const auto px = [&](double x) { return kMargin + (x - xlo) / (xhi - xlo) * (kWidth - 2 * kMargin); };
  const auto py = [&](double y) {
    return kHeight - kMargin - (y - ylo) / (yhi - ylo) * (kHeight - 2 * kMargin);
  };
  const auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };

  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
      "viewBox=\"0 0 640 400\">\n"
      "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" + title + "</text>\n";
  out += "<rect x=\"40\" y=\"40\" width=\"560\" height=\"320\" fill=\"none\" stroke=\"#888\"/>\n";
  if (ylo < 0.0 && yhi > 0.0) {
    out += "<line x1=\"40\" x2=\"600\" y1=\"" + fmt(py(0.0)) + "\" y2=\"" + fmt(py(0.0)) +
           "\" stroke=\"#bbb\"/>\n";
  }
  out += "<text x=\"40\" y=\"378\" font-family=\"sans-serif\" font-size=\"11\">" +
         format_double(xlo) + "</text>\n";
  out += "<text x=\"600\" y=\"378\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">" + format_double(xhi) + "</text>\n";
  out += "<polyline fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    if (i) out += ' ';
    out += fmt(px(xs[i])) + "," + fmt(py(ys[i]));
  }
  out += "\"/>\n</svg>\n";
  return out;
}

}  // namespace gaussmin
