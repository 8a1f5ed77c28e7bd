#include "spdc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "spdc/errors.hpp"

namespace spdc {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 190, kTop = 20, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void write_svg(std::ostream& out, const std::vector<ConvergenceTrace>& traces) {
  if (traces.empty()) throw ConfigError("emit_plot: no traces");

  double max_pass = 0.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const ConvergenceTrace& t : traces) {
    for (const TraceRecord& r : t.records) {
      if (!std::isfinite(r.gap) || !std::isfinite(r.pass)) continue;
      const double y = std::log10(std::max(r.gap, kPlotGapFloor));
      lo = std::min(lo, y);
      hi = std::max(hi, y);
      max_pass = std::max(max_pass, r.pass);
    }
  }
  if (!(lo <= hi)) lo = hi = 0.0;
  lo = std::floor(lo);
  hi = std::ceil(hi);
  if (hi == lo) hi = lo + 1.0;
  if (max_pass <= 0.0) max_pass = 1.0;

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double pass) { return kLeft + pw * pass / max_pass; };
  auto py = [&](double y) { return kTop + ph * (hi - y) / (hi - lo); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  const int ystep = static_cast<int>(std::max(1.0, std::ceil((hi - lo) / 10.0)));
  for (double y = lo; y <= hi; y += ystep) {
    out << "<line class=\"grid\" x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << num(py(y))
        << "\" y2=\"" << num(py(y)) << "\" stroke=\"#ddd\"/>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">1e"
        << static_cast<int>(y) << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double pass = max_pass * k / 5.0;
    char label[32];
    std::snprintf(label, sizeof label, "%g", pass);
    out << "<text x=\"" << num(px(pass)) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << label
        << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">number of passes</text>\n";
  out << "<text transform=\"translate(16," << kTop + ph / 2
      << ") rotate(-90)\" text-anchor=\"middle\">duality gap (log scale)</text>\n";

  for (std::size_t i = 0; i < traces.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    out << "<polyline class=\"trace\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const TraceRecord& r : traces[i].records) {
      if (!std::isfinite(r.gap) || !std::isfinite(r.pass)) continue;
      out << (first ? "" : " ") << num(px(r.pass)) << ',' << num(py(std::log10(std::max(r.gap, kPlotGapFloor))));
      first = false;
    }
    out << "\"/>\n";
    const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
    out << "<g class=\"legend\"><line x1=\"" << kLeft + pw + 12 << "\" x2=\"" << kLeft + pw + 36 << "\" y1=\""
        << ly << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\""
        << kLeft + pw + 42 << "\" y=\"" << ly + 4 << "\">" << escape(traces[i].label) << "</text></g>\n";
  }
  out << "</svg>\n";
}

void emit_plot(const std::vector<ConvergenceTrace>& traces, const std::string& path) {
  if (traces.empty()) throw ConfigError("emit_plot: no traces");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_svg(out, traces);
  if (!out) throw DataError("write failed for " + path);
}

}  // namespace spdc
