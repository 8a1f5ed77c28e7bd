#include "spdc/trace.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/numerics.hpp"

namespace spdc {

const char* const kTraceHeader = "pass,primal,dual,gap,dist_x,dist_y,wall_ms";

TraceRecord make_record(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> x,
                        std::span<const double> y, double pass, const SaddlePoint* reference, double wall_ms) {
  TraceRecord r;
  r.pass = pass;
  r.primal = eval_primal(ds, loss, reg, x);
  r.dual = eval_dual(ds, loss, reg, y);
  r.gap = r.primal - r.dual;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  r.dist_x = reference ? squared_distance(x, reference->x) : nan;
  r.dist_y = reference ? squared_distance(y, reference->y) : nan;
  r.wall_ms = wall_ms;
  return r;
}

namespace {

void put(std::ostream& out, double v, char sep) {
  char buf[40];
  if (std::isnan(v)) {
    std::snprintf(buf, sizeof buf, "nan%c", sep);
  } else if (std::isinf(v)) {
    std::snprintf(buf, sizeof buf, "%sinf%c", v < 0 ? "-" : "", sep);
  } else {
    std::snprintf(buf, sizeof buf, "%.16e%c", v, sep);
  }
  out << buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  out << kTraceHeader << '\n';
  for (const TraceRecord& r : trace.records) {
    put(out, r.pass, ',');
    put(out, r.primal, ',');
    put(out, r.dual, ',');
    put(out, r.gap, ',');
    put(out, r.dist_x, ',');
    put(out, r.dist_y, ',');
    put(out, r.wall_ms, '\n');
  }
}

void save_trace_csv(const std::string& path, const ConvergenceTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_trace_csv(out, trace);
  if (!out) throw DataError("write failed for " + path);
}

ConvergenceTrace read_trace_csv(std::istream& in, std::string label) {
  ConvergenceTrace trace;
  trace.label = std::move(label);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw DataError("trace file lacks the expected header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double vals[7];
    int k = 0;
    while (std::getline(ss, cell, ',')) {
      if (k == 7) throw ParseError(line_no, "too many columns");
      char* end = nullptr;
      vals[k] = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0') throw ParseError(line_no, "malformed number '" + cell + "'");
      ++k;
    }
    if (k != 7) throw ParseError(line_no, "expected 7 columns");
    trace.records.push_back({vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6]});
  }
  return trace;
}

ConvergenceTrace load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string label = path;
  if (auto slash = label.find_last_of('/'); slash != std::string::npos) label = label.substr(slash + 1);
  if (auto dot = label.rfind(".csv"); dot != std::string::npos) label = label.substr(0, dot);
  return read_trace_csv(in, label);
}

double passes_to_gap(const ConvergenceTrace& trace, double target) {
  for (const TraceRecord& r : trace.records) {
    if (r.gap <= target) return r.pass;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace spdc
