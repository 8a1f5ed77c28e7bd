#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "spdc/objectives.hpp"

namespace spdc {

struct TraceRecord {
  double pass = 0.0;      // equivalent passes over the data
  double primal = 0.0;    // P(x)
  double dual = 0.0;      // D(y)
  double gap = 0.0;       // P(x) - D(y)
  double dist_x = 0.0;    // ||x - x*||^2, NaN without a reference
  double dist_y = 0.0;    // ||y - y*||^2, NaN without a reference
  double wall_ms = 0.0;   // 0 unless wall-clock recording is enabled
};

struct ConvergenceTrace {
  std::string label;
  std::vector<TraceRecord> records;
};

/// Evaluates one record for the iterate pair (x, y).
TraceRecord make_record(const DataSet& ds, const Loss& loss, const Regularizer& reg, std::span<const double> x,
                        std::span<const double> y, double pass, const SaddlePoint* reference, double wall_ms);

/// CSV with header "pass,primal,dual,gap,dist_x,dist_y,wall_ms" and every value
/// printed as "%.16e" (17 significant digits), so files are byte-stable.
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);
void save_trace_csv(const std::string& path, const ConvergenceTrace& trace);
ConvergenceTrace read_trace_csv(std::istream& in, std::string label = {});
ConvergenceTrace load_trace_csv(const std::string& path);

/// Number of passes at the first record whose gap is <= target; +inf if none.
double passes_to_gap(const ConvergenceTrace& trace, double target);

extern const char* const kTraceHeader;

}  // namespace spdc
