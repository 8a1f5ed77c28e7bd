#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace spdc {

struct Entry {
  std::uint32_t index;  // 0-based feature index
  double value;
};

/// Read-only view of one feature row a_i.
using RowView = std::span<const Entry>;

/// Immutable training set: n sparse rows a_i over d features, labels b_i and
/// cached row norms. Rows are stored in CSR layout; every constructor goes
/// through `validate_and_index`, so the invariants (strictly increasing
/// in-range indices, finite values, consistent norms) always hold.
class DataSet {
 public:
  /// `row_ptr` has n + 1 entries; row i is entries[row_ptr[i], row_ptr[i+1]).
  DataSet(std::size_t dim, std::vector<std::size_t> row_ptr, std::vector<Entry> entries,
          std::vector<double> labels);

  std::size_t n() const { return labels_.size(); }
  std::size_t d() const { return dim_; }
  std::size_t nnz() const { return entries_.size(); }

  RowView row(std::size_t i) const {
    return {entries_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  double label(std::size_t i) const { return labels_[i]; }
  std::span<const double> labels() const { return labels_; }
  double row_norm(std::size_t i) const { return row_norms_[i]; }
  std::span<const double> row_norms() const { return row_norms_; }

  /// R = max_i ||a_i||.
  double max_norm() const { return max_norm_; }
  /// R-bar = (1/n) sum_i ||a_i||.
  double mean_norm() const { return mean_norm_; }

  /// <a_i, x> for a dense x of length d.
  double dot(std::size_t i, std::span<const double> x) const;

  friend bool operator==(const DataSet& a, const DataSet& b);

 private:
  void validate_and_index();

  std::size_t dim_;
  std::vector<std::size_t> row_ptr_;
  std::vector<Entry> entries_;
  std::vector<double> labels_;
  std::vector<double> row_norms_;
  double max_norm_ = 0.0;
  double mean_norm_ = 0.0;
};

/// Incremental row-by-row construction.
class DataSetBuilder {
 public:
  void add_row(std::vector<Entry> row, double label);
  /// d = max(max index + 1, min_dim).
  DataSet build(std::size_t min_dim = 0) &&;

 private:
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Entry> entries_;
  std::vector<double> labels_;
  std::size_t max_index_plus_one_ = 0;
};

/// Parses LIBSVM text ("label idx:val idx:val ..." with 1-based indices).
/// Blank lines and trailing whitespace are skipped; "#" starts a comment.
/// The dimension is max(largest index seen, min_dim). Throws ParseError.
DataSet parse_libsvm(std::istream& in, std::size_t min_dim = 0);
DataSet load_libsvm(const std::string& path, std::size_t min_dim = 0);

/// Writes LIBSVM text with 1-based indices and round-trip ("%.17g") numbers.
void write_libsvm(std::ostream& out, const DataSet& ds);
void save_libsvm(const std::string& path, const DataSet& ds);

/// Ridge-regression generator: a_i ~ N(0, diag(j^-2)), b_i = <a_i, 1> + N(0,1).
/// Rows carry all d entries. Deterministic in `seed`.
DataSet generate_synthetic(std::size_t n, std::size_t d, std::uint64_t seed);

/// Random sparse classification data: every entry present independently with
/// probability `density` (at least one per row), values N(0,1), rows scaled to
/// unit norm, labels sign(<a_i, w>) for a random Gaussian w.
DataSet generate_sparse(std::size_t n, std::size_t d, double density, std::uint64_t seed);

/// Copy of `ds` with the listed rows multiplied by `factor` (> 0).
DataSet scale_row_norms(const DataSet& ds, std::span<const std::size_t> rows, double factor);

/// Copy of `ds` with every non-empty row scaled to unit l2 norm.
DataSet normalize_rows(const DataSet& ds);

}  // namespace spdc
