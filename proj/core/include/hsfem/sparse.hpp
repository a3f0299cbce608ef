#pragma once

#include "hsfem/mesh.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace hsfem {

/// Compressed-row sparsity pattern; column indices are sorted within each row.
struct CsrPattern {
    std::size_t rows = 0;
    std::vector<std::size_t> row_ptr; // rows + 1 entries
    std::vector<Index> col;

    std::size_t nnz() const { return col.size(); }
    /// Position of (i, j) in col/values, or nnz() when absent.
    std::size_t find(Index i, Index j) const;
};

/// Node-adjacency pattern of a triangulation (every pair sharing an element).
std::shared_ptr<const CsrPattern> node_pattern(const Mesh& mesh);

/// Square sparse matrix over mesh nodes in compressed row form.
///
/// Operators assembled on the same mesh share one pattern object, which lets
/// linear combinations skip the merge.
class SparseOperator {
public:
    SparseOperator() = default;
    explicit SparseOperator(std::shared_ptr<const CsrPattern> pattern);
    SparseOperator(std::shared_ptr<const CsrPattern> pattern, std::vector<double> values);

    /// Diagonal matrix.
    static SparseOperator diagonal(std::span<const double> diag);

    std::size_t size() const { return pattern_ ? pattern_->rows : 0; }
    std::size_t nnz() const { return values_.size(); }

    const CsrPattern& pattern() const { return *pattern_; }
    const std::shared_ptr<const CsrPattern>& pattern_ptr() const { return pattern_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    /// Entry (i, j); zero if outside the pattern.
    double operator()(Index i, Index j) const;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> operator*(std::span<const double> x) const;

    std::vector<double> diagonal_values() const;

    /// Largest |A(i,j) - A(j,i)| relative to the largest |entry|.
    double asymmetry() const;

private:
    std::shared_ptr<const CsrPattern> pattern_;
    std::vector<double> values_;
};

/// a*A + b*B. Dimensions must agree; patterns are merged when they differ.
SparseOperator linear_combination(double a, const SparseOperator& A, double b, const SparseOperator& B);

/// Adds d to the diagonal of A (the pattern must contain the diagonal).
void add_to_diagonal(SparseOperator& A, std::span<const double> d);

double dot(std::span<const double> a, std::span<const double> b);

struct OffDiagEntry {
    Index row = 0;
    Index col = 0;
    double value = 0.0;
};

struct OffDiagReport {
    double max_offdiag = 0.0;
    std::vector<OffDiagEntry> violations; // entries > threshold
};

/// Scans all stored off-diagonal entries; entries above `threshold` are listed.
OffDiagReport offdiag_sign_check(const SparseOperator& A, double threshold = 1e-14);

/// min over rows of (A(i,i) - sum_{j != i} |A(i,j)|).
double diagonal_dominance_margin(const SparseOperator& A);

} // namespace hsfem
