#include "hsfem/sparse.hpp"

#include "hsfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsfem {

std::size_t CsrPattern::find(Index i, Index j) const
{
    const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) {
        return nnz();
    }
    return static_cast<std::size_t>(it - col.begin());
}

std::shared_ptr<const CsrPattern> node_pattern(const Mesh& mesh)
{
    const std::size_t n = mesh.num_nodes();
    std::vector<std::vector<Index>> adj(n);
    for (Index a = 0; a < n; ++a) {
        adj[a].push_back(a);
    }
    for (const Triangle& t : mesh.elements()) {
        for (Index a : t) {
            for (Index b : t) {
                if (a != b) {
                    adj[a].push_back(b);
                }
            }
        }
    }
    auto p = std::make_shared<CsrPattern>();
    p->rows = n;
    p->row_ptr.assign(n + 1, 0);
    for (Index a = 0; a < n; ++a) {
        auto& row = adj[a];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        p->row_ptr[a + 1] = p->row_ptr[a] + row.size();
    }
    p->col.reserve(p->row_ptr[n]);
    for (const auto& row : adj) {
        p->col.insert(p->col.end(), row.begin(), row.end());
    }
    return p;
}

SparseOperator::SparseOperator(std::shared_ptr<const CsrPattern> pattern)
    : pattern_(std::move(pattern)), values_(pattern_->nnz(), 0.0)
{
}

SparseOperator::SparseOperator(std::shared_ptr<const CsrPattern> pattern, std::vector<double> values)
    : pattern_(std::move(pattern)), values_(std::move(values))
{
    if (values_.size() != pattern_->nnz()) {
        throw InvalidArgument("SparseOperator: value count does not match pattern");
    }
}

SparseOperator SparseOperator::diagonal(std::span<const double> diag)
{
    auto p = std::make_shared<CsrPattern>();
    p->rows = diag.size();
    p->row_ptr.resize(diag.size() + 1);
    p->col.resize(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
        p->row_ptr[i] = i;
        p->col[i] = i;
    }
    p->row_ptr[diag.size()] = diag.size();
    return SparseOperator(std::move(p), std::vector<double>(diag.begin(), diag.end()));
}

double SparseOperator::operator()(Index i, Index j) const
{
    if (i >= size() || j >= size()) {
        throw InvalidArgument("SparseOperator: index out of range");
    }
    const std::size_t k = pattern_->find(i, j);
    return k == nnz() ? 0.0 : values_[k];
}

void SparseOperator::multiply(std::span<const double> x, std::span<double> y) const
{
    const std::size_t n = size();
    if (x.size() != n || y.size() != n) {
        throw InvalidArgument("SparseOperator::multiply: dimension mismatch");
    }
    const auto& rp = pattern_->row_ptr;
    const auto& col = pattern_->col;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            s += values_[k] * x[col[k]];
        }
        y[i] = s;
    }
}

std::vector<double> SparseOperator::operator*(std::span<const double> x) const
{
    std::vector<double> y(size());
    multiply(x, y);
    return y;
}

std::vector<double> SparseOperator::diagonal_values() const
{
    std::vector<double> d(size(), 0.0);
    for (Index i = 0; i < size(); ++i) {
        const std::size_t k = pattern_->find(i, i);
        if (k != nnz()) {
            d[i] = values_[k];
        }
    }
    return d;
}

double SparseOperator::asymmetry() const
{
    double scale = 0.0;
    for (double v : values_) {
        scale = std::max(scale, std::abs(v));
    }
    if (scale == 0.0) {
        return 0.0;
    }
    double worst = 0.0;
    const auto& rp = pattern_->row_ptr;
    const auto& col = pattern_->col;
    for (Index i = 0; i < size(); ++i) {
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            worst = std::max(worst, std::abs(values_[k] - (*this)(col[k], i)));
        }
    }
    return worst / scale;
}

SparseOperator linear_combination(double a, const SparseOperator& A, double b, const SparseOperator& B)
{
    if (A.size() != B.size()) {
        throw InvalidArgument("linear_combination: dimension mismatch");
    }
    if (A.pattern_ptr() == B.pattern_ptr()) {
        std::vector<double> v(A.nnz());
        const auto av = A.values();
        const auto bv = B.values();
        for (std::size_t k = 0; k < v.size(); ++k) {
            v[k] = a * av[k] + b * bv[k];
        }
        return SparseOperator(A.pattern_ptr(), std::move(v));
    }

    const CsrPattern& pa = A.pattern();
    const CsrPattern& pb = B.pattern();
    auto p = std::make_shared<CsrPattern>();
    p->rows = A.size();
    p->row_ptr.assign(p->rows + 1, 0);
    std::vector<double> v;
    for (Index i = 0; i < p->rows; ++i) {
        std::size_t ka = pa.row_ptr[i], kb = pb.row_ptr[i];
        const std::size_t ea = pa.row_ptr[i + 1], eb = pb.row_ptr[i + 1];
        while (ka < ea || kb < eb) {
            const Index ca = ka < ea ? pa.col[ka] : std::numeric_limits<Index>::max();
            const Index cb = kb < eb ? pb.col[kb] : std::numeric_limits<Index>::max();
            if (ca == cb) {
                p->col.push_back(ca);
                v.push_back(a * A.values()[ka++] + b * B.values()[kb++]);
            } else if (ca < cb) {
                p->col.push_back(ca);
                v.push_back(a * A.values()[ka++]);
            } else {
                p->col.push_back(cb);
                v.push_back(b * B.values()[kb++]);
            }
        }
        p->row_ptr[i + 1] = p->col.size();
    }
    return SparseOperator(std::move(p), std::move(v));
}

void add_to_diagonal(SparseOperator& A, std::span<const double> d)
{
    if (d.size() != A.size()) {
        throw InvalidArgument("add_to_diagonal: dimension mismatch");
    }
    auto values = A.values();
    for (Index i = 0; i < A.size(); ++i) {
        const std::size_t k = A.pattern().find(i, i);
        if (k == A.nnz()) {
            throw InvalidArgument("add_to_diagonal: pattern lacks a diagonal entry");
        }
        values[k] += d[i];
    }
}

double dot(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw InvalidArgument("dot: dimension mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

OffDiagReport offdiag_sign_check(const SparseOperator& A, double threshold)
{
    OffDiagReport report;
    report.max_offdiag = -std::numeric_limits<double>::infinity();
    const auto& rp = A.pattern().row_ptr;
    const auto& col = A.pattern().col;
    const auto vals = A.values();
    bool any = false;
    for (Index i = 0; i < A.size(); ++i) {
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            if (col[k] == i) {
                continue;
            }
            any = true;
            report.max_offdiag = std::max(report.max_offdiag, vals[k]);
            if (vals[k] > threshold) {
                report.violations.push_back({i, col[k], vals[k]});
            }
        }
    }
    if (!any) {
        report.max_offdiag = 0.0;
    }
    return report;
}

double diagonal_dominance_margin(const SparseOperator& A)
{
    double margin = std::numeric_limits<double>::infinity();
    const auto& rp = A.pattern().row_ptr;
    const auto& col = A.pattern().col;
    const auto vals = A.values();
    for (Index i = 0; i < A.size(); ++i) {
        double diag = 0.0, off = 0.0;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            if (col[k] == i) {
                diag += vals[k];
            } else {
                off += std::abs(vals[k]);
            }
        }
        margin = std::min(margin, diag - off);
    }
    return margin;
}

} // namespace hsfem
