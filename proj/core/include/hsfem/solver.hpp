#pragma once

#include "hsfem/errors.hpp"
#include "hsfem/sparse.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace hsfem {

struct SolveOptions {
    double tolerance = 1e-12; ///< on ||S x - b|| / ||b||
    std::size_t max_iterations = 0; ///< 0 means 10 * rows
};

struct SolveReport {
    std::size_t iterations = 0;
    double final_relative_residual = 0.0;
    bool converged = false;
};

struct SolveResult {
    std::vector<double> x;
    SolveReport report;
};

/// Thrown when conjugate gradients exhausts its iteration budget.
class SolverError : public Error {
public:
    SolverError(const std::string& what, SolveReport report) : Error(what), report_(report) {}
    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

/// Jacobi-preconditioned conjugate gradients for symmetric positive definite S.
/// `initial_guess` may be empty (zero start). Convergence is declared on the
/// true residual, not the recursively updated one.
SolveResult solve_spd(const SparseOperator& S, std::span<const double> b, const SolveOptions& options = {},
                      std::span<const double> initial_guess = {});

} // namespace hsfem
