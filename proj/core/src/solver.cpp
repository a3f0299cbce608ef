#include "hsfem/solver.hpp"

#include <cmath>
#include <string>

namespace hsfem {

namespace {

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

void true_residual(const SparseOperator& S, std::span<const double> b, std::span<const double> x,
                   std::span<double> r)
{
    S.multiply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = b[i] - r[i];
    }
}

} // namespace

SolveResult solve_spd(const SparseOperator& S, std::span<const double> b, const SolveOptions& options,
                      std::span<const double> initial_guess)
{
    const std::size_t n = S.size();
    if (b.size() != n || (!initial_guess.empty() && initial_guess.size() != n)) {
        throw InvalidArgument("solve_spd: dimension mismatch");
    }
    if (!(options.tolerance > 0.0)) {
        throw InvalidArgument("solve_spd: tolerance must be positive");
    }
    const std::size_t max_iter = options.max_iterations > 0 ? options.max_iterations : 10 * n;

    SolveResult result;
    result.x.assign(n, 0.0);
    if (!initial_guess.empty()) {
        result.x.assign(initial_guess.begin(), initial_guess.end());
    }
    SolveReport& rep = result.report;

    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        result.x.assign(n, 0.0);
        rep.converged = true;
        return result;
    }

    std::vector<double> inv_diag = S.diagonal_values();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(inv_diag[i] > 0.0)) {
            throw InvalidArgument("solve_spd: non-positive diagonal at row " + std::to_string(i));
        }
        inv_diag[i] = 1.0 / inv_diag[i];
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    auto& x = result.x;
    true_residual(S, b, x, r);
    rep.final_relative_residual = norm2(r) / bnorm;

    while (rep.final_relative_residual > options.tolerance) {
        // (Re)start from the current true residual.
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            p[i] = z[i];
        }
        double rz = dot(r, z);
        bool restart = false;
        while (!restart) {
            if (rep.iterations >= max_iter) {
                throw SolverError("conjugate gradients did not converge in " + std::to_string(max_iter) +
                                      " iterations (relative residual " +
                                      std::to_string(rep.final_relative_residual) + ")",
                                  rep);
            }
            S.multiply(p, q);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) {
                throw SolverError("conjugate gradients broke down: matrix is not positive definite", rep);
            }
            const double alpha = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            ++rep.iterations;
            if (norm2(r) / bnorm <= options.tolerance) {
                true_residual(S, b, x, r);
                rep.final_relative_residual = norm2(r) / bnorm;
                restart = true;
                continue;
            }
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = inv_diag[i] * r[i];
            }
            const double rz_new = dot(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
    rep.converged = true;
    return result;
}

} // namespace hsfem
