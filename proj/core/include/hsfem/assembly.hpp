#pragma once

#include "hsfem/fespace.hpp"
#include "hsfem/mesh.hpp"
#include "hsfem/model.hpp"
#include "hsfem/sparse.hpp"

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace hsfem {

/// How the n^(k-1) weight of the scalar-weighted operator is integrated per element.
enum class WeightQuadrature {
    Vertex,   ///< k * mean over vertices of n^(k-1)
    Centroid, ///< k * (mean over vertices of n)^(k-1)
};

/// Spatial scheme for the pressure-driven diffusion term.
enum class Scheme {
    Fem,  ///< divided-difference diagonal coefficients (axis-aligned right-angled meshes)
    Fem2, ///< scalar n^(k-1) weight (nonobtuse meshes)
};

/// Diagonal diffusion coefficient (d_x, d_y) of one element.
using AxisCoeff = std::array<double, 2>;

/// Divided difference (b^k - a^k)/(b - a) along one leg, replaced by the
/// mean-value limit k ((a+b)/2)^(k-1) when |b - a| < 1e-8 max(1, a, b).
double divided_power_difference(double a, double b, int k);

/// Element assembly over a fixed mesh. Builds the node pattern and the
/// element-to-slot scatter map once so per-step operators only refill values.
/// The mesh must outlive the assembler.
class Assembler {
public:
    explicit Assembler(const Mesh& mesh);

    const Mesh& mesh() const { return *mesh_; }
    const std::shared_ptr<const CsrPattern>& pattern() const { return pattern_; }
    bool right_angled() const { return right_angled_; }
    bool nonobtuse() const { return nonobtuse_; }

    /// Geometric stiffness K[a,b] = (grad phi_a, grad phi_b).
    SparseOperator stiffness() const;
    /// Consistent P1 mass, element matrix area/12 [[2,1,1],[1,2,1],[1,1,2]].
    SparseOperator consistent_mass() const;

    /// Per-element axis coefficients of the divided-difference diffusion.
    /// Requires axis-aligned right angles and n >= 0.
    std::vector<AxisCoeff> fem_coefficients(std::span<const double> n, int k) const;
    /// Per-element scalar weights of the n^(k-1) diffusion. Requires n >= 0.
    std::vector<double> fem2_weights(std::span<const double> n, int k,
                                     WeightQuadrature quad = WeightQuadrature::Vertex) const;

    /// sum_K (D_K grad phi_a, grad phi_b)_K for diagonal per-element D_K.
    SparseOperator axis_weighted_stiffness(std::span<const AxisCoeff> coeff) const;
    /// sum_K w_K (grad phi_a, grad phi_b)_K.
    SparseOperator weighted_stiffness(std::span<const double> weights) const;

    /// A_D(n) with A_D(n) n = K I_h(n^k). Throws UnsupportedMesh off right-angled meshes.
    SparseOperator diffusion_fem(std::span<const double> n, int k) const;
    /// k (n^(k-1) grad u, grad v). Throws UnsupportedMesh on obtuse meshes.
    SparseOperator diffusion_fem2(std::span<const double> n, int k,
                                  WeightQuadrature quad = WeightQuadrature::Vertex) const;

    /// Zero operator on the node pattern.
    SparseOperator zero() const { return SparseOperator(pattern_); }

private:
    void check_nonnegative(std::span<const double> n) const;

    const Mesh* mesh_;
    std::shared_ptr<const CsrPattern> pattern_;
    std::vector<std::array<std::size_t, 9>> slots_;
    // Local index of the vertex across the x-leg / y-leg from the right angle, per element.
    std::vector<std::array<int, 3>> legs_;
    bool right_angled_ = false;
    bool nonobtuse_ = false;
};

SparseOperator stiffness(const Mesh& mesh);
SparseOperator consistent_mass(const Mesh& mesh);
SparseOperator diffusion_fem(const Mesh& mesh, const Field& n, int k);
SparseOperator diffusion_fem2(const Mesh& mesh, const Field& n, int k,
                              WeightQuadrature quad = WeightQuadrature::Vertex);

/// Pressure-driven diffusion operator of `scheme` frozen at density n; the zero
/// operator when params.nonlinear_diffusion is false.
SparseOperator diffusion_operator(const Assembler& assembler, Scheme scheme, std::span<const double> n,
                                  const ModelParams& params, WeightQuadrature quad = WeightQuadrature::Vertex);

/// diag(M)/tau + A_diff + nu K.
SparseOperator system_matrix(const LumpedMass& mass, double tau, const SparseOperator& diffusion, double nu,
                             const SparseOperator& stiffness);

} // namespace hsfem
