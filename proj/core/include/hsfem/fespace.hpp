#pragma once

#include "hsfem/mesh.hpp"
#include "hsfem/sparse.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace hsfem {

/// Nodal coefficient vector of a continuous P1 function.
class Field {
public:
    Field() = default;
    Field(MeshPtr mesh, std::vector<double> values);
    /// Constant field.
    Field(MeshPtr mesh, double value);

    const MeshPtr& mesh() const { return mesh_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](Index a) const { return values_[a]; }
    double& operator[](Index a) { return values_[a]; }

private:
    MeshPtr mesh_;
    std::vector<double> values_;
};

/// Diagonal of the lumped mass matrix: diag[a] = integral of phi_a.
struct LumpedMass {
    std::vector<double> diag;

    std::size_t size() const { return diag.size(); }
    double total() const;
};

LumpedMass lumped_mass(const Mesh& mesh);

using ScalarFunction = std::function<double(double, double)>;

/// I_h f: values[a] = f(node a). Throws EvaluationError on a non-finite value.
Field nodal_interpolate(MeshPtr mesh, const ScalarFunction& f);

/// Lumped (closed-nodal) inner product sum_a u[a] v[a] diag[a].
double inner_h(const Field& u, const Field& v, const LumpedMass& mass);
double norm_h(const Field& u, const LumpedMass& mass);

/// Exact L2 inner product of two P1 functions (consistent mass).
double inner_l2(const Field& u, const Field& v);
double norm_l2(const Field& u);

/// (Laplacian_h v)[a] = -(K v)[a] / diag[a].
Field discrete_laplacian(const SparseOperator& stiffness, const LumpedMass& mass, const Field& v);

/// || u v - I_h(u v) ||_{L1(Omega)}.
double interp_product_l1_error(const Field& u, const Field& v);

/// sqrt(K v . v), the H1 seminorm of the P1 function with coefficients v.
double dirichlet_seminorm(const SparseOperator& stiffness, std::span<const double> v);

/// Value of the P1 function at (x, y); empty when the point lies outside the mesh.
std::optional<double> evaluate_p1(const Mesh& mesh, std::span<const double> values, Point at);

/// || u_h - f ||_{L2} with a degree-4 quadrature on every element.
double l2_error(const Field& u, const ScalarFunction& f);

} // namespace hsfem
