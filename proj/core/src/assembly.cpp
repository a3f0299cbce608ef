#include "hsfem/assembly.hpp"

#include "hsfem/errors.hpp"
#include "hsfem/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hsfem {

double divided_power_difference(double a, double b, int k)
{
    if (a < 0.0 || b < 0.0) {
        throw DomainError("divided_power_difference: negative density");
    }
    if (std::abs(b - a) < 1e-8 * std::max({1.0, a, b})) {
        return static_cast<double>(k) * power_k(0.5 * (a + b), k - 1);
    }
    return (power_k(b, k) - power_k(a, k)) / (b - a);
}

Assembler::Assembler(const Mesh& mesh) : mesh_(&mesh), pattern_(node_pattern(mesh))
{
    slots_.resize(mesh.num_elements());
    legs_.resize(mesh.num_elements());
    right_angled_ = true;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const Triangle& t = mesh.element(e);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                slots_[e][3 * i + j] = pattern_->find(t[i], t[j]);
            }
        }
        const ElemGeom& g = mesh.geometry(e);
        if (!g.right_vertex) {
            right_angled_ = false;
            legs_[e] = {-1, -1, -1};
            continue;
        }
        const int r = *g.right_vertex;
        const int a = (r + 1) % 3;
        const int b = (r + 2) % 3;
        const Point& pr = mesh.node(t[static_cast<std::size_t>(r)]);
        const Point& pa = mesh.node(t[static_cast<std::size_t>(a)]);
        const bool a_on_x = std::abs(pa.x - pr.x) > std::abs(pa.y - pr.y);
        legs_[e] = {r, a_on_x ? a : b, a_on_x ? b : a};
    }
    nonobtuse_ = classify_angles(mesh).all_nonobtuse;
}

void Assembler::check_nonnegative(std::span<const double> n) const
{
    if (n.size() != mesh_->num_nodes()) {
        throw InvalidArgument("density vector does not match node count");
    }
    for (Index a = 0; a < n.size(); ++a) {
        if (!(n[a] >= 0.0)) {
            throw DomainError("negative or NaN nodal density at node " + std::to_string(a));
        }
    }
}

SparseOperator Assembler::axis_weighted_stiffness(std::span<const AxisCoeff> coeff) const
{
    if (coeff.size() != mesh_->num_elements()) {
        throw InvalidArgument("axis_weighted_stiffness: one coefficient per element expected");
    }
    SparseOperator A(pattern_);
    auto values = A.values();
    for (Index e = 0; e < mesh_->num_elements(); ++e) {
        const ElemGeom& g = mesh_->geometry(e);
        const double dx = coeff[e][0] * g.area;
        const double dy = coeff[e][1] * g.area;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                values[slots_[e][3 * i + j]] += dx * g.grad[i].x * g.grad[j].x + dy * g.grad[i].y * g.grad[j].y;
            }
        }
    }
    return A;
}

SparseOperator Assembler::weighted_stiffness(std::span<const double> weights) const
{
    if (weights.size() != mesh_->num_elements()) {
        throw InvalidArgument("weighted_stiffness: one weight per element expected");
    }
    SparseOperator A(pattern_);
    auto values = A.values();
    for (Index e = 0; e < mesh_->num_elements(); ++e) {
        const ElemGeom& g = mesh_->geometry(e);
        const double w = weights[e] * g.area;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                values[slots_[e][3 * i + j]] += w * dot(g.grad[i], g.grad[j]);
            }
        }
    }
    return A;
}

SparseOperator Assembler::stiffness() const
{
    const std::vector<double> ones(mesh_->num_elements(), 1.0);
    return weighted_stiffness(ones);
}

SparseOperator Assembler::consistent_mass() const
{
    SparseOperator M(pattern_);
    auto values = M.values();
    for (Index e = 0; e < mesh_->num_elements(); ++e) {
        const double a12 = mesh_->geometry(e).area / 12.0;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                values[slots_[e][3 * i + j]] += (i == j ? 2.0 : 1.0) * a12;
            }
        }
    }
    return M;
}

std::vector<AxisCoeff> Assembler::fem_coefficients(std::span<const double> n, int k) const
{
    if (!right_angled_) {
        throw UnsupportedMesh("divided-difference diffusion needs axis-aligned right-angled elements");
    }
    check_nonnegative(n);
    std::vector<AxisCoeff> coeff(mesh_->num_elements());
    for (Index e = 0; e < mesh_->num_elements(); ++e) {
        const Triangle& t = mesh_->element(e);
        const auto& [r, vx, vy] = legs_[e];
        const double n0 = n[t[static_cast<std::size_t>(r)]];
        coeff[e] = {divided_power_difference(n0, n[t[static_cast<std::size_t>(vx)]], k),
                    divided_power_difference(n0, n[t[static_cast<std::size_t>(vy)]], k)};
    }
    return coeff;
}

std::vector<double> Assembler::fem2_weights(std::span<const double> n, int k, WeightQuadrature quad) const
{
    check_nonnegative(n);
    std::vector<double> w(mesh_->num_elements());
    const auto kd = static_cast<double>(k);
    if (quad == WeightQuadrature::Vertex) {
        std::vector<double> nodal(n.size());
        for (Index a = 0; a < n.size(); ++a) {
            nodal[a] = power_k(n[a], k - 1);
        }
        for (Index e = 0; e < mesh_->num_elements(); ++e) {
            const Triangle& t = mesh_->element(e);
            w[e] = kd * (nodal[t[0]] + nodal[t[1]] + nodal[t[2]]) / 3.0;
        }
        return w;
    }
    for (Index e = 0; e < mesh_->num_elements(); ++e) {
        const Triangle& t = mesh_->element(e);
        w[e] = kd * power_k((n[t[0]] + n[t[1]] + n[t[2]]) / 3.0, k - 1);
    }
    return w;
}

SparseOperator Assembler::diffusion_fem(std::span<const double> n, int k) const
{
    return axis_weighted_stiffness(fem_coefficients(n, k));
}

SparseOperator Assembler::diffusion_fem2(std::span<const double> n, int k, WeightQuadrature quad) const
{
    if (!nonobtuse_) {
        throw UnsupportedMesh("scalar-weighted diffusion needs a triangulation without obtuse angles");
    }
    return weighted_stiffness(fem2_weights(n, k, quad));
}

SparseOperator stiffness(const Mesh& mesh) { return Assembler(mesh).stiffness(); }

SparseOperator consistent_mass(const Mesh& mesh) { return Assembler(mesh).consistent_mass(); }

SparseOperator diffusion_fem(const Mesh& mesh, const Field& n, int k)
{
    return Assembler(mesh).diffusion_fem(n.values(), k);
}

SparseOperator diffusion_fem2(const Mesh& mesh, const Field& n, int k, WeightQuadrature quad)
{
    return Assembler(mesh).diffusion_fem2(n.values(), k, quad);
}

SparseOperator diffusion_operator(const Assembler& assembler, Scheme scheme, std::span<const double> n,
                                  const ModelParams& params, WeightQuadrature quad)
{
    if (!params.nonlinear_diffusion) {
        return assembler.zero();
    }
    return scheme == Scheme::Fem ? assembler.diffusion_fem(n, params.k)
                                 : assembler.diffusion_fem2(n, params.k, quad);
}

SparseOperator system_matrix(const LumpedMass& mass, double tau, const SparseOperator& diffusion, double nu,
                             const SparseOperator& stiffness)
{
    if (diffusion.size() != stiffness.size() || mass.size() != stiffness.size()) {
        throw InvalidArgument("system_matrix: dimension mismatch");
    }
    if (!(tau > 0.0)) {
        throw InvalidArgument("system_matrix: tau must be positive");
    }
    if (!(nu >= 0.0)) {
        throw InvalidArgument("system_matrix: nu must be nonnegative");
    }
    SparseOperator S = linear_combination(1.0, diffusion, nu, stiffness);
    std::vector<double> d(mass.diag);
    for (double& v : d) {
        v /= tau;
    }
    add_to_diagonal(S, d);
    return S;
}

} // namespace hsfem
