#include "hsfem/fespace.hpp"

#include "hsfem/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace hsfem {

namespace {

struct QuadPoint {
    std::array<double, 3> bary;
    double weight; // fraction of the element area
};

// Six-point Dunavant rule, exact for polynomials of degree 4.
constexpr double kA1 = 0.445948490915965, kB1 = 0.108103018168070, kW1 = 0.223381589678011;
constexpr double kA2 = 0.091576213509771, kB2 = 0.816847572980459, kW2 = 0.109951743655322;
constexpr std::array<QuadPoint, 6> kDunavant4{{
    {{kB1, kA1, kA1}, kW1},
    {{kA1, kB1, kA1}, kW1},
    {{kA1, kA1, kB1}, kW1},
    {{kB2, kA2, kA2}, kW2},
    {{kA2, kB2, kA2}, kW2},
    {{kA2, kA2, kB2}, kW2},
}};

void require_same_mesh(const Field& u, const Field& v, const char* what)
{
    if (u.mesh() != v.mesh() || u.size() != v.size()) {
        throw InvalidArgument(std::string(what) + ": fields live on different meshes");
    }
    if (!u.mesh()) {
        throw InvalidArgument(std::string(what) + ": field without mesh");
    }
}

Point map_point(const std::array<Point, 3>& v, const std::array<double, 3>& bary)
{
    return Point{bary[0] * v[0].x + bary[1] * v[1].x + bary[2] * v[2].x,
                 bary[0] * v[0].y + bary[1] * v[1].y + bary[2] * v[2].y};
}

// Barycentric coordinates of p in element e, from the constant basis gradients.
std::array<double, 3> barycentric(const Mesh& mesh, Index e, Point p)
{
    const ElemGeom& g = mesh.geometry(e);
    const auto v = mesh.vertices(e);
    std::array<double, 3> lam{};
    for (std::size_t i = 0; i < 3; ++i) {
        lam[i] = 1.0 + g.grad[i].x * (p.x - v[i].x) + g.grad[i].y * (p.y - v[i].y);
    }
    return lam;
}

// Integral over the reference-parametrised element of |c01 l0 l1 + c02 l0 l2 + c12 l1 l2|,
// as a fraction of the element area, by the degree-4 rule on a uniform subdivision.
double abs_bubble_fraction(double c01, double c02, double c12)
{
    constexpr int m = 4;
    const double h = 1.0 / m;
    double total = 0.0;
    auto integrate_sub = [&](std::array<std::array<double, 2>, 3> corners) {
        for (const QuadPoint& q : kDunavant4) {
            double l1 = 0.0, l2 = 0.0;
            for (std::size_t i = 0; i < 3; ++i) {
                l1 += q.bary[i] * corners[i][0];
                l2 += q.bary[i] * corners[i][1];
            }
            const double l0 = 1.0 - l1 - l2;
            total += q.weight * std::abs(c01 * l0 * l1 + c02 * l0 * l2 + c12 * l1 * l2);
        }
    };
    for (int i = 0; i < m; ++i) {
        for (int j = 0; i + j < m; ++j) {
            const double a = i * h, b = j * h;
            integrate_sub({{{a, b}, {a + h, b}, {a, b + h}}});
            if (i + j <= m - 2) {
                integrate_sub({{{a + h, b}, {a + h, b + h}, {a, b + h}}});
            }
        }
    }
    return total / (m * m);
}

} // namespace

Field::Field(MeshPtr mesh, std::vector<double> values) : mesh_(std::move(mesh)), values_(std::move(values))
{
    if (!mesh_) {
        throw InvalidArgument("Field: null mesh");
    }
    if (values_.size() != mesh_->num_nodes()) {
        throw InvalidArgument("Field: value count does not match node count");
    }
}

Field::Field(MeshPtr mesh, double value) : mesh_(std::move(mesh))
{
    if (!mesh_) {
        throw InvalidArgument("Field: null mesh");
    }
    values_.assign(mesh_->num_nodes(), value);
}

double LumpedMass::total() const
{
    double s = 0.0;
    for (double d : diag) {
        s += d;
    }
    return s;
}

LumpedMass lumped_mass(const Mesh& mesh)
{
    LumpedMass m;
    m.diag.assign(mesh.num_nodes(), 0.0);
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const double third = mesh.geometry(e).area / 3.0;
        for (Index a : mesh.element(e)) {
            m.diag[a] += third;
        }
    }
    return m;
}

Field nodal_interpolate(MeshPtr mesh, const ScalarFunction& f)
{
    if (!mesh) {
        throw InvalidArgument("nodal_interpolate: null mesh");
    }
    std::vector<double> values(mesh->num_nodes());
    for (Index a = 0; a < values.size(); ++a) {
        const Point& p = mesh->node(a);
        values[a] = f(p.x, p.y);
        if (!std::isfinite(values[a])) {
            throw EvaluationError("nodal_interpolate: non-finite value at node " + std::to_string(a));
        }
    }
    return Field(std::move(mesh), std::move(values));
}

double inner_h(const Field& u, const Field& v, const LumpedMass& mass)
{
    require_same_mesh(u, v, "inner_h");
    if (mass.size() != u.size()) {
        throw InvalidArgument("inner_h: lumped mass does not match the mesh");
    }
    double s = 0.0;
    for (Index a = 0; a < u.size(); ++a) {
        s += u[a] * v[a] * mass.diag[a];
    }
    return s;
}

double norm_h(const Field& u, const LumpedMass& mass) { return std::sqrt(inner_h(u, u, mass)); }

double inner_l2(const Field& u, const Field& v)
{
    require_same_mesh(u, v, "inner_l2");
    const Mesh& mesh = *u.mesh();
    double s = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const Triangle& t = mesh.element(e);
        // area/12 * [[2,1,1],[1,2,1],[1,1,2]]
        double local = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                local += (i == j ? 2.0 : 1.0) * u[t[i]] * v[t[j]];
            }
        }
        s += mesh.geometry(e).area / 12.0 * local;
    }
    return s;
}

double norm_l2(const Field& u) { return std::sqrt(inner_l2(u, u)); }

Field discrete_laplacian(const SparseOperator& stiffness, const LumpedMass& mass, const Field& v)
{
    if (stiffness.size() != v.size() || mass.size() != v.size()) {
        throw InvalidArgument("discrete_laplacian: dimension mismatch");
    }
    std::vector<double> out = stiffness * v.values();
    for (Index a = 0; a < out.size(); ++a) {
        out[a] = -out[a] / mass.diag[a];
    }
    return Field(v.mesh(), std::move(out));
}

double interp_product_l1_error(const Field& u, const Field& v)
{
    require_same_mesh(u, v, "interp_product_l1_error");
    const Mesh& mesh = *u.mesh();
    double total = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const Triangle& t = mesh.element(e);
        // u v - I_h(u v) = -sum_{i<j} (u_i - u_j)(v_i - v_j) phi_i phi_j on the element.
        const double c01 = -(u[t[0]] - u[t[1]]) * (v[t[0]] - v[t[1]]);
        const double c02 = -(u[t[0]] - u[t[2]]) * (v[t[0]] - v[t[2]]);
        const double c12 = -(u[t[1]] - u[t[2]]) * (v[t[1]] - v[t[2]]);
        const double area = mesh.geometry(e).area;
        const bool nonneg = c01 >= 0.0 && c02 >= 0.0 && c12 >= 0.0;
        const bool nonpos = c01 <= 0.0 && c02 <= 0.0 && c12 <= 0.0;
        if (nonneg || nonpos) {
            total += std::abs(c01 + c02 + c12) * area / 12.0;
        } else {
            total += abs_bubble_fraction(c01, c02, c12) * area;
        }
    }
    return total;
}

double dirichlet_seminorm(const SparseOperator& stiffness, std::span<const double> v)
{
    const std::vector<double> kv = stiffness * v;
    return std::sqrt(std::max(0.0, dot(kv, v)));
}

std::optional<double> evaluate_p1(const Mesh& mesh, std::span<const double> values, Point at)
{
    if (values.size() != mesh.num_nodes()) {
        throw InvalidArgument("evaluate_p1: value count does not match node count");
    }
    constexpr double tol = 1e-12;
    auto eval_in = [&](Index e) -> std::optional<double> {
        const auto lam = barycentric(mesh, e, at);
        if (lam[0] < -tol || lam[1] < -tol || lam[2] < -tol) {
            return std::nullopt;
        }
        const Triangle& t = mesh.element(e);
        return lam[0] * values[t[0]] + lam[1] * values[t[1]] + lam[2] * values[t[2]];
    };

    if (mesh.structured()) {
        const BBox& b = mesh.bbox();
        const double sx = (at.x - b.x0) / (b.x1 - b.x0) * mesh.nx();
        const double sy = (at.y - b.y0) / (b.y1 - b.y0) * mesh.ny();
        if (sx < -tol * mesh.nx() || sy < -tol * mesh.ny() || sx > mesh.nx() * (1.0 + tol) ||
            sy > mesh.ny() * (1.0 + tol)) {
            return std::nullopt;
        }
        const auto ci = static_cast<Index>(std::clamp(static_cast<int>(std::floor(sx)), 0, mesh.nx() - 1));
        const auto cj = static_cast<Index>(std::clamp(static_cast<int>(std::floor(sy)), 0, mesh.ny() - 1));
        const Index cell = cj * static_cast<Index>(mesh.nx()) + ci;
        if (auto r = eval_in(2 * cell)) {
            return r;
        }
        if (auto r = eval_in(2 * cell + 1)) {
            return r;
        }
    }
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        if (auto r = eval_in(e)) {
            return r;
        }
    }
    return std::nullopt;
}

double l2_error(const Field& u, const ScalarFunction& f)
{
    if (!u.mesh()) {
        throw InvalidArgument("l2_error: field without mesh");
    }
    const Mesh& mesh = *u.mesh();
    double s = 0.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const Triangle& t = mesh.element(e);
        const auto v = mesh.vertices(e);
        double local = 0.0;
        for (const QuadPoint& q : kDunavant4) {
            const Point x = map_point(v, q.bary);
            const double uh = q.bary[0] * u[t[0]] + q.bary[1] * u[t[1]] + q.bary[2] * u[t[2]];
            const double d = uh - f(x.x, x.y);
            local += q.weight * d * d;
        }
        s += local * mesh.geometry(e).area;
    }
    return std::sqrt(s);
}

} // namespace hsfem
