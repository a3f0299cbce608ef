#include "hsfem/mesh.hpp"

#include "hsfem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hsfem {

namespace {

constexpr double kAxisTol = 1e-12;
constexpr double kAngleTol = 1e-12;

double signed_area2(const std::array<Point, 3>& v)
{
    return (v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y);
}

double edge_length(const Point& a, const Point& b) { return std::hypot(b.x - a.x, b.y - a.y); }

bool axis_parallel_x(double dx, double dy) { return std::abs(dy) <= kAxisTol * std::abs(dx); }
bool axis_parallel_y(double dx, double dy) { return std::abs(dx) <= kAxisTol * std::abs(dy); }

// Interior angle at vertex i, computed with atan2 to stay accurate near pi/2.
double interior_angle(const std::array<Point, 3>& v, int i)
{
    const Point& p = v[static_cast<std::size_t>(i)];
    const Point& q = v[static_cast<std::size_t>((i + 1) % 3)];
    const Point& r = v[static_cast<std::size_t>((i + 2) % 3)];
    const double ax = q.x - p.x, ay = q.y - p.y;
    const double bx = r.x - p.x, by = r.y - p.y;
    return std::atan2(std::abs(ax * by - ay * bx), ax * bx + ay * by);
}

} // namespace

ElemGeom element_geometry(const std::array<Point, 3>& v)
{
    const double a2 = signed_area2(v);
    double longest = 0.0;
    for (int i = 0; i < 3; ++i) {
        longest = std::max(longest, edge_length(v[static_cast<std::size_t>(i)],
                                                v[static_cast<std::size_t>((i + 1) % 3)]));
    }
    if (!std::isfinite(a2) || std::abs(a2) <= 1e-14 * longest * longest) {
        throw GeometryError("degenerate element (zero area)");
    }

    ElemGeom g;
    g.area = 0.5 * std::abs(a2);
    for (std::size_t i = 0; i < 3; ++i) {
        const Point& pj = v[(i + 1) % 3];
        const Point& pk = v[(i + 2) % 3];
        g.grad[i] = Vec2{(pj.y - pk.y) / a2, (pk.x - pj.x) / a2};
    }
    for (int i = 0; i < 3; ++i) {
        const Point& p = v[static_cast<std::size_t>(i)];
        const Point& q = v[static_cast<std::size_t>((i + 1) % 3)];
        const Point& r = v[static_cast<std::size_t>((i + 2) % 3)];
        const double dx1 = q.x - p.x, dy1 = q.y - p.y;
        const double dx2 = r.x - p.x, dy2 = r.y - p.y;
        if ((axis_parallel_x(dx1, dy1) && axis_parallel_y(dx2, dy2)) ||
            (axis_parallel_y(dx1, dy1) && axis_parallel_x(dx2, dy2))) {
            g.right_vertex = i;
            break;
        }
    }
    return g;
}

Mesh::Mesh(std::vector<Point> nodes, std::vector<Triangle> elements)
    : nodes_(std::move(nodes)), elements_(std::move(elements))
{
    if (nodes_.empty() || elements_.empty()) {
        throw InvalidArgument("mesh needs at least one node and one element");
    }
    bbox_ = BBox{nodes_[0].x, nodes_[0].x, nodes_[0].y, nodes_[0].y};
    for (const Point& p : nodes_) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw InvalidArgument("mesh node with non-finite coordinate");
        }
        bbox_.x0 = std::min(bbox_.x0, p.x);
        bbox_.x1 = std::max(bbox_.x1, p.x);
        bbox_.y0 = std::min(bbox_.y0, p.y);
        bbox_.y1 = std::max(bbox_.y1, p.y);
    }

    geom_.reserve(elements_.size());
    for (std::size_t e = 0; e < elements_.size(); ++e) {
        Triangle& t = elements_[e];
        for (Index a : t) {
            if (a >= nodes_.size()) {
                throw InvalidArgument("element " + std::to_string(e) + " refers to missing node " +
                                      std::to_string(a));
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw InvalidArgument("element " + std::to_string(e) + " repeats a vertex");
        }
        if (signed_area2(vertices(e)) < 0.0) {
            std::swap(t[1], t[2]);
        }
        geom_.push_back(hsfem::element_geometry(vertices(e)));

        std::array<double, 3> len{};
        for (std::size_t i = 0; i < 3; ++i) {
            len[i] = edge_length(nodes_[t[i]], nodes_[t[(i + 1) % 3]]);
        }
        std::sort(len.begin(), len.end());
        diameter_ = std::max(diameter_, len[2]);
        leg_ = std::max(leg_, len[1]);
    }
}

std::array<Point, 3> Mesh::vertices(Index e) const
{
    const Triangle& t = elements_[e];
    return {nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]};
}

double Mesh::total_area() const
{
    double sum = 0.0;
    for (const ElemGeom& g : geom_) {
        sum += g.area;
    }
    return sum;
}

Mesh build_rect_mesh(const BBox& box, int nx, int ny, Diagonal diagonal)
{
    if (!(box.x1 > box.x0) || !(box.y1 > box.y0)) {
        throw InvalidArgument("build_rect_mesh: rectangle must have positive extent");
    }
    if (nx < 1 || ny < 1) {
        throw InvalidArgument("build_rect_mesh: cell counts must be >= 1");
    }
    (void)diagonal; // only SW-NE is provided

    const auto cols = static_cast<std::size_t>(nx) + 1;
    const auto rows = static_cast<std::size_t>(ny) + 1;
    std::vector<Point> nodes;
    nodes.reserve(cols * rows);
    const double dx = (box.x1 - box.x0) / nx;
    const double dy = (box.y1 - box.y0) / ny;
    for (std::size_t j = 0; j < rows; ++j) {
        // Pin the last row/column to the exact bounds.
        const double y = (j + 1 == rows) ? box.y1 : box.y0 + static_cast<double>(j) * dy;
        for (std::size_t i = 0; i < cols; ++i) {
            const double x = (i + 1 == cols) ? box.x1 : box.x0 + static_cast<double>(i) * dx;
            nodes.push_back(Point{x, y});
        }
    }

    std::vector<Triangle> elements;
    elements.reserve(2 * static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (std::size_t j = 0; j + 1 < rows; ++j) {
        for (std::size_t i = 0; i + 1 < cols; ++i) {
            const Index sw = j * cols + i;
            const Index se = sw + 1;
            const Index nw = sw + cols;
            const Index ne = nw + 1;
            elements.push_back(Triangle{sw, se, ne});
            elements.push_back(Triangle{sw, ne, nw});
        }
    }

    Mesh mesh(std::move(nodes), std::move(elements));
    mesh.bbox_ = box;
    mesh.nx_ = nx;
    mesh.ny_ = ny;
    return mesh;
}

ElemGeom element_geometry(const Mesh& mesh, Index e)
{
    if (e >= mesh.num_elements()) {
        throw InvalidArgument("element_geometry: element index out of range");
    }
    return element_geometry(mesh.vertices(e));
}

AngleReport classify_angles(const Mesh& mesh)
{
    AngleReport report{true, true, 0.0};
    const double half_pi = std::numbers::pi / 2.0;
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        const auto v = mesh.vertices(e);
        bool right = false;
        for (int i = 0; i < 3; ++i) {
            const double angle = interior_angle(v, i);
            report.max_angle = std::max(report.max_angle, angle);
            if (std::abs(angle - half_pi) <= kAngleTol) {
                right = true;
            }
            if (angle > half_pi + kAngleTol) {
                report.all_nonobtuse = false;
            }
        }
        report.all_right_angled = report.all_right_angled && right;
    }
    return report;
}

bool has_axis_right_angles(const Mesh& mesh)
{
    for (Index e = 0; e < mesh.num_elements(); ++e) {
        if (!mesh.geometry(e).right_vertex) {
            return false;
        }
    }
    return true;
}

} // namespace hsfem
