#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace hsfem {

using Index = std::size_t;

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

struct BBox {
    double x0 = 0.0;
    double x1 = 1.0;
    double y0 = 0.0;
    double y1 = 1.0;

    double area() const { return (x1 - x0) * (y1 - y0); }
};

using Triangle = std::array<Index, 3>;

/// Per-element P1 geometry. The basis gradients are constant on the element.
struct ElemGeom {
    double area = 0.0;
    std::array<Vec2, 3> grad{};
    /// Local index of the right-angle vertex, set only when both legs are axis-parallel.
    std::optional<int> right_vertex;
};

/// Geometry of a single triangle given its vertices (counterclockwise or not).
/// Throws GeometryError when the triangle is degenerate.
ElemGeom element_geometry(const std::array<Point, 3>& vertices);

enum class Diagonal { SwNe };

/// Conforming triangulation of a polygonal domain.
///
/// Elements are stored counterclockwise; the constructor reorients clockwise
/// triples. Immutable after construction.
class Mesh {
public:
    Mesh(std::vector<Point> nodes, std::vector<Triangle> elements);

    const std::vector<Point>& nodes() const { return nodes_; }
    const std::vector<Triangle>& elements() const { return elements_; }
    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_elements() const { return elements_.size(); }

    const Point& node(Index a) const { return nodes_[a]; }
    const Triangle& element(Index e) const { return elements_[e]; }
    std::array<Point, 3> vertices(Index e) const;

    /// Cached geometry of element e.
    const ElemGeom& geometry(Index e) const { return geom_[e]; }

    const BBox& bbox() const { return bbox_; }
    /// Cell counts of the structured generator; zero for meshes built from raw arrays.
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    bool structured() const { return nx_ > 0 && ny_ > 0; }

    /// Largest element diameter (the hypotenuse on right-angled meshes).
    double diameter() const { return diameter_; }
    /// Largest element leg: the second longest edge of each element, maximised.
    double leg() const { return leg_; }
    double total_area() const;

private:
    friend Mesh build_rect_mesh(const BBox&, int, int, Diagonal);

    std::vector<Point> nodes_;
    std::vector<Triangle> elements_;
    std::vector<ElemGeom> geom_;
    BBox bbox_;
    int nx_ = 0;
    int ny_ = 0;
    double diameter_ = 0.0;
    double leg_ = 0.0;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Structured triangulation of an axis-aligned rectangle.
///
/// Nodes are numbered row by row (node = j * (nx + 1) + i). Each cell is split
/// along its SW-NE diagonal, lower triangle first, so every triangle has a right
/// angle at an axis-aligned corner.
Mesh build_rect_mesh(const BBox& box, int nx, int ny, Diagonal diagonal = Diagonal::SwNe);

ElemGeom element_geometry(const Mesh& mesh, Index e);

struct AngleReport {
    bool all_right_angled = false;
    bool all_nonobtuse = false;
    double max_angle = 0.0; // radians
};

AngleReport classify_angles(const Mesh& mesh);

/// True when every element has a right angle with axis-parallel legs.
bool has_axis_right_angles(const Mesh& mesh);

} // namespace hsfem
