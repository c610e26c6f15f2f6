#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace gcre {

using Index = std::ptrdiff_t;
using Point = std::array<double, 2>;

enum class BoundaryTag { dirichlet, neumann, contact };
enum class Side { left, right, bottom, top };

/// Boundary condition type per side; 1D meshes use left and right only.
struct SideTags {
    BoundaryTag left = BoundaryTag::dirichlet;
    BoundaryTag right = BoundaryTag::dirichlet;
    BoundaryTag bottom = BoundaryTag::dirichlet;
    BoundaryTag top = BoundaryTag::dirichlet;

    BoundaryTag operator[](Side side) const;
};

struct Interval {
    double a = 0.0, b = 1.0;
};

struct Rectangle {
    double width = 1.0, height = 1.0;
    double x0 = 0.0, y0 = 0.0;
};

using Geometry = std::variant<Interval, Rectangle>;

/// Tensor-product layout of a structured mesh.
///
/// Vertex (i, j) has index j * (nx + 1) + i; square (i, j) is split along
/// its rising diagonal into cells 2 (j nx + i) and 2 (j nx + i) + 1.
struct Grid {
    Index nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0, hx = 0.0, hy = 0.0;
    double width = 0.0, height = 0.0;
};

/// A codimension-one entity: an edge in 2D, a vertex in 1D.
struct Facet {
    std::array<Index, 2> vertices{-1, -1}; ///< 1D facets repeat the vertex
    std::array<Index, 2> cells{-1, -1};    ///< cells[1] < 0 on the boundary
    std::optional<BoundaryTag> tag;
    std::optional<Side> side;

    bool on_boundary() const { return cells[1] < 0; }
};

/// Simplicial mesh of an interval or a rectangle.
///
/// Cells are positively oriented. Local facet k of a cell is opposite local
/// vertex k. Facet normals point from cells[0] to cells[1], or outward on the
/// boundary.
class Mesh {
  public:
    Mesh(int dimension, std::vector<Point> vertices, std::vector<Index> cells,
         std::vector<std::pair<std::array<Index, 2>, Side>> boundary_facets, SideTags tags,
         std::optional<Grid> grid = std::nullopt);

    int dimension() const { return dim_; }
    Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
    Index num_cells() const { return static_cast<Index>(cells_.size()) / (dim_ + 1); }
    Index num_facets() const { return static_cast<Index>(facets_.size()); }

    const Point &vertex(Index v) const { return vertices_[v]; }
    std::span<const Point> vertices() const { return vertices_; }
    std::span<const Index> cell(Index c) const {
        return {cells_.data() + c * (dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
    }
    std::span<const Index> cell_facets(Index c) const {
        return {cell_facets_.data() + c * (dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
    }
    const Facet &facet(Index f) const { return facets_[f]; }
    std::span<const Facet> facets() const { return facets_; }

    double cell_measure(Index c) const { return measures_[c]; }
    double facet_measure(Index f) const;
    /// Unit normal of facet f (oriented as documented above).
    Point facet_normal(Index f) const;
    /// +1 if the facet normal points out of cell c, -1 otherwise.
    double facet_sign(Index f, Index c) const { return facets_[f].cells[0] == c ? 1.0 : -1.0; }
    Point centroid(Index c) const;
    /// Constant gradients of the P1 basis functions of cell c.
    std::array<Point, 3> basis_gradients(Index c) const;

    double h_max() const { return h_max_; }
    const SideTags &tags() const { return tags_; }
    const std::optional<Grid> &grid() const { return grid_; }

    /// Cell containing p; structured meshes only.
    Index locate(const Point &p) const;
    /// Boundary facets on a side, ordered counterclockwise along the boundary.
    std::vector<Index> side_facets(Side side) const;
    /// Vertices on the closure of a side, ordered counterclockwise.
    std::vector<Index> side_vertices(Side side) const;

  private:
    int dim_;
    std::vector<Point> vertices_;
    std::vector<Index> cells_;
    std::vector<Index> cell_facets_;
    std::vector<Facet> facets_;
    std::vector<double> measures_;
    double h_max_ = 0.0;
    SideTags tags_;
    std::optional<Grid> grid_;
};

/// Structured mesh: n cells on an interval, or nx x ny squares split in two.
Mesh build_mesh(const Geometry &geometry, std::array<Index, 2> subdivisions,
                const SideTags &tags);
/// Uniform refinement by a factor; the result contains all parent vertices.
Mesh refine(const Mesh &mesh, Index factor = 2);

void write_mesh(std::ostream &os, const Mesh &mesh);
Mesh read_mesh(std::istream &is);

} // namespace gcre
