#include "gcre/mesh.hpp"

#include "gcre/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace gcre {

BoundaryTag SideTags::operator[](Side side) const {
    switch (side) {
    case Side::left: return left;
    case Side::right: return right;
    case Side::bottom: return bottom;
    case Side::top: return top;
    }
    return BoundaryTag::dirichlet;
}

namespace {

std::uint64_t edge_key(Index a, Index b) {
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

} // namespace

Mesh::Mesh(int dimension, std::vector<Point> vertices, std::vector<Index> cells,
           std::vector<std::pair<std::array<Index, 2>, Side>> boundary_facets, SideTags tags,
           std::optional<Grid> grid)
    : dim_(dimension), vertices_(std::move(vertices)), cells_(std::move(cells)), tags_(tags),
      grid_(grid) {
    if (dim_ != 1 && dim_ != 2)
        throw InvalidInput("mesh: dimension must be 1 or 2");
    const Index nv = num_vertices();
    if (cells_.empty() || cells_.size() % (dim_ + 1) != 0)
        throw InvalidInput("mesh: cell array has the wrong length");
    for (Index v : cells_)
        if (v < 0 || v >= nv)
            throw InvalidInput("mesh: cell references a missing vertex");
    for (const Point &p : vertices_)
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
            throw InvalidInput("mesh: non-finite vertex coordinate");

    const Index nc = num_cells();
    measures_.resize(nc);
    cell_facets_.assign(cells_.size(), -1);

    std::unordered_map<std::uint64_t, Index> lookup;
    for (Index c = 0; c < nc; ++c) {
        const auto v = cell(c);
        double measure;
        if (dim_ == 1) {
            measure = vertices_[v[1]][0] - vertices_[v[0]][0];
            h_max_ = std::max(h_max_, measure);
        } else {
            const Point &a = vertices_[v[0]], &b = vertices_[v[1]], &d = vertices_[v[2]];
            measure = 0.5 * ((b[0] - a[0]) * (d[1] - a[1]) - (b[1] - a[1]) * (d[0] - a[0]));
        }
        if (!(measure > 0.0))
            throw InvalidInput("mesh: cell " + std::to_string(c) +
                               " is degenerate or negatively oriented");
        measures_[c] = measure;

        for (int k = 0; k <= dim_; ++k) {
            Index a, b;
            if (dim_ == 1) {
                a = b = v[1 - k];
            } else {
                a = v[(k + 1) % 3];
                b = v[(k + 2) % 3];
            }
            const auto key = edge_key(a, b);
            auto [it, inserted] = lookup.try_emplace(key, static_cast<Index>(facets_.size()));
            if (inserted) {
                Facet f;
                f.vertices = {a, b};
                f.cells = {c, -1};
                facets_.push_back(f);
            } else {
                Facet &f = facets_[it->second];
                if (f.cells[1] >= 0)
                    throw InvalidInput("mesh: facet shared by more than two cells");
                f.cells[1] = c;
            }
            cell_facets_[c * (dim_ + 1) + k] = it->second;
        }
    }

    if (dim_ == 2)
        for (const Facet &f : facets_) {
            const Point &a = vertices_[f.vertices[0]], &b = vertices_[f.vertices[1]];
            h_max_ = std::max(h_max_, std::hypot(b[0] - a[0], b[1] - a[1]));
        }

    for (const auto &[verts, side] : boundary_facets) {
        const auto it = lookup.find(edge_key(verts[0], verts[1]));
        if (it == lookup.end())
            throw InvalidInput("mesh: boundary facet is not a facet of any cell");
        Facet &f = facets_[it->second];
        if (!f.on_boundary())
            throw InvalidInput("mesh: tagged facet is interior");
        f.side = side;
        f.tag = tags_[side];
    }
    for (const Facet &f : facets_)
        if (f.on_boundary() && !f.side)
            throw InvalidInput("mesh: boundary facet without a side tag");
}

double Mesh::facet_measure(Index f) const {
    if (dim_ == 1)
        return 1.0;
    const Point &a = vertices_[facets_[f].vertices[0]], &b = vertices_[facets_[f].vertices[1]];
    return std::hypot(b[0] - a[0], b[1] - a[1]);
}

Point Mesh::facet_normal(Index f) const {
    const Facet &facet = facets_[f];
    if (dim_ == 1) {
        const auto v = cell(facet.cells[0]);
        return {facet.vertices[0] == v[1] ? 1.0 : -1.0, 0.0};
    }
    const Point &a = vertices_[facet.vertices[0]], &b = vertices_[facet.vertices[1]];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    return {(b[1] - a[1]) / len, -(b[0] - a[0]) / len};
}

Point Mesh::centroid(Index c) const {
    Point m{0.0, 0.0};
    for (Index v : cell(c)) {
        m[0] += vertices_[v][0];
        m[1] += vertices_[v][1];
    }
    m[0] /= (dim_ + 1);
    m[1] /= (dim_ + 1);
    return m;
}

std::array<Point, 3> Mesh::basis_gradients(Index c) const {
    const auto v = cell(c);
    std::array<Point, 3> g{};
    if (dim_ == 1) {
        const double h = measures_[c];
        g[0] = {-1.0 / h, 0.0};
        g[1] = {1.0 / h, 0.0};
        return g;
    }
    const double twice = 2.0 * measures_[c];
    for (int k = 0; k < 3; ++k) {
        const Point &a = vertices_[v[(k + 1) % 3]], &b = vertices_[v[(k + 2) % 3]];
        g[k] = {(a[1] - b[1]) / twice, (b[0] - a[0]) / twice};
    }
    return g;
}

Index Mesh::locate(const Point &p) const {
    if (!grid_)
        throw Misuse("mesh: point location needs a structured mesh");
    const Grid &g = *grid_;
    const double sx = (p[0] - g.x0) / g.hx;
    const Index i = std::clamp<Index>(static_cast<Index>(std::floor(sx)), 0, g.nx - 1);
    if (dim_ == 1)
        return i;
    const double sy = (p[1] - g.y0) / g.hy;
    const Index j = std::clamp<Index>(static_cast<Index>(std::floor(sy)), 0, g.ny - 1);
    const double xi = sx - static_cast<double>(i), eta = sy - static_cast<double>(j);
    return 2 * (j * g.nx + i) + (xi >= eta ? 0 : 1);
}

std::vector<Index> Mesh::side_facets(Side side) const {
    std::vector<Index> out;
    for (Index f = 0; f < num_facets(); ++f)
        if (facets_[f].side == side)
            out.push_back(f);
    auto key = [&](Index f) {
        const Point &a = vertices_[facets_[f].vertices[0]];
        switch (side) {
        case Side::bottom: return a[0];
        case Side::right: return a[1];
        case Side::top: return -a[0];
        case Side::left: return -a[1];
        }
        return 0.0;
    };
    std::sort(out.begin(), out.end(), [&](Index a, Index b) { return key(a) < key(b); });
    return out;
}

std::vector<Index> Mesh::side_vertices(Side side) const {
    const auto facets = side_facets(side);
    std::vector<Index> out;
    if (facets.empty())
        return out;
    if (dim_ == 1)
        return {facets_[facets.front()].vertices[0]};
    out.push_back(facets_[facets.front()].vertices[0]);
    for (Index f : facets)
        out.push_back(facets_[f].vertices[1]);
    return out;
}

namespace {

// Vertex coordinates are x0 + (width * i) / n so that refinement by powers of
// two reproduces parent vertices bit for bit.
Mesh structured_interval(double x0, double width, Index n, const SideTags &tags) {
    if (n < 1)
        throw InvalidInput("mesh: need at least one cell");
    if (!(width > 0.0))
        throw InvalidInput("mesh: empty interval");
    std::vector<Point> vertices(n + 1);
    for (Index i = 0; i <= n; ++i)
        vertices[i] = {x0 + (width * static_cast<double>(i)) / static_cast<double>(n), 0.0};
    std::vector<Index> cells;
    for (Index i = 0; i < n; ++i) {
        cells.push_back(i);
        cells.push_back(i + 1);
    }
    std::vector<std::pair<std::array<Index, 2>, Side>> boundary{{{0, 0}, Side::left},
                                                                 {{n, n}, Side::right}};
    return Mesh(1, std::move(vertices), std::move(cells), std::move(boundary), tags,
                Grid{n, 0, x0, 0.0, width / static_cast<double>(n), 0.0, width, 0.0});
}

Mesh structured_rectangle(double x0, double y0, double width, double height, Index nx,
                          Index ny, const SideTags &tags) {
    if (nx < 1 || ny < 1)
        throw InvalidInput("mesh: need at least one cell per direction");
    if (!(width > 0.0) || !(height > 0.0))
        throw InvalidInput("mesh: rectangle must have positive extent");
    auto id = [nx](Index i, Index j) { return j * (nx + 1) + i; };
    std::vector<Point> vertices((nx + 1) * (ny + 1));
    for (Index j = 0; j <= ny; ++j)
        for (Index i = 0; i <= nx; ++i)
            vertices[id(i, j)] = {x0 + (width * static_cast<double>(i)) / static_cast<double>(nx),
                                  y0 + (height * static_cast<double>(j)) / static_cast<double>(ny)};
    std::vector<Index> cells;
    cells.reserve(6 * nx * ny);
    for (Index j = 0; j < ny; ++j)
        for (Index i = 0; i < nx; ++i) {
            const Index v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1),
                        v11 = id(i + 1, j + 1);
            cells.insert(cells.end(), {v00, v10, v11, v00, v11, v01});
        }
    std::vector<std::pair<std::array<Index, 2>, Side>> boundary;
    for (Index i = 0; i < nx; ++i) {
        boundary.push_back({{id(i, 0), id(i + 1, 0)}, Side::bottom});
        boundary.push_back({{id(i + 1, ny), id(i, ny)}, Side::top});
    }
    for (Index j = 0; j < ny; ++j) {
        boundary.push_back({{id(nx, j), id(nx, j + 1)}, Side::right});
        boundary.push_back({{id(0, j + 1), id(0, j)}, Side::left});
    }
    return Mesh(2, std::move(vertices), std::move(cells), std::move(boundary), tags,
                Grid{nx, ny, x0, y0, width / static_cast<double>(nx),
                     height / static_cast<double>(ny), width, height});
}

} // namespace

Mesh build_mesh(const Geometry &geometry, std::array<Index, 2> subdivisions,
                const SideTags &tags) {
    if (const auto *iv = std::get_if<Interval>(&geometry))
        return structured_interval(iv->a, iv->b - iv->a, subdivisions[0], tags);
    const auto &r = std::get<Rectangle>(geometry);
    return structured_rectangle(r.x0, r.y0, r.width, r.height, subdivisions[0], subdivisions[1],
                                tags);
}

Mesh refine(const Mesh &mesh, Index factor) {
    if (!mesh.grid())
        throw Misuse("mesh: refinement needs a structured mesh");
    if (factor < 1)
        throw InvalidInput("mesh: refinement factor must be positive");
    const Grid &g = *mesh.grid();
    if (mesh.dimension() == 1)
        return structured_interval(g.x0, g.width, g.nx * factor, mesh.tags());
    return structured_rectangle(g.x0, g.y0, g.width, g.height, g.nx * factor, g.ny * factor,
                                mesh.tags());
}

} // namespace gcre
