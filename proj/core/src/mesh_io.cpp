#include "gcre/error.hpp"
#include "gcre/mesh.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

// Plain-text columnar mesh format:
//
//   gcre-mesh 1
//   dimension <d>
//   tags <left> <right> <bottom> <top>
//   grid none | grid <nx> <ny> <x0> <y0> <width> <height>
//   vertices <n>        followed by n lines "x y"
//   cells <m>           followed by m lines of d+1 vertex indices
//   boundary <k>        followed by k lines "a b side"

namespace gcre {

namespace {

const char *tag_name(BoundaryTag t) {
    switch (t) {
    case BoundaryTag::dirichlet: return "dirichlet";
    case BoundaryTag::neumann: return "neumann";
    case BoundaryTag::contact: return "contact";
    }
    return "?";
}

const char *side_name(Side s) {
    switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::bottom: return "bottom";
    case Side::top: return "top";
    }
    return "?";
}

BoundaryTag parse_tag(const std::string &s) {
    if (s == "dirichlet")
        return BoundaryTag::dirichlet;
    if (s == "neumann")
        return BoundaryTag::neumann;
    if (s == "contact")
        return BoundaryTag::contact;
    throw InvalidInput("mesh file: unknown boundary tag '" + s + "'");
}

Side parse_side(const std::string &s) {
    if (s == "left")
        return Side::left;
    if (s == "right")
        return Side::right;
    if (s == "bottom")
        return Side::bottom;
    if (s == "top")
        return Side::top;
    throw InvalidInput("mesh file: unknown side '" + s + "'");
}

void expect_word(std::istream &is, const std::string &word) {
    std::string got;
    if (!(is >> got) || got != word)
        throw InvalidInput("mesh file: expected '" + word + "', got '" + got + "'");
}

template <class T> T read_value(std::istream &is, const char *what) {
    T value;
    if (!(is >> value))
        throw InvalidInput(std::string("mesh file: could not read ") + what);
    return value;
}

} // namespace

void write_mesh(std::ostream &os, const Mesh &mesh) {
    const SideTags &t = mesh.tags();
    fmt::print(os, "gcre-mesh 1\ndimension {}\ntags {} {} {} {}\n", mesh.dimension(),
               tag_name(t.left), tag_name(t.right), tag_name(t.bottom), tag_name(t.top));
    if (const auto &g = mesh.grid())
        fmt::print(os, "grid {} {} {:.17g} {:.17g} {:.17g} {:.17g}\n", g->nx, g->ny, g->x0, g->y0,
                   g->width, g->height);
    else
        fmt::print(os, "grid none\n");
    fmt::print(os, "vertices {}\n", mesh.num_vertices());
    for (const Point &p : mesh.vertices())
        fmt::print(os, "{:.17g} {:.17g}\n", p[0], p[1]);
    fmt::print(os, "cells {}\n", mesh.num_cells());
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const auto v = mesh.cell(c);
        if (mesh.dimension() == 1)
            fmt::print(os, "{} {}\n", v[0], v[1]);
        else
            fmt::print(os, "{} {} {}\n", v[0], v[1], v[2]);
    }
    Index count = 0;
    for (const Facet &f : mesh.facets())
        count += f.on_boundary() ? 1 : 0;
    fmt::print(os, "boundary {}\n", count);
    for (const Facet &f : mesh.facets())
        if (f.on_boundary())
            fmt::print(os, "{} {} {}\n", f.vertices[0], f.vertices[1], side_name(*f.side));
}

Mesh read_mesh(std::istream &is) {
    expect_word(is, "gcre-mesh");
    if (read_value<int>(is, "format version") != 1)
        throw InvalidInput("mesh file: unsupported format version");
    expect_word(is, "dimension");
    const int dim = read_value<int>(is, "dimension");
    if (dim != 1 && dim != 2)
        throw InvalidInput("mesh file: dimension must be 1 or 2");
    expect_word(is, "tags");
    SideTags tags;
    tags.left = parse_tag(read_value<std::string>(is, "tag"));
    tags.right = parse_tag(read_value<std::string>(is, "tag"));
    tags.bottom = parse_tag(read_value<std::string>(is, "tag"));
    tags.top = parse_tag(read_value<std::string>(is, "tag"));

    expect_word(is, "grid");
    std::optional<Grid> grid;
    std::string token = read_value<std::string>(is, "grid");
    if (token != "none") {
        Grid g;
        std::istringstream first(token);
        if (!(first >> g.nx))
            throw InvalidInput("mesh file: malformed grid line");
        g.ny = read_value<Index>(is, "grid ny");
        g.x0 = read_value<double>(is, "grid x0");
        g.y0 = read_value<double>(is, "grid y0");
        g.width = read_value<double>(is, "grid width");
        g.height = read_value<double>(is, "grid height");
        g.hx = g.width / static_cast<double>(g.nx);
        g.hy = dim == 2 ? g.height / static_cast<double>(g.ny) : 0.0;
        grid = g;
    }

    expect_word(is, "vertices");
    const auto nv = read_value<Index>(is, "vertex count");
    if (nv < 0)
        throw InvalidInput("mesh file: negative vertex count");
    std::vector<Point> vertices(nv);
    for (auto &p : vertices) {
        p[0] = read_value<double>(is, "vertex coordinate");
        p[1] = read_value<double>(is, "vertex coordinate");
    }
    expect_word(is, "cells");
    const auto nc = read_value<Index>(is, "cell count");
    if (nc < 0)
        throw InvalidInput("mesh file: negative cell count");
    std::vector<Index> cells(nc * (dim + 1));
    for (auto &v : cells)
        v = read_value<Index>(is, "cell vertex");
    expect_word(is, "boundary");
    const auto nb = read_value<Index>(is, "boundary count");
    if (nb < 0)
        throw InvalidInput("mesh file: negative boundary count");
    std::vector<std::pair<std::array<Index, 2>, Side>> boundary(nb);
    for (auto &[verts, side] : boundary) {
        verts[0] = read_value<Index>(is, "boundary vertex");
        verts[1] = read_value<Index>(is, "boundary vertex");
        side = parse_side(read_value<std::string>(is, "boundary side"));
        if (verts[0] < 0 || verts[0] >= nv || verts[1] < 0 || verts[1] >= nv)
            throw InvalidInput("mesh file: boundary facet references a missing vertex");
    }
    return Mesh(dim, std::move(vertices), std::move(cells), std::move(boundary), tags, grid);
}

} // namespace gcre
