#include "gcre/error.hpp"
#include "gcre/flux.hpp"

namespace gcre {

Rt0Flux::Rt0Flux(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd facet_values)
    : mesh_(std::move(mesh)), values_(std::move(facet_values)) {
    if (!mesh_ || values_.size() != mesh_->num_facets())
        throw InvalidInput("flux: one value per facet required");
}

double Rt0Flux::basis_scale(const Mesh &mesh, Index cell, int e) {
    const Index f = mesh.cell_facets(cell)[e];
    return mesh.facet_sign(f, cell) * mesh.facet_measure(f) /
           (mesh.dimension() * mesh.cell_measure(cell));
}

Point Rt0Flux::evaluate(Index cell, const Point &p) const {
    const auto v = mesh_->cell(cell);
    const auto facets = mesh_->cell_facets(cell);
    Point q{0.0, 0.0};
    for (int e = 0; e <= mesh_->dimension(); ++e) {
        const double c = basis_scale(*mesh_, cell, e) * values_[facets[e]];
        const Point &P = mesh_->vertex(v[e]);
        q[0] += c * (p[0] - P[0]);
        q[1] += c * (p[1] - P[1]);
    }
    return q;
}

Point Rt0Flux::cell_integral(Index cell) const {
    const Point m = mesh_->centroid(cell);
    Point q = evaluate(cell, m);
    const double area = mesh_->cell_measure(cell);
    return {q[0] * area, q[1] * area};
}

double Rt0Flux::cell_divergence(Index cell) const {
    const auto facets = mesh_->cell_facets(cell);
    double div = 0.0;
    for (int e = 0; e <= mesh_->dimension(); ++e)
        div += basis_scale(*mesh_, cell, e) * mesh_->dimension() * values_[facets[e]];
    return div;
}

std::array<std::array<double, 3>, 3> Rt0Flux::local_mass(const Mesh &mesh, Index cell) {
    // Integral of (x - a).(x - b) = |K| / ((d+1)(d+2)) sum |v - m|^2 + |K| (m - a).(m - b)
    const int d = mesh.dimension();
    const auto v = mesh.cell(cell);
    const Point m = mesh.centroid(cell);
    const double area = mesh.cell_measure(cell);
    double spread = 0.0;
    for (Index k : v) {
        const Point &p = mesh.vertex(k);
        spread += (p[0] - m[0]) * (p[0] - m[0]) + (p[1] - m[1]) * (p[1] - m[1]);
    }
    spread *= area / ((d + 1) * (d + 2));
    std::array<std::array<double, 3>, 3> M{};
    for (int a = 0; a <= d; ++a)
        for (int b = 0; b <= d; ++b) {
            const Point &pa = mesh.vertex(v[a]), &pb = mesh.vertex(v[b]);
            const double cross =
                (m[0] - pa[0]) * (m[0] - pb[0]) + (m[1] - pa[1]) * (m[1] - pb[1]);
            M[a][b] = basis_scale(mesh, cell, a) * basis_scale(mesh, cell, b) *
                      (spread + area * cross);
        }
    return M;
}

double Rt0Flux::cell_norm_sq(Index cell) const {
    const auto M = local_mass(*mesh_, cell);
    const auto facets = mesh_->cell_facets(cell);
    double s = 0.0;
    for (int a = 0; a <= mesh_->dimension(); ++a)
        for (int b = 0; b <= mesh_->dimension(); ++b)
            s += values_[facets[a]] * M[a][b] * values_[facets[b]];
    return s;
}

} // namespace gcre
