#include "oracles/oracles.hpp"

#include "gcre/quadrature.hpp"

#include <algorithm>
#include <limits>

namespace gcre::oracle {

std::vector<double> brute_conjugate(std::span<const double> grid, std::span<const double> values,
                                    std::span<const double> slopes) {
    std::vector<double> out;
    for (double s : slopes) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < grid.size(); ++j)
            best = std::max(best, s * grid[j] - values[j]);
        out.push_back(best);
    }
    return out;
}

std::vector<double> brute_envelope(std::span<const double> grid, std::span<const double> values) {
    const std::size_t n = grid.size();
    std::vector<double> out(values.begin(), values.end());
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < j; ++i)
            for (std::size_t k = j + 1; k < n; ++k) {
                const double t = (grid[j] - grid[i]) / (grid[k] - grid[i]);
                out[j] = std::min(out[j], (1.0 - t) * values[i] + t * values[k]);
            }
    return out;
}

namespace {

// Gradients of the P1 basis from the inverse of the nodal Vandermonde matrix.
Eigen::MatrixXd p1_gradients(const Mesh &mesh, Index c) {
    const auto v = mesh.cell(c);
    const int d = mesh.dimension();
    Eigen::MatrixXd V(d + 1, d + 1);
    for (int k = 0; k <= d; ++k) {
        V(k, 0) = 1.0;
        for (int r = 0; r < d; ++r)
            V(k, r + 1) = mesh.vertex(v[k])[r];
    }
    // Column k of V^{-1} holds the coefficients of basis function k.
    const Eigen::MatrixXd C = V.inverse();
    return C.bottomRows(d); // d x (d+1)
}

} // namespace

Eigen::MatrixXd dense_stiffness(const Mesh &mesh, int components, const Material &m) {
    const Index n = mesh.num_vertices() * components;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const auto v = mesh.cell(c);
        const Eigen::MatrixXd G = p1_gradients(mesh, c);
        const double area = mesh.cell_measure(c);
        const int nv = static_cast<int>(v.size());
        if (components == 1) {
            for (int a = 0; a < nv; ++a)
                for (int b = 0; b < nv; ++b)
                    K(v[a], v[b]) += area * G.col(a).dot(G.col(b));
            continue;
        }
        // Strain-displacement matrix with engineering shear.
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 2 * nv);
        for (int a = 0; a < nv; ++a) {
            B(0, 2 * a) = G(0, a);
            B(1, 2 * a + 1) = G(1, a);
            B(2, 2 * a) = G(1, a);
            B(2, 2 * a + 1) = G(0, a);
        }
        Eigen::Matrix3d D;
        D << m.lambda + 2 * m.mu, m.lambda, 0, m.lambda, m.lambda + 2 * m.mu, 0, 0, 0, m.mu;
        const Eigen::MatrixXd Ke = area * B.transpose() * D * B;
        for (int a = 0; a < 2 * nv; ++a)
            for (int b = 0; b < 2 * nv; ++b)
                K(2 * v[a / 2] + a % 2, 2 * v[b / 2] + b % 2) += Ke(a, b);
    }
    return K;
}

Eigen::VectorXd dense_flux_kkt(const DiscreteSystem &sys, const Eigen::VectorXd &reaction) {
    const Mesh &mesh = *sys.mesh;
    const int d = mesh.dimension();
    const Index nf = mesh.num_facets(), nc = mesh.num_cells();
    const auto rule = d == 1 ? gauss_interval(4) : gauss_triangle(4);
    const double ref_measure = d == 1 ? 1.0 : 0.5;

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nf, nf);
    Eigen::MatrixXd Bd = Eigen::MatrixXd::Zero(nc, nf);
    Eigen::VectorXd rhs_q = Eigen::VectorXd::Zero(nf), rhs_c(nc);
    for (Index c = 0; c < nc; ++c) {
        const auto v = mesh.cell(c);
        const auto f = mesh.cell_facets(c);
        const double area = mesh.cell_measure(c);
        // Basis of facet k: sign |F| / (d |K|) (x - P_k), P_k the opposite vertex.
        auto basis = [&](int k, const Point &x) {
            const double s = mesh.facet_sign(f[k], c) * mesh.facet_measure(f[k]) / (d * area);
            const Point &p = mesh.vertex(v[k]);
            return Point{s * (x[0] - p[0]), s * (x[1] - p[1])};
        };
        const Point &a = mesh.vertex(v[0]), &b = mesh.vertex(v[1]);
        const Point &e = d == 1 ? a : mesh.vertex(v[2]);
        for (const auto &q : rule) {
            Point x{a[0] + q.ref[0] * (b[0] - a[0]), a[1] + q.ref[0] * (b[1] - a[1])};
            if (d == 2) {
                x[0] += q.ref[1] * (e[0] - a[0]);
                x[1] += q.ref[1] * (e[1] - a[1]);
            }
            const double w = q.weight * area / ref_measure;
            for (int i = 0; i <= d; ++i)
                for (int j = 0; j <= d; ++j) {
                    const Point pi = basis(i, x), pj = basis(j, x);
                    M(f[i], f[j]) += w * (pi[0] * pj[0] + pi[1] * pj[1]);
                }
        }
        for (int k = 0; k <= d; ++k)
            Bd(c, f[k]) += mesh.facet_sign(f[k], c) * mesh.facet_measure(f[k]);
        const double r = reaction.size() > 0 ? reaction[c] : 0.0;
        rhs_c[c] = -(sys.cell_source[c][0] + r) * area;
    }

    // Dirichlet facets: linear term from u_D; Neumann facets: fixed values.
    std::vector<Index> fixed;
    Eigen::VectorXd fixed_value = Eigen::VectorXd::Zero(nf);
    for (Index f = 0; f < nf; ++f) {
        const Facet &fc = mesh.facet(f);
        if (!fc.on_boundary())
            continue;
        if (fc.tag == BoundaryTag::dirichlet) {
            double mean = 0.0;
            if (d == 1)
                mean = sys.dirichlet_values[fc.vertices[0]];
            else
                mean = 0.5 * (sys.dirichlet_values[fc.vertices[0]] +
                              sys.dirichlet_values[fc.vertices[1]]);
            rhs_q[f] += mesh.facet_measure(f) * mean;
        } else {
            fixed.push_back(f);
            const Point x = d == 1 ? mesh.vertex(fc.vertices[0])
                                   : Point{0.5 * (mesh.vertex(fc.vertices[0])[0] + mesh.vertex(fc.vertices[1])[0]),
                                           0.5 * (mesh.vertex(fc.vertices[0])[1] + mesh.vertex(fc.vertices[1])[1])};
            // Mean outward flux over the facet by Gauss quadrature of the traction data.
            double mean = 0.0;
            if (d == 1) {
                mean = sys.problem.traction[0](x);
            } else {
                const Point &p0 = mesh.vertex(fc.vertices[0]), &p1 = mesh.vertex(fc.vertices[1]);
                for (const auto &q : gauss_interval(6))
                    mean += q.weight * sys.problem.traction[0](
                                           {p0[0] + q.ref[0] * (p1[0] - p0[0]),
                                            p0[1] + q.ref[0] * (p1[1] - p0[1])});
            }
            fixed_value[f] = mean;
        }
    }

    const Index nfix = static_cast<Index>(fixed.size());
    const Index n = nf + nc + nfix;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    K.topLeftCorner(nf, nf) = M;
    K.block(0, nf, nf, nc) = Bd.transpose();
    K.block(nf, 0, nc, nf) = Bd;
    rhs.head(nf) = rhs_q;
    rhs.segment(nf, nc) = rhs_c;
    for (Index k = 0; k < nfix; ++k) {
        K(nf + nc + k, fixed[k]) = 1.0;
        K(fixed[k], nf + nc + k) = 1.0;
        rhs[nf + nc + k] = fixed_value[fixed[k]];
    }
    const Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
    return sol.head(nf);
}

double dense_psi_1d(const DiscreteSystem &sys, const FeField &u_hat, const AdmissibleDual &dual) {
    const Mesh &mesh = *sys.mesh;
    const auto &flux = std::get<Rt0Flux>(dual.flux);
    const auto rule = gauss_interval(12);
    double psi = 0.0;
    for (Index c = 0; c < mesh.num_cells(); ++c) {
        const auto v = mesh.cell(c);
        const auto f = mesh.cell_facets(c);
        const double xa = mesh.vertex(v[0])[0], xb = mesh.vertex(v[1])[0];
        // Facet k is opposite vertex k: facet 1 sits at xa, facet 0 at xb.
        const double qa = flux.values()[f[1]] * mesh.facet_normal(f[1])[0];
        const double qb = flux.values()[f[0]] * mesh.facet_normal(f[0])[0];
        const double du = (u_hat(v[1]) - u_hat(v[0])) / (xb - xa);
        const double r = dual.cell_reaction.size() > 0 ? dual.cell_reaction[c] : 0.0;
        for (const auto &q : rule) {
            const double t = q.ref[0], x = xa + t * (xb - xa), w = q.weight * (xb - xa);
            const double p = (1.0 - t) * qa + t * qb;
            const double u = (1.0 - t) * u_hat(v[0]) + t * u_hat(v[1]);
            const double psi_x = sys.problem.has_obstacle() ? sys.problem.obstacle({x, 0.0}) : 0.0;
            psi += 0.5 * w * (p - du) * (p - du) + w * r * (u - psi_x);
        }
    }
    return psi;
}

} // namespace gcre::oracle
