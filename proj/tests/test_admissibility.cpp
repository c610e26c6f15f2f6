#include "gcre/admissibility.hpp"
#include "gcre/error.hpp"
#include "gcre/expression.hpp"
#include "gcre/forms.hpp"
#include "gcre/quadrature.hpp"
#include "oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace gcre;

namespace {

std::shared_ptr<const Mesh> mesh_of(const ProblemSpec &p, Index nx, Index ny = 0) {
    return std::make_shared<const Mesh>(build_mesh(p.geometry, {nx, ny}, p.tags));
}

ProblemSpec obstacle_1d(double psi0 = 0.0) {
    ProblemSpec p;
    p.kind = ProblemKind::obstacle_1d;
    p.geometry = Interval{0.0, 1.0};
    p.obstacle = constant_field(psi0);
    return p;
}

ProblemSpec tresca(Index) {
    ProblemSpec p;
    p.kind = ProblemKind::tresca_contact_2d;
    p.geometry = Rectangle{1.0, 0.25};
    p.tags.bottom = BoundaryTag::contact;
    p.tags.left = p.tags.right = BoundaryTag::neumann;
    p.material = Material::from_young(1.0, 0.3);
    p.dirichlet = {constant_field(0.02), constant_field(-0.01)};
    p.obstacle = constant_field(0.0);
    p.friction = constant_field(0.02);
    return p;
}

MixedSolution solve_mixed(const DiscreteSystem &sys) {
    const PrimalSolution s = solve_primal(sys);
    MixedSolution m = extract_multipliers(sys, s.u);
    m.u = make_kinematically_admissible(s.u, sys);
    return m;
}

} // namespace

TEST_CASE("kinematic admissibility by nodal clamping") {
    const auto p = obstacle_1d();
    const auto mesh = mesh_of(p, 4);
    const auto sys = assemble(p, mesh);
    SUBCASE("feasible input is returned bitwise") {
        FeField u{mesh, 1, Eigen::VectorXd::Zero(5)};
        u.values << 0.0, 0.3, 0.1, 1e-17, 0.0;
        const FeField w = make_kinematically_admissible(u, sys);
        CHECK(w.values == u.values);
    }
    SUBCASE("one violating node is clamped") {
        FeField u{mesh, 1, Eigen::VectorXd::Zero(5)};
        u.values << 0.0, 0.2, -0.1, 0.4, 0.0;
        const FeField w = make_kinematically_admissible(u, sys);
        CHECK(w.values[2] == 0.0);
        CHECK(w.values[1] == 0.2);
        CHECK(w.values[3] == 0.4);
    }
    SUBCASE("infeasible Dirichlet data") {
        const auto q = obstacle_1d(0.5);
        const auto s = assemble(q, mesh_of(q, 4));
        FeField u{s.mesh, 1, Eigen::VectorXd::Zero(5)};
        CHECK_THROWS_AS(make_kinematically_admissible(u, s), InfeasibleProblem);
    }
}

TEST_CASE("clamped fields are feasible pointwise") {
    ProblemSpec p;
    p.kind = ProblemKind::obstacle_2d;
    p.geometry = Rectangle{1.0, 1.0};
    p.obstacle = expression_field(Expression("-0.3 - (x-0.5)^2 - (y-0.5)^2"));
    p.constraint_curvature = 2.0;
    const auto mesh = mesh_of(p, 7, 5);
    const auto sys = assemble(p, mesh);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    for (int t = 0; t < 20; ++t) {
        FeField u{mesh, 1, Eigen::VectorXd::NullaryExpr(mesh->num_vertices(), [&] { return -0.3 + 0.2 * n01(rng); })};
        const FeField w = make_kinematically_admissible(u, sys);
        const auto rule = gauss_triangle(6);
        for (Index c = 0; c < mesh->num_cells(); ++c) {
            const auto v = mesh->cell(c);
            const Point &a = mesh->vertex(v[0]), &b = mesh->vertex(v[1]), &d = mesh->vertex(v[2]);
            for (const auto &q : rule) {
                const Point x{a[0] + q.ref[0] * (b[0] - a[0]) + q.ref[1] * (d[0] - a[0]),
                              a[1] + q.ref[0] * (b[1] - a[1]) + q.ref[1] * (d[1] - a[1])};
                CHECK(w.evaluate(c, x) >= p.obstacle(x) - 1e-14);
            }
        }
    }
}

TEST_CASE("recovered scalar flux of the two-point problem") {
    ProblemSpec p;
    p.kind = ProblemKind::linear_poisson;
    p.geometry = Interval{0.0, 1.0};
    p.body_force = {constant_field(1.0), constant_field(0.0)};
    const auto mesh = mesh_of(p, 8);
    const auto sys = assemble(p, mesh);
    MixedSolution m;
    m.u = solve_linear(sys);
    const AdmissibleDual dual = recover_equilibrated_dual(sys, m);
    const auto &q = std::get<Rt0Flux>(dual.flux);
    for (Index c = 0; c < mesh->num_cells(); ++c) {
        CHECK(std::abs(q.cell_divergence(c) + 1.0) <= 1e-11);
        for (double t : {0.0, 0.3, 1.0}) {
            const auto v = mesh->cell(c);
            const double x = mesh->vertex(v[0])[0] + t * (mesh->vertex(v[1])[0] - mesh->vertex(v[0])[0]);
            CHECK(q.evaluate(c, {x, 0.0})[0] == doctest::Approx(0.5 - x).epsilon(1e-12));
        }
    }
    const auto rep = verify_membership(m.u, dual, sys);
    CHECK(rep.certified());
    CHECK(rep.weak_equilibrium_sup <= 1e-11);
}

TEST_CASE("affine solution gives the exact constant flux") {
    ProblemSpec p;
    p.kind = ProblemKind::linear_poisson;
    p.geometry = Rectangle{1.0, 1.0};
    p.dirichlet = {expression_field(Expression("2*x - y")), constant_field(0.0)};
    const auto mesh = mesh_of(p, 4, 4);
    const auto sys = assemble(p, mesh);
    MixedSolution m;
    m.u = solve_linear(sys);
    const AdmissibleDual dual = recover_equilibrated_dual(sys, m);
    const auto &q = std::get<Rt0Flux>(dual.flux);
    for (Index c = 0; c < mesh->num_cells(); ++c) {
        const Point g = q.evaluate(c, mesh->centroid(c));
        CHECK(std::abs(g[0] - 2.0) <= 1e-11);
        CHECK(std::abs(g[1] + 1.0) <= 1e-11);
    }
    CHECK(forms::constitutive_gap(sys, dual, m.u.values) <= 1e-14);
}

TEST_CASE("recovered flux matches the dense KKT oracle on tiny meshes") {
    SUBCASE("1D with an obstacle reaction") {
        const auto p = obstacle_1d(-0.5);
        const auto mesh = mesh_of(p, 6);
        const auto sys = assemble(p, mesh);
        Eigen::VectorXd r(6);
        r << 0.0, 0.5, 1.0, 2.0, 0.0, 0.25;
        const AdmissibleDual dual = recover_scalar_dual(sys, r);
        const Eigen::VectorXd ref = oracle::dense_flux_kkt(sys, r);
        CHECK((std::get<Rt0Flux>(dual.flux).values() - ref).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
    SUBCASE("2D with Neumann data and a variable source") {
        ProblemSpec p;
        p.kind = ProblemKind::linear_poisson;
        p.geometry = Rectangle{1.0, 1.5};
        p.tags.right = BoundaryTag::neumann;
        p.tags.top = BoundaryTag::neumann;
        p.body_force = {expression_field(Expression("1 + x*y")), constant_field(0.0)};
        p.traction = {expression_field(Expression("0.5 + x")), constant_field(0.0)};
        p.dirichlet = {expression_field(Expression("x - y*y")), constant_field(0.0)};
        const auto mesh = mesh_of(p, 2, 3);
        REQUIRE(mesh->num_cells() == 12);
        const auto sys = assemble(p, mesh);
        const Eigen::VectorXd none;
        const AdmissibleDual dual = recover_scalar_dual(sys, none);
        const Eigen::VectorXd ref = oracle::dense_flux_kkt(sys, none);
        CHECK((std::get<Rt0Flux>(dual.flux).values() - ref).lpNorm<Eigen::Infinity>() <= 1e-10);
    }
}

TEST_CASE("membership residuals") {
    const auto p = obstacle_1d();
    const auto mesh = mesh_of(p, 8);
    const auto sys = assemble(p, mesh);
    const AdmissibleDual dual = recover_scalar_dual(sys, Eigen::VectorXd::Zero(8));
    FeField u{mesh, 1, Eigen::VectorXd::Zero(9)};
    SUBCASE("node violation is reported") {
        u.values[3] = -1e-3;
        const auto rep = verify_membership(u, dual, sys);
        CHECK(rep.kinematic_min_slack == doctest::Approx(-1e-3));
        CHECK_FALSE(rep.certified());
    }
    SUBCASE("perturbed facet flux grows the equilibrium residual linearly") {
        const auto &q = std::get<Rt0Flux>(dual.flux);
        const double base = verify_membership(u, dual, sys).weak_equilibrium_sup;
        // Interior facet at vertex 4; its basis is the hat function, whose
        // product with a neighbouring hat gradient integrates to 1/2.
        Index facet = -1;
        for (Index f = 0; f < mesh->num_facets(); ++f)
            if (mesh->facet(f).vertices[0] == 4)
                facet = f;
        REQUIRE(facet >= 0);
        for (double eps : {1e-6, 1e-4, 1e-2}) {
            Eigen::VectorXd vals = q.values();
            vals[facet] += eps;
            AdmissibleDual d2 = dual;
            d2.flux = Rt0Flux(mesh, vals);
            const double sup = verify_membership(u, d2, sys).weak_equilibrium_sup;
            CHECK(sup - base == doctest::Approx(0.5 * eps).epsilon(1e-6));
        }
    }
}

TEST_CASE("obstacle recovery is certified and consistent") {
    ProblemSpec p;
    p.kind = ProblemKind::obstacle_2d;
    p.geometry = Rectangle{1.0, 1.0};
    p.obstacle = expression_field(Expression("0.1 - 2*((x-0.5)^2 + (y-0.5)^2)"));
    p.constraint_curvature = 4.0;
    p.body_force = {constant_field(-2.0), constant_field(0.0)};
    const auto mesh = mesh_of(p, 12, 12);
    const auto sys = assemble(p, mesh);
    const MixedSolution m = solve_mixed(sys);
    const AdmissibleDual dual = recover_equilibrated_dual(sys, m);
    const auto rep = verify_membership(m.u, dual, sys);
    CHECK(rep.certified());
    CHECK(rep.multiplier_consistency <= 1e-11);
    CHECK(dual.cell_reaction.maxCoeff() > 0.0);
    std::ostringstream os;
    write_dual(os, dual, sys);
    CHECK(os.str().find('\n') != std::string::npos);
}

TEST_CASE("elastic recovery for the Tresca benchmark") {
    const auto p = tresca(8);
    const auto mesh = mesh_of(p, 8, 2);
    const auto sys = assemble(p, mesh);
    const MixedSolution m = solve_mixed(sys);
    const AdmissibleDual dual = recover_equilibrated_dual(sys, m);
    const auto rep = verify_membership(m.u, dual, sys);
    CHECK(rep.certified());
    CHECK(rep.multiplier_consistency <= 1e-11);
    const auto &a = std::get<AiryStress>(dual.flux);

    SUBCASE("tractions vanish on the free sides") {
        for (double y : {0.03, 0.1, 0.2})
            for (double x : {0.0, 1.0}) {
                const SymTensor s = a.evaluate({x, y});
                CHECK(std::abs(s.xx) <= 1e-12);
                CHECK(std::abs(s.xy) <= 1e-12);
            }
    }
    SUBCASE("optimality against traction-free variations") {
        // Interior grid nodes carry Airy functions whose stresses vanish on
        // the boundary, so the recovered stress is orthogonal to them.
        const Grid &g = a.grid();
        const Material &mat = p.material;
        const auto rule = gauss_square(5);
        for (Index node : {g.nx + 2, 2 * (g.nx + 1) - 3}) {
            for (int dof = 0; dof < 4; ++dof) {
                Eigen::VectorXd c = Eigen::VectorXd::Zero(a.coefficients().size());
                c[4 * node + dof] = 1.0;
                const AiryStress delta(g, c, {0.0, 0.0});
                double inner = 0.0, norm = 0.0;
                for (Index j = 0; j < g.ny; ++j)
                    for (Index i = 0; i < g.nx; ++i)
                        for (const auto &q : rule) {
                            const SymTensor s = a.evaluate_local(i, j, q.ref[0], q.ref[1]);
                            const SymTensor t = delta.evaluate_local(i, j, q.ref[0], q.ref[1]);
                            inner += q.weight * g.hx * g.hy * compliance_product(mat.lambda, mat.mu, s, t);
                            norm += q.weight * g.hx * g.hy * compliance_product(mat.lambda, mat.mu, t, t);
                        }
                CHECK(std::abs(inner) <= 1e-9 * std::sqrt(norm * forms::flux_energy(sys, dual)));
            }
        }
    }
    SUBCASE("contact tractions stay in the cones") {
        for (Index k = 0; k < dual.contact.normal.size(); ++k) {
            CHECK(dual.contact.normal[k] <= 0.0);
            CHECK(std::abs(dual.contact.tangential[k]) <= 0.02 + 1e-15);
        }
    }
}

TEST_CASE("recovery input errors") {
    const auto p = obstacle_1d();
    const auto sys = assemble(p, mesh_of(p, 4));
    CHECK_THROWS_AS(recover_scalar_dual(sys, Eigen::VectorXd::Zero(3)), InvalidInput);
    const auto q = tresca(4);
    const auto es = assemble(q, mesh_of(q, 4, 1));
    CHECK_THROWS_AS(recover_scalar_dual(es, Eigen::VectorXd()), Misuse);
}
