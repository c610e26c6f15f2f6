#include "gcre/error.hpp"
#include "gcre/expression.hpp"
#include "gcre/fem.hpp"
#include "gcre/quadrature.hpp"
#include "gcre/solver.hpp"
#include "oracles/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace gcre;

namespace {

ProblemSpec poisson_1d(double f) {
    ProblemSpec p;
    p.kind = ProblemKind::linear_poisson;
    p.geometry = Interval{0.0, 1.0};
    p.body_force = {constant_field(f), constant_field(0.0)};
    return p;
}

ProblemSpec elasticity(const SideTags &tags) {
    ProblemSpec p;
    p.kind = ProblemKind::linear_elasticity;
    p.geometry = Rectangle{2.0, 1.0};
    p.tags = tags;
    p.material = Material::from_young(10.0, 0.3);
    return p;
}

std::shared_ptr<const Mesh> mesh_of(const ProblemSpec &p, Index nx, Index ny = 0) {
    return std::make_shared<const Mesh>(build_mesh(p.geometry, {nx, ny}, p.tags));
}

} // namespace

TEST_CASE("expressions") {
    CHECK(Expression("1 - x^2")(0.5) == doctest::Approx(0.75));
    CHECK(Expression("2*x + 3*y")(1.0, 2.0) == doctest::Approx(8.0));
    CHECK(Expression("-2^2")(0.0) == doctest::Approx(-4.0));
    CHECK(Expression("2^3^2")(0.0) == doctest::Approx(512.0));
    CHECK(Expression("max(x, 1) + min(2, y) + pow(2, 3)")(0.0, 5.0) == doctest::Approx(11.0));
    CHECK(Expression("sin(pi/2) + exp(0) + sqrt(4) + abs(-1)")(0.0) == doctest::Approx(5.0));
    CHECK(Expression("3*e")(0.0) == doctest::Approx(3.0 * std::exp(1.0)));
    CHECK(Expression("0.02").is_constant());
    CHECK_FALSE(Expression("x").is_constant());
    CHECK_THROWS_AS(Expression("1 +"), InvalidInput);
    CHECK_THROWS_AS(Expression("foo(x)"), InvalidInput);
    CHECK_THROWS_AS(Expression("(x"), InvalidInput);
    CHECK_THROWS_AS(Expression("x y"), InvalidInput);
}

TEST_CASE("quadrature exactness") {
    for (int n = 1; n <= 6; ++n) {
        double s = 0.0;
        for (const auto &q : gauss_interval(n))
            s += q.weight * std::pow(q.ref[0], 2 * n - 1);
        CHECK(s == doctest::Approx(1.0 / (2 * n)).epsilon(1e-13));
        // int over the reference triangle of x^a y^b = a! b! / (a + b + 2)!
        const int deg = 2 * n - 2;
        double t = 0.0;
        for (const auto &q : gauss_triangle(n))
            t += q.weight * std::pow(q.ref[0], deg / 2) * std::pow(q.ref[1], deg - deg / 2);
        const int a = deg / 2, b = deg - deg / 2;
        CHECK(t == doctest::Approx(std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3))
                       .epsilon(1e-13));
    }
}

TEST_CASE("build_mesh") {
    SUBCASE("interval") {
        const Mesh m = build_mesh(Interval{0.0, 1.0}, {2, 0}, {});
        REQUIRE(m.num_vertices() == 3);
        CHECK(m.num_cells() == 2);
        CHECK(m.vertex(1)[0] == 0.5);
    }
    SUBCASE("square") {
        const Mesh m = build_mesh(Rectangle{1.0, 1.0}, {2, 2}, {});
        CHECK(m.num_vertices() == 9);
        CHECK(m.num_cells() == 8);
        double area = 0.0;
        for (Index c = 0; c < m.num_cells(); ++c) {
            CHECK(m.cell_measure(c) > 0.0);
            area += m.cell_measure(c);
        }
        CHECK(std::abs(area - 1.0) <= 1e-15);
        Index boundary = 0;
        for (const Facet &f : m.facets())
            if (f.on_boundary()) {
                ++boundary;
                CHECK(f.tag.has_value());
            }
        CHECK(boundary == 8);
    }
    SUBCASE("refinement") {
        const Mesh m = build_mesh(Rectangle{1.0, 0.5}, {4, 2}, {});
        const Mesh r = refine(refine(m));
        CHECK(r.h_max() == doctest::Approx(m.h_max() / 4.0));
        for (Index v = 0; v < m.num_vertices(); ++v) {
            bool found = false;
            for (const Point &p : r.vertices())
                found = found || p == m.vertex(v);
            CHECK(found);
        }
    }
    SUBCASE("point location") {
        const Mesh m = build_mesh(Rectangle{1.0, 1.0}, {3, 3}, {});
        for (Index c = 0; c < m.num_cells(); ++c)
            CHECK(m.locate(m.centroid(c)) == c);
    }
    SUBCASE("invalid") {
        CHECK_THROWS_AS(build_mesh(Interval{0.0, 1.0}, {0, 0}, {}), InvalidInput);
        CHECK_THROWS_AS(build_mesh(Rectangle{1.0, 1.0}, {2, 0}, {}), InvalidInput);
    }
}

TEST_CASE("mesh text format round trip") {
    SideTags tags;
    tags.bottom = BoundaryTag::contact;
    tags.left = BoundaryTag::neumann;
    const Mesh m = build_mesh(Rectangle{1.0, 0.25, 0.5, -1.0}, {4, 1}, tags);
    std::stringstream ss;
    write_mesh(ss, m);
    const Mesh r = read_mesh(ss);
    REQUIRE(r.num_vertices() == m.num_vertices());
    REQUIRE(r.num_cells() == m.num_cells());
    for (Index v = 0; v < m.num_vertices(); ++v)
        CHECK(r.vertex(v) == m.vertex(v));
    for (Index f = 0; f < m.num_facets(); ++f) {
        CHECK(r.facet(f).tag == m.facet(f).tag);
        CHECK(r.facet(f).vertices == m.facet(f).vertices);
    }
    std::stringstream bad("gcre-mesh 1\ndimension 3\n");
    CHECK_THROWS_AS(read_mesh(bad), InvalidInput);
}

TEST_CASE("1D assembly by hand") {
    const auto p = poisson_1d(1.0);
    const auto sys = assemble(p, mesh_of(p, 2));
    CHECK(sys.stiffness.coeff(1, 1) == doctest::Approx(4.0));
    CHECK(sys.load[1] == doctest::Approx(0.5));
    CHECK(sys.dirichlet_mask[0]);
    CHECK(sys.dirichlet_mask[2]);
    CHECK_FALSE(sys.dirichlet_mask[1]);
}

TEST_CASE("zero data gives a zero load") {
    ProblemSpec p;
    p.kind = ProblemKind::linear_poisson;
    p.geometry = Rectangle{1.0, 1.0};
    p.tags.top = BoundaryTag::neumann;
    const auto sys = assemble(p, mesh_of(p, 4, 4));
    CHECK(sys.load.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("energy norm") {
    const auto p = poisson_1d(0.0);
    const auto mesh = mesh_of(p, 2);
    const auto sys = assemble(p, mesh);
    FeField v{mesh, 1, Eigen::VectorXd::Zero(3)};
    CHECK(energy_norm_sq(sys, v) == 0.0);
    v.values[1] = 1.0;
    CHECK(energy_norm_sq(sys, v) == doctest::Approx(4.0));
}

TEST_CASE("stiffness matches a dense oracle") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n01;
    SUBCASE("scalar") {
        ProblemSpec p;
        p.kind = ProblemKind::linear_poisson;
        p.geometry = Rectangle{1.5, 1.0, -0.5, 0.25};
        const auto mesh = mesh_of(p, 5, 3);
        const auto sys = assemble(p, mesh);
        const Eigen::MatrixXd K = oracle::dense_stiffness(*mesh, 1, p.material);
        CHECK((Eigen::MatrixXd(sys.stiffness) - K).lpNorm<Eigen::Infinity>() <= 1e-13);
        for (int t = 0; t < 10; ++t) {
            FeField v{mesh, 1, Eigen::VectorXd::NullaryExpr(mesh->num_vertices(), [&] { return n01(rng); })};
            const double dense = v.values.dot(K * v.values);
            CHECK(std::abs(energy_norm_sq(sys, v) - dense) <= 1e-13 * dense);
        }
    }
    SUBCASE("elastic") {
        const auto p = elasticity({});
        const auto mesh = mesh_of(p, 4, 2);
        const auto sys = assemble(p, mesh);
        const Eigen::MatrixXd K = oracle::dense_stiffness(*mesh, 2, p.material);
        CHECK((Eigen::MatrixXd(sys.stiffness) - K).lpNorm<Eigen::Infinity>() <=
              1e-13 * K.lpNorm<Eigen::Infinity>());
    }
}

TEST_CASE("stiffness kernel") {
    SUBCASE("constants") {
        ProblemSpec p;
        p.kind = ProblemKind::linear_poisson;
        p.geometry = Rectangle{1.0, 1.0};
        const auto sys = assemble(p, mesh_of(p, 6, 6));
        const Eigen::VectorXd one = Eigen::VectorXd::Ones(sys.num_dofs());
        CHECK((sys.stiffness * one).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
    SUBCASE("rigid motions") {
        const auto p = elasticity({});
        const auto mesh = mesh_of(p, 6, 3);
        const auto sys = assemble(p, mesh);
        for (int mode = 0; mode < 3; ++mode) {
            Eigen::VectorXd r(sys.num_dofs());
            for (Index v = 0; v < mesh->num_vertices(); ++v) {
                const Point &x = mesh->vertex(v);
                r[2 * v] = mode == 0 ? 1.0 : mode == 1 ? 0.0 : -x[1];
                r[2 * v + 1] = mode == 0 ? 0.0 : mode == 1 ? 1.0 : x[0];
            }
            CHECK((sys.stiffness * r).lpNorm<Eigen::Infinity>() <= 1e-12);
        }
    }
}

TEST_CASE("load scales linearly with the source") {
    ProblemSpec p;
    p.kind = ProblemKind::linear_poisson;
    p.geometry = Rectangle{1.0, 1.0};
    p.body_force = {expression_field(Expression("1 + x*y")), constant_field(0.0)};
    const auto mesh = mesh_of(p, 5, 5);
    const auto a = assemble(p, mesh);
    p.body_force = {expression_field(Expression("2*(1 + x*y)")), constant_field(0.0)};
    const auto b = assemble(p, mesh);
    CHECK(b.load == 2.0 * a.load);
}

TEST_CASE("patch tests reproduce affine fields") {
    SUBCASE("scalar") {
        ProblemSpec p;
        p.kind = ProblemKind::linear_poisson;
        p.geometry = Rectangle{1.0, 2.0};
        p.dirichlet = {expression_field(Expression("1 + 2*x - 3*y")), constant_field(0.0)};
        const auto mesh = mesh_of(p, 5, 7);
        const auto sys = assemble(p, mesh);
        const FeField u = solve_linear(sys);
        for (Index v = 0; v < mesh->num_vertices(); ++v) {
            const Point &x = mesh->vertex(v);
            CHECK(std::abs(u(v) - (1 + 2 * x[0] - 3 * x[1])) <= 1e-12);
        }
    }
    SUBCASE("elastic") {
        SideTags tags;
        auto p = elasticity(tags);
        p.dirichlet = {expression_field(Expression("0.1 + 0.02*x - 0.03*y")),
                       expression_field(Expression("-0.05*x + 0.01*y"))};
        const auto mesh = mesh_of(p, 6, 4);
        const auto sys = assemble(p, mesh);
        const FeField u = solve_linear(sys);
        for (Index v = 0; v < mesh->num_vertices(); ++v) {
            const Point &x = mesh->vertex(v);
            CHECK(std::abs(u(v, 0) - (0.1 + 0.02 * x[0] - 0.03 * x[1])) <= 1e-10);
            CHECK(std::abs(u(v, 1) - (-0.05 * x[0] + 0.01 * x[1])) <= 1e-10);
        }
    }
}

TEST_CASE("Galerkin orthogonality of the linear solve") {
    ProblemSpec p;
    p.kind = ProblemKind::linear_poisson;
    p.geometry = Rectangle{1.0, 1.0};
    p.tags.right = BoundaryTag::neumann;
    p.body_force = {expression_field(Expression("sin(3*x)*y")), constant_field(0.0)};
    p.traction = {expression_field(Expression("y")), constant_field(0.0)};
    const auto sys = assemble(p, mesh_of(p, 8, 8));
    const FeField u = solve_linear(sys);
    const Eigen::VectorXd r = sys.stiffness * u.values - sys.load;
    for (Index i = 0; i < r.size(); ++i)
        if (!sys.dirichlet_mask[i])
            CHECK(std::abs(r[i]) <= 1e-10 * sys.load.lpNorm<Eigen::Infinity>());
}

TEST_CASE("constraint data") {
    SUBCASE("obstacle nodes and weights") {
        ProblemSpec p;
        p.kind = ProblemKind::obstacle_1d;
        p.geometry = Interval{-2.0, 2.0};
        p.obstacle = expression_field(Expression("1 - x^2"));
        p.constraint_curvature = 2.0;
        const auto mesh = mesh_of(p, 8);
        const auto sys = assemble(p, mesh);
        CHECK(sys.num_constraints() == 7);
        double total = 0.0;
        for (const auto &n : sys.constraints) {
            total += n.weight;
            const double x = mesh->vertex(n.vertex)[0];
            CHECK(n.bound == doctest::Approx(1.0 - x * x + sys.constraint_lift));
        }
        CHECK(total == doctest::Approx(3.5));
        // Lift 1/2 kappa (h/2)^2 keeps the P1 interpolant above the parabola.
        CHECK(sys.constraint_lift == doctest::Approx(0.5 * 2.0 * 0.25 * 0.25));
    }
    SUBCASE("contact nodes on the bottom side") {
        SideTags tags;
        tags.bottom = BoundaryTag::contact;
        tags.left = tags.right = BoundaryTag::neumann;
        auto p = elasticity(tags);
        p.kind = ProblemKind::tresca_contact_2d;
        p.obstacle = constant_field(0.0);
        p.friction = constant_field(0.1);
        const auto mesh = mesh_of(p, 4, 2);
        const auto sys = assemble(p, mesh);
        CHECK(sys.num_constraints() == 5);
        for (const auto &n : sys.constraints) {
            CHECK(n.normal_dof == 2 * n.vertex + 1);
            CHECK(n.normal_sign == -1.0);
            CHECK(n.tangent_dof == 2 * n.vertex);
            CHECK(n.friction == doctest::Approx(0.1));
        }
        FeField v{mesh, 2, Eigen::VectorXd::Zero(sys.num_dofs())};
        for (Index k = 0; k < mesh->num_vertices(); ++k)
            v.values[2 * k] = 1.0;
        CHECK(lumped_friction(sys, v.values) == doctest::Approx(0.1 * 2.0));
    }
}

TEST_CASE("problem validation") {
    ProblemSpec p;
    p.kind = ProblemKind::linear_poisson;
    p.geometry = Interval{0.0, 1.0};
    p.tags.left = p.tags.right = BoundaryTag::neumann;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    ProblemSpec q;
    q.kind = ProblemKind::obstacle_1d;
    q.geometry = Interval{0.0, 1.0};
    CHECK_THROWS_AS(q.validate(), InvalidInput); // no obstacle
    CHECK_THROWS_AS(parse_problem_kind("coulomb"), InvalidInput);
    CHECK(std::string(to_string(parse_problem_kind("tresca_contact_2d"))) == "tresca_contact_2d");
}

TEST_CASE("prolongation is exact on nested meshes") {
    ProblemSpec p;
    p.kind = ProblemKind::linear_poisson;
    p.geometry = Rectangle{1.0, 1.0};
    const auto coarse = mesh_of(p, 3, 3);
    const auto fine = std::make_shared<const Mesh>(refine(*coarse, 4));
    std::array<ScalarField, 2> f{expression_field(Expression("x*x + y")), constant_field(0.0)};
    const FeField u = interpolate(coarse, 1, f);
    const FeField w = prolongate(u, fine);
    for (Index c = 0; c < fine->num_cells(); ++c) {
        const Point m = fine->centroid(c);
        CHECK(w.evaluate(c, m) == doctest::Approx(u.evaluate(coarse->locate(m), m)).epsilon(1e-14));
    }
}
