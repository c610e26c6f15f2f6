#include "gcre/solver.hpp"

#include "gcre/error.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

namespace gcre {

namespace {

// Solves A u = b with a subset of dofs fixed, by symmetric row and column
// replacement; the sparsity pattern never changes, so the symbolic
// factorization is computed once.
class FixedDofSolver {
  public:
    explicit FixedDofSolver(const Eigen::SparseMatrix<double> &A) : A_(A), work_(A) {
        work_.makeCompressed();
        ldlt_.analyzePattern(work_);
    }

    Eigen::VectorXd solve(const std::vector<char> &fixed, const Eigen::VectorXd &values,
                          const Eigen::VectorXd &rhs) {
        for (Index j = 0; j < A_.outerSize(); ++j) {
            Eigen::SparseMatrix<double>::InnerIterator src(A_, j);
            for (Eigen::SparseMatrix<double>::InnerIterator it(work_, j); it; ++it, ++src) {
                const Index i = it.row();
                if (fixed[i] || fixed[j])
                    it.valueRef() = i == j ? 1.0 : 0.0;
                else
                    it.valueRef() = src.value();
            }
        }
        Eigen::VectorXd g = Eigen::VectorXd::Zero(values.size());
        for (Index i = 0; i < g.size(); ++i)
            if (fixed[i])
                g[i] = values[i];
        Eigen::VectorXd b = rhs - A_ * g;
        for (Index i = 0; i < g.size(); ++i)
            if (fixed[i])
                b[i] = g[i];
        ldlt_.factorize(work_);
        if (ldlt_.info() != Eigen::Success)
            throw SolverFailure("factorization failed", std::nan(""));
        Eigen::VectorXd u = ldlt_.solve(b);
        if (ldlt_.info() != Eigen::Success || !u.allFinite())
            throw SolverFailure("linear solve failed", std::nan(""));
        return u;
    }

  private:
    const Eigen::SparseMatrix<double> &A_;
    Eigen::SparseMatrix<double> work_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

double normal_value(const ConstraintNode &n, const Eigen::VectorXd &u) {
    return n.normal_sign * u[n.normal_dof];
}

double tangent_value(const ConstraintNode &n, const Eigen::VectorXd &u) {
    return n.tangent_dof >= 0 ? n.tangent_sign * u[n.tangent_dof] : 0.0;
}

Eigen::VectorXd project_feasible(const DiscreteSystem &sys, Eigen::VectorXd u) {
    for (const ConstraintNode &n : sys.constraints) {
        const double un = normal_value(n, u);
        if (n.sense * (un - n.bound) < 0.0)
            u[n.normal_dof] = n.normal_sign * n.bound;
    }
    return u;
}

double stationarity(const DiscreteSystem &sys, const Eigen::VectorXd &u,
                    const Eigen::VectorXd &lambda, const Eigen::VectorXd &omega) {
    Eigen::VectorXd r = sys.stiffness * u - sys.load;
    if (sys.num_constraints() > 0)
        r -= sys.b1.transpose() * lambda + sys.b2.transpose() * omega;
    double res = 0.0;
    for (Index i = 0; i < r.size(); ++i)
        if (!sys.dirichlet_mask[i])
            res = std::max(res, std::abs(r[i]));
    return res;
}

} // namespace

void check_dirichlet_feasibility(const DiscreteSystem &sys) {
    const Mesh &mesh = *sys.mesh;
    const ProblemSpec &pb = sys.problem;
    if (!pb.has_obstacle() && !pb.has_contact())
        return;
    const double tol = 1e-12 * (1.0 + sys.dirichlet_values.lpNorm<Eigen::Infinity>());
    for (Index v = 0; v < mesh.num_vertices(); ++v) {
        if (!sys.dirichlet_mask[sys.dof(v, 0)])
            continue;
        if (pb.has_obstacle()) {
            const double sense = pb.orientation == ConeOrientation::below ? 1.0 : -1.0;
            const double bound = pb.obstacle(mesh.vertex(v)) + sense * sys.constraint_lift;
            if (sense * (sys.dirichlet_values[v] - bound) < -tol)
                throw InfeasibleProblem("Dirichlet data violate the obstacle at vertex " +
                                        std::to_string(v));
        }
    }
    if (pb.has_contact()) {
        for (Index f = 0; f < mesh.num_facets(); ++f) {
            const Facet &facet = mesh.facet(f);
            if (facet.tag != BoundaryTag::contact)
                continue;
            const Point n = mesh.facet_normal(f);
            for (Index v : facet.vertices) {
                if (!sys.dirichlet_mask[sys.dof(v, 0)])
                    continue;
                const double un = n[0] * sys.dirichlet_values[sys.dof(v, 0)] +
                                  n[1] * sys.dirichlet_values[sys.dof(v, 1)];
                if (un > pb.obstacle(mesh.vertex(v)) - sys.constraint_lift + tol)
                    throw InfeasibleProblem("Dirichlet data penetrate the gap at vertex " +
                                            std::to_string(v));
            }
        }
    }
}

FeField solve_linear(const DiscreteSystem &sys) {
    FixedDofSolver solver(sys.stiffness);
    FeField u;
    u.mesh = sys.mesh;
    u.components = sys.components;
    u.values = solver.solve(sys.dirichlet_mask, sys.dirichlet_values, sys.load);
    return u;
}

double discrete_energy(const DiscreteSystem &sys, const Eigen::VectorXd &u) {
    return 0.5 * u.dot(sys.stiffness * u) - sys.load.dot(u) + lumped_friction(sys, u);
}

namespace {

// Start for the active set iteration taken from the same problem on the
// grid with half the resolution. Without it the active set of an obstacle
// problem moves by one node per iteration and the count grows with n.
struct NestedStart {
    Eigen::VectorXd u, lambda, omega;
    std::vector<char> active;
};

std::optional<NestedStart> nested_start(const DiscreteSystem &sys, const SolverOptions &options) {
    constexpr Index min_cells = 32;
    const Mesh &mesh = *sys.mesh;
    const auto &g = mesh.grid();
    if (!g || g->nx < min_cells || g->nx % 2 != 0 ||
        (mesh.dimension() == 2 && (g->ny < 2 || g->ny % 2 != 0)))
        return std::nullopt;
    std::optional<NestedStart> out;
    try {
        const std::array<Index, 2> half{g->nx / 2, mesh.dimension() == 2 ? g->ny / 2 : 0};
        const auto coarse =
            std::make_shared<const Mesh>(build_mesh(sys.problem.geometry, half, mesh.tags()));
        const auto &gc = coarse->grid();
        if (!gc || gc->x0 != g->x0 || gc->y0 != g->y0 || gc->width != g->width ||
            gc->height != g->height)
            return std::nullopt;
        const DiscreteSystem cs = assemble(sys.problem, coarse);
        const PrimalSolution sol = solve_primal(cs, options);
        const MixedSolution mixed = extract_multipliers(cs, sol.u);

        // Nodal indicators on the coarse mesh, interpolated onto the fine nodes.
        auto field = [&](auto value) {
            FeField f{coarse, 1, Eigen::VectorXd::Zero(coarse->num_vertices())};
            for (Index k = 0; k < cs.num_constraints(); ++k)
                f.values[cs.constraints[k].vertex] = value(k);
            return f;
        };
        std::vector<char> coarse_active(cs.num_constraints(), 0);
        for (Index k : sol.active)
            coarse_active[k] = 1;
        const FeField act = field([&](Index k) { return double(coarse_active[k]); });
        const FeField lam = field([&](Index k) { return mixed.lambda[k]; });
        const FeField om = field([&](Index k) { return mixed.omega[k]; });

        NestedStart st;
        st.u = prolongate(sol.u, sys.mesh).values;
        const Index m = sys.num_constraints();
        st.lambda = Eigen::VectorXd::Zero(m);
        st.omega = Eigen::VectorXd::Zero(m);
        st.active.assign(m, 0);
        for (Index i = 0; i < m; ++i) {
            const Point &p = mesh.vertex(sys.constraints[i].vertex);
            const Index c = coarse->locate(p);
            st.active[i] = act.evaluate(c, p) >= 0.5;
            st.lambda[i] = st.active[i] ? lam.evaluate(c, p) : 0.0;
            st.omega[i] = std::clamp(om.evaluate(c, p), -sys.constraints[i].friction,
                                     sys.constraints[i].friction);
        }
        out = std::move(st);
    } catch (const SolverFailure &) {
        // fall back to the plain start
    }
    return out;
}

} // namespace

PrimalSolution solve_primal(const DiscreteSystem &sys, const SolverOptions &options) {
    check_dirichlet_feasibility(sys);
    const Index ndof = sys.num_dofs();
    const Index m = sys.num_constraints();
    FixedDofSolver solver(sys.stiffness);

    double c = options.complementarity_parameter;
    if (c <= 0.0 && m > 0) {
        c = 0.0;
        for (const ConstraintNode &n : sys.constraints)
            c += sys.stiffness.coeff(n.normal_dof, n.normal_dof) / n.weight;
        c /= static_cast<double>(m);
    }

    PrimalSolution result;
    result.u.mesh = sys.mesh;
    result.u.components = sys.components;

    Eigen::VectorXd u = solver.solve(sys.dirichlet_mask, sys.dirichlet_values, sys.load);
    if (m == 0) {
        result.u.values = u;
        result.residual = stationarity(sys, u, {}, {}) /
                          std::max(1.0, sys.load.lpNorm<Eigen::Infinity>());
        result.energy_history.push_back(discrete_energy(sys, u));
        return result;
    }

    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m), omega = Eigen::VectorXd::Zero(m);
    const std::optional<NestedStart> start = nested_start(sys, options);
    if (start) {
        u = start->u;
        lambda = start->lambda;
        omega = start->omega;
    }
    // Node state: bit 0 normal active, bits 1-2 friction (0 stick, 1 slip+, 2 slip-).
    std::vector<unsigned char> state(m, 0), previous;
    std::set<std::vector<unsigned char>> seen;
    auto update_state = [&](const Eigen::VectorXd &uu) {
        for (Index i = 0; i < m; ++i) {
            const ConstraintNode &n = sys.constraints[i];
            unsigned char s = 0;
            if (n.sense * (lambda[i] - c * (normal_value(n, uu) - n.bound)) > 0.0)
                s |= 1;
            if (n.tangent_dof >= 0 && n.friction > 0.0) {
                const double z = omega[i] - c * tangent_value(n, uu);
                if (std::abs(z) > n.friction)
                    s |= static_cast<unsigned char>(z > 0.0 ? 2 : 4);
            }
            state[i] = s;
        }
    };

    update_state(u);
    if (start)
        for (Index i = 0; i < m; ++i)
            state[i] = static_cast<unsigned char>((state[i] & 6) | (start->active[i] ? 1 : 0));
    double best_energy = std::numeric_limits<double>::infinity();
    const double load_scale = std::max(1.0, sys.load.lpNorm<Eigen::Infinity>());
    std::vector<char> fixed(ndof);
    Eigen::VectorXd values(ndof);

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        fixed = sys.dirichlet_mask;
        values = sys.dirichlet_values;
        Eigen::VectorXd rhs = sys.load;
        for (Index i = 0; i < m; ++i) {
            const ConstraintNode &n = sys.constraints[i];
            if (state[i] & 1) {
                fixed[n.normal_dof] = 1;
                values[n.normal_dof] = n.normal_sign * n.bound;
            }
            if (n.tangent_dof < 0)
                continue;
            if (n.friction <= 0.0)
                continue;
            const unsigned char fr = state[i] & 6;
            if (fr == 0) {
                fixed[n.tangent_dof] = 1;
                values[n.tangent_dof] = 0.0;
            } else {
                const double w = fr == 2 ? n.friction : -n.friction;
                rhs[n.tangent_dof] += n.weight * n.tangent_sign * w;
            }
        }
        u = solver.solve(fixed, values, rhs);

        const Eigen::VectorXd r = sys.stiffness * u - sys.load;
        for (Index i = 0; i < m; ++i) {
            const ConstraintNode &n = sys.constraints[i];
            lambda[i] = (state[i] & 1) ? n.normal_sign * r[n.normal_dof] / n.weight : 0.0;
            if (n.tangent_dof < 0 || n.friction <= 0.0)
                continue;
            const unsigned char fr = state[i] & 6;
            if (fr == 0)
                omega[i] = n.tangent_sign * r[n.tangent_dof] / n.weight;
            else
                omega[i] = fr == 2 ? n.friction : -n.friction;
        }

        const Eigen::VectorXd feasible = project_feasible(sys, u);
        const double energy = discrete_energy(sys, feasible);
        if (energy <= best_energy) {
            best_energy = energy;
            result.energy_history.push_back(energy);
        }

        previous = state;
        update_state(u);
        result.iterations = iter;
        if (state == previous) {
            const double res = stationarity(sys, u, lambda, omega) / load_scale;
            double violation = 0.0;
            for (Index i = 0; i < m; ++i) {
                const ConstraintNode &n = sys.constraints[i];
                violation = std::max(violation, -n.sense * (normal_value(n, u) - n.bound));
                violation = std::max(violation, -n.sense * lambda[i] * n.weight / load_scale);
                if (n.tangent_dof >= 0)
                    violation = std::max(violation, (std::abs(omega[i]) - n.friction) *
                                                        n.weight / load_scale);
            }
            result.residual = std::max(res, violation);
            const double u_scale = std::max(1.0, u.lpNorm<Eigen::Infinity>());
            if (result.residual > options.tol * u_scale)
                throw SolverFailure("active set converged but KKT residual is too large",
                                    result.residual);
            result.u.values = u;
            for (Index i = 0; i < m; ++i) {
                if (state[i] & 1)
                    result.active.push_back(i);
                if (sys.constraints[i].tangent_dof >= 0 && (state[i] & 6) == 0 &&
                    sys.constraints[i].friction > 0.0)
                    result.stick.push_back(i);
            }
            return result;
        }
        if (!seen.insert(previous).second)
            c *= 0.125; // cycling: weight the multiplier part of the update more
    }
    throw SolverFailure("active set iteration did not converge within " +
                            std::to_string(options.max_iter) + " iterations",
                        stationarity(sys, u, lambda, omega) / load_scale);
}

MixedSolution extract_multipliers(const DiscreteSystem &sys, const FeField &u) {
    const Index m = sys.num_constraints();
    MixedSolution mixed;
    mixed.u = u;
    mixed.lambda = Eigen::VectorXd::Zero(m);
    mixed.omega = Eigen::VectorXd::Zero(m);
    const Eigen::VectorXd r = sys.stiffness * u.values - sys.load;
    const double slack_tol = 1e-10 * (1.0 + u.values.lpNorm<Eigen::Infinity>());
    for (Index i = 0; i < m; ++i) {
        const ConstraintNode &n = sys.constraints[i];
        const double slack = n.sense * (normal_value(n, u.values) - n.bound);
        if (slack <= slack_tol) {
            const double l = n.normal_sign * r[n.normal_dof] / n.weight;
            mixed.lambda[i] = n.sense * std::max(0.0, n.sense * l);
        }
        if (n.tangent_dof >= 0 && n.friction > 0.0) {
            const double w = n.tangent_sign * r[n.tangent_dof] / n.weight;
            mixed.omega[i] = std::clamp(w, -n.friction, n.friction);
        }
    }
    mixed.stationarity_residual = stationarity(sys, u.values, mixed.lambda, mixed.omega);
    return mixed;
}

ComplementarityResidual complementarity(const DiscreteSystem &sys, const MixedSolution &mixed) {
    ComplementarityResidual out;
    const Eigen::VectorXd &u = mixed.u.values;
    if (sys.num_constraints() > 0) {
        out.normal = std::abs((sys.b1 * u).dot(mixed.lambda) - sys.g1.dot(mixed.lambda));
        out.friction_functional = lumped_friction(sys, u);
        out.friction = std::abs((sys.b2 * u).dot(mixed.omega) + out.friction_functional);
    }
    out.scale = std::max(1.0, u.dot(sys.stiffness * u));
    return out;
}

} // namespace gcre
