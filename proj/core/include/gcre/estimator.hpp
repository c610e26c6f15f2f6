#pragma once

#include "gcre/admissibility.hpp"

#include <optional>

namespace gcre {

class ReferenceSolution;

struct EnergyTriple {
    double psi = 0.0;
    double f_p = 0.0;
    double f_c = 0.0;
    double identity_residual = 0.0; ///< |psi - (f_p + f_c)|
};

/// Error functionals with respect to a trusted solution (u, p, lambda, omega).
struct ErrorSplit {
    double phi_bar = 0.0;       ///< primal error functional
    double phi_bar_star = 0.0;  ///< dual error functional
    double cross_term = 0.0;    ///< B(u_hat - u, (p_hat - p, lambda_hat - lambda, omega_hat - omega))
    double primal_error = 0.0;  ///< 1/2 a(u_hat - u, u_hat - u)
    double dual_error = 0.0;    ///< 1/2 [p_hat - p, p_hat - p]
};

struct GcreReport {
    EnergyTriple energy;
    double error_bound = 0.0; ///< psi; bounds 1/2 a(u - u_hat, u - u_hat)
    std::optional<double> reference_error;
    std::optional<double> effectivity;
    std::optional<ErrorSplit> split;
    double reference_tolerance = 0.0;
    double scale = 1.0; ///< max(1, |psi|, a(u_hat, u_hat))
    MembershipReport membership;
    double data_oscillation = 0.0;
    bool bound_ok = true;
};

/// Generalized constitutive relation error together with the independently
/// computed potential and complementary energies. Throws UncertifiedPair if
/// the pair fails verify_membership.
EnergyTriple gcre(const FeField &u_hat, const AdmissibleDual &dual, const DiscreteSystem &system);

/// Potential energy 1/2 a(u, u) - l(u) + j(u) with the exact friction term.
double potential_energy(const FeField &u, const DiscreteSystem &system);
/// Complementary energy 1/2 [p, p] - g1(lambda) - g2(omega) - <p n, u_D>.
double complementary_energy(const AdmissibleDual &dual, const DiscreteSystem &system);

/// 1/2 <sigma - K grad u, K^{-1} sigma - grad u> evaluated pointwise by
/// quadrature. Throws Misuse if the dual carries nonzero multipliers or the
/// problem has a nonzero friction bound.
double classic_cre_linear(const FeField &u_hat, const AdmissibleDual &dual,
                          const DiscreteSystem &system);

ErrorSplit error_functionals(const FeField &u_hat, const AdmissibleDual &dual,
                             const ReferenceSolution &reference, const DiscreteSystem &system);

/// Full report; bound violations are flagged in bound_ok, not thrown.
GcreReport bound_report(const FeField &u_hat, const AdmissibleDual &dual,
                        const DiscreteSystem &system,
                        const ReferenceSolution *reference = nullptr);

} // namespace gcre
