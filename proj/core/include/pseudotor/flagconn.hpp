#pragma once

#include "pseudotor/fibration.hpp"

namespace pseudotor {

/// Classical flag presentation: a point p of CP^2 and a line l through it,
/// the line stored as a dual covector with the pairing <l, p> = sum l_i p_i.
/// The hypersurface coordinate y IS the dual covector l.
struct FlagAsPair {
    Vec3c p, l;
};

FlagAsPair as_pair(const FlagPoint& f);
FlagPoint as_flag(const FlagAsPair& f, double tol = 1e-10);
double incidence_residual(const FlagAsPair& f);

/// Forgetful projection (p, l) -> p.
ProjectivePoint pi_project(const FlagAsPair& f);

/// The symbol pair F_A = (A, -conj(A)) induced on the flag variety by a
/// Hermitian A; balanced by construction.
SymbolFunction flag_symbol(const Mat3c& a);

struct DpiCheck {
    double residual = 0.0;             // |dpi(X_{F_A}) - X_{f_A}| / |X_{f_A}|
    double constant = 0.0;             // fitted pairing ratio omega_prod / pi^* omega_x
    double constant_dispersion = 0.0;  // spread of the ratio over basis pairs
};

/// Verify dpi(X_{F_A}) = X_{f_A} at f, and report the fitted proportionality
/// constant of omega against the projected pairing (no assertion: the
/// dispersion is part of the report).
DpiCheck dpi_relation_check(const Mat3c& a, const FlagAsPair& f, const IntegralPair& integrals);

/// The connection distribution at f: X_{F1}, X_{F2}, I X_{F1}, I X_{F2}.
/// Throws DegenerateDistribution below rank 4 (the fiber over Delta).
std::array<AmbientTangent, 4> horizontal_distribution(const FlagAsPair& f,
                                                      const IntegralPair& integrals,
                                                      double threshold = 1e-7);

/// Max over generator pairs of the normalized component of the flow-commutator
/// bracket outside the distribution, at commutator scale `step`. Integrability
/// makes this O(step).
double frobenius_residual(const FlagAsPair& f, double step, const IntegralPair& integrals);

/// Same bracket test with one generator replaced by a random omega-orthogonal
/// field (flowed numerically): the residual does not vanish with the step.
double frobenius_control_residual(const FlagAsPair& f, double step, const IntegralPair& integrals,
                                  Rng& rng);

/// Diagonal torus action K = diag(s, t, 1): p -> K p, l -> K^{-T} l.
FlagAsPair torus_orbit_sample(const FlagAsPair& seed, cplx s, cplx t);

struct FlagClass {
    enum class Tag { Generic, ThroughVertex };
    Tag tag;
    int vertex;  // -1 for Generic
};

/// ThroughVertex(i) iff the line passes through the basis vertex e_i.
FlagClass classify_flag(const FlagAsPair& f, double tol = 1e-8);

enum class SchubertMembership { Neither, InDp0, InDl0, Both };

/// Membership in the two Schubert divisors: D_p0 = {l through [1:0:0]},
/// D_l0 = {p on {z_0 = 0}}.
SchubertMembership schubert_membership(const FlagAsPair& f, double tol = 1e-8);

/// Fraction of `n_targets` random CP^2 probe points approximated within
/// `radius` by pi-images of an (s, t) log-modulus x phase orbit grid.
double orbit_coverage(const FlagAsPair& seed, Rng& rng, int grid = 12, int n_targets = 400,
                      double radius = 0.15);

}  // namespace pseudotor
