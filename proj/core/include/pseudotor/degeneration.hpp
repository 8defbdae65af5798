#pragma once

#include "pseudotor/fibration.hpp"

namespace pseudotor {

/// Residual of the deformed hypersurface equation t x0 y0 + x1 y1 + x2 y2.
double ft_residual(const Vec3c& x, const Vec3c& y, cplx t);

/// Nearest point of F_t (deformed constraint) from an ambient pair.
FlagPoint ft_project(const Vec3c& x, const Vec3c& y, cplx t);

/// Constraint vector of the family member: (t, 1, 1).
inline Vec3c ft_cvec(cplx t) { return Vec3c(t, 1.0, 1.0); }

/// The limit line l0 = {w1 + w2 = 0} carrying the degenerate fibration.
const LineModel& limit_line();

/// Classify a point of l0 by its coordinate-vanishing pattern; the two
/// singular values are [1:0:0] (TwoZero) and [0:1:-1] (OneZero).
FiberClass psi0_classify(const ProjectivePoint& w, double tol = 1e-8);

/// Base Morse function of the degenerate toric fibration: Symbol mode on l0
/// with critical points [1:0:0] and [0:1:-1] (orthogonal, so exact).
BaseMorseFunction toric_h0();

/// Default diagonal moment pair on CP^2_w.
std::pair<SymbolFunction, SymbolFunction> default_diagonal_moments();

/// Rank of span(X_H1, X_H2) at a point of CP^2_w.
int cp2_rank(const SymbolFunction& h1, const SymbolFunction& h2, const Vec3c& w,
             double threshold = 1e-7);

struct DiagonalMomentReport {
    int n = 0;
    int rank_drops = 0;               // samples with rank < 2
    double max_drop_line_distance = 0.0;  // line distance of any dropped sample
    bool no_false_positives = true;       // all drops within 1e-2 of a line
};

/// Degeneracy locus of the diagonal toric fibration is the union of the
/// coordinate lines {w_i = 0}: random sampling plus on-line probes.
DiagonalMomentReport diagonal_moment_check(const SymbolFunction& h1, const SymbolFunction& h2,
                                           Rng& rng, int n = 10000);

/// The six boundary components of the degenerate fibration: points of F_0
/// with w_i ~ 0 have x_i ~ 0 or y_i ~ 0, and both patterns occur for each i.
bool f0_boundary_components_ok(Rng& rng, int n = 2000);

/// Base rotation carrying the flag image line {sum w_i = 0} to the limit
/// line l0 in time T (half the rotation angle of the normals).
struct RotationPlan {
    SymbolFunction g;  // symbol on CP^2_w, Hermitian generator i*J
    double T = 0.0;    // transport time
    LineModel from, to;

    Vec3c transport(const Vec3c& w, double t) const;
};

RotationPlan make_g();

/// g∘psi cut off to vanish near the degeneration simplex Delta = B ∪ Sing:
/// a quintic smoothstep collar in distance_to_delta between radii r2 < r1.
class CutoffHamiltonian {
  public:
    CutoffHamiltonian(const SymbolFunction& g, double r1, double r2);

    double r1() const { return r1_; }
    double r2() const { return r2_; }
    const SymbolFunction& g() const { return g_; }

    double value(const AmbientPoint& p) const;
    /// Hamiltonian field on the ambient product (analytic outside the
    /// collar, finite-difference distance gradient inside).
    AmbientTangent field(const AmbientPoint& p) const;

  private:
    SymbolFunction g_;
    double r1_, r2_;
};

CutoffHamiltonian cutoff_G(const SymbolFunction& g, double r1, double r2);

struct IsotopyPointReport {
    AmbientPoint end;
    double f0_residual = 0.0;    // (a) deformed constraint at t = 0
    double f1_drift = 0.0;       // (b) integral value drift
    double f2_drift = 0.0;
    double line_residual = 0.0;  // (c) distance of psi-image to l0
    double omega_drift = 0.0;    // (d) symplectic pairing drift of FD frames
    double min_delta_distance = 0.0;
};

struct IsotopyReport {
    std::vector<IsotopyPointReport> points;
    double max_f0_residual = 0.0;
    double max_value_drift = 0.0;
    double max_line_residual = 0.0;
    double max_omega_drift = 0.0;
    double min_line_residual = 1e18;
};

/// Ambient Hamiltonian flow of G for time T applied to a point cloud, with
/// the four per-point conservation/arrival checks. Throws EnteredCollar when
/// a trajectory dips inside the r2-neighborhood of Delta.
IsotopyReport isotopy_transport(const CutoffHamiltonian& g, double T,
                                const std::vector<FlagPoint>& cloud,
                                const IntegralPair& integrals);

}  // namespace pseudotor
