#pragma once

#include "pseudotor/fibration.hpp"

namespace pseudotor {

/// Anticanonical boundary divisor adapted to a base Morse function: the
/// product of the two fiber components over its critical points. Each factor
/// is linear in w = x .* y with coefficient vector c = w* x (1,1,1) (cross
/// product), which vanishes exactly on the fiber over the critical point w*.
struct BoundaryDivisor {
    Vec3c c1, c2;

    /// Defining section evaluated at the (unnormalized) representative.
    cplx section(const AmbientPoint& p) const {
        const Vec3c w = p.x.cwiseProduct(p.y);
        return (c1.transpose() * w).value() * (c2.transpose() * w).value();
    }
};

BoundaryDivisor divisor_from(const BaseMorseFunction& h);

/// Ordered frame of a (half-dimensional) tangent 3-plane.
struct FrameTriple {
    AmbientTangent e1, e2, e3;
};

FrameTriple frame_of(const TorusSampleFrame& f);

/// Meromorphic volume form with poles on the divisor, evaluated on a frame
/// triple: the Poincare residue of the product volume along the hypersurface,
/// divided by the divisor section, in the affine chart (x_i = 1, y_j = 1)
/// with y_k eliminated. Chart-independent by construction; the explicit-chart
/// variant exists to verify that.
cplx theta_D(const FlagPoint& p, const FrameTriple& fr, const BoundaryDivisor& d);
cplx theta_D_chart(const FlagPoint& p, const FrameTriple& fr, const BoundaryDivisor& d, int i,
                   int j, int k);

/// arg theta_D; the specialty condition is that this is constant on each
/// fiber torus of the minimal fibration (and across fibers).
double specialty_phase(const FlagPoint& p, const FrameTriple& fr, const BoundaryDivisor& d);

struct SpecialtyReport {
    std::size_t n = 0;
    double mean_phase = 0.0;     // circular mean of the sample phases
    double max_deviation = 0.0;  // max wrapped deviation from the mean
    double dispersion = 0.0;     // 1 - mean resultant length
};

/// Phase statistics of theta_D over the sampled torus frames.
SpecialtyReport specialty_report(const TorusFiber& t, const BoundaryDivisor& d);
SpecialtyReport merge_reports(const std::vector<SpecialtyReport>& parts);

/// Phase drift of theta_D under exact Hamiltonian transport of the point and
/// pushforward of the frame by time t (zero iff theta_D is invariant under
/// the symbol flow; the structure torus preserves it).
double lie_invariance_drift(const SymbolFunction& f, const FlagPoint& p, const FrameTriple& fr,
                            const BoundaryDivisor& d, double t);

}  // namespace pseudotor
