#pragma once

#include <optional>

#include "pseudotor/dynamics.hpp"
#include "pseudotor/geometry.hpp"

namespace pseudotor {

/// One of the six lines of the base set B. Indices (i,j,k) are distinct;
/// XXY is the family {x_i = x_j = y_k = 0}, XYY is {x_i = y_j = y_k = 0}.
struct BaseSetLine {
    enum class Kind { XXY, XYY };
    Kind kind;
    int i, j, k;
};

std::optional<BaseSetLine> in_base_set(const FlagPoint& p, double tol = 1e-8);

/// Distance (canonical coordinates, root-sum-square of the defining
/// coordinates) to the base set, the three diagonal lines, and their union
/// (the degeneration simplex). Defined on the whole ambient product.
double distance_to_base_set(const AmbientPoint& p);
double distance_to_sing(const AmbientPoint& p);
double distance_to_delta(const AmbientPoint& p);

/// A projective line {<n, w> = 0} in CP^2_w with a real unit normal, plus an
/// orthonormal basis of its plane for 2-component (zeta) coordinates.
struct LineModel {
    Eigen::Vector3d normal;
    Eigen::Matrix<cplx, 3, 2> plane;  // columns: orthonormal real basis

    Vec2c to_line(const Vec3c& w) const { return plane.adjoint() * w; }
    Vec3c from_line(const Vec2c& zeta) const { return plane * zeta; }
    double off_line_residual(const Vec3c& w) const {
        return std::abs(normal.cast<cplx>().dot(w)) / w.norm();
    }
};

LineModel make_line(const Eigen::Vector3d& normal);
/// The image line CP^1_w = {w_0 + w_1 + w_2 = 0} of the flag variety.
const LineModel& flag_line();

/// w = x .* y, unnormalized.
Vec3c psi_raw(const AmbientPoint& p);
/// The fibration map on the flag variety; throws OnBaseSet when all three
/// products vanish within tolerance.
ProjectivePoint psi(const FlagPoint& p);

/// Differential of psi in horizontal representation at unit w.
Vec3c d_psi(const AmbientPoint& p, const AmbientTangent& t);

struct FiberClass {
    enum class Tag { Generic, OneZero, TwoZero };
    Tag tag;
    int index;  // the distinguished coordinate (zero for OneZero, nonzero for TwoZero)
};

FiberClass classify_fiber_point(const ProjectivePoint& w, double tol = 1e-8);

/// Function on a projective line in CP^2_w, exposed through its value,
/// differential and Hamiltonian field in ambient horizontal representation.
struct LineFunction {
    virtual ~LineFunction() = default;
    virtual double value(const Vec3c& w_unit) const = 0;
    virtual double diff(const Vec3c& w_unit, const Vec3c& dw) const = 0;
    virtual Vec3c field(const Vec3c& w_unit) const = 0;
    virtual const LineModel& line() const = 0;
};

/// Symbol on a line: Hermitian 2x2 form in the zeta coordinates.
class LineSymbol : public LineFunction {
  public:
    LineSymbol(const Mat2c& h2, const LineModel& lm);
    double value(const Vec3c& w_unit) const override;
    double diff(const Vec3c& w_unit, const Vec3c& dw) const override;
    Vec3c field(const Vec3c& w_unit) const override;
    const LineModel& line() const override { return lm_; }
    const Mat2c& h2() const { return h2_; }

  private:
    Mat2c h2_;
    LineModel lm_;
};

/// Pullback h∘psi as a Hamiltonian on the hypersurface: the differential
/// composed with d_psi, solved through the flag tangent basis.
AmbientTangent pullback_ham_field(const LineFunction& h, const FlagPoint& p,
                                  const Vec3c& cvec = Vec3c::Ones());
double pullback_value(const LineFunction& h, const AmbientPoint& p);

struct HorizontalLift {
    Vec3c base_vector;      // horizontal representative at unit w
    AmbientTangent lifted;  // dpsi(lifted) = base_vector, omega(lifted, ker dpsi) = 0
};

/// Symplectic-connection lift at p (p off B and Sing). Throws
/// SingularFiberPoint when dpsi drops rank or the fiber dimension is wrong.
HorizontalLift horizontal_lift(const FlagPoint& p, const Vec3c& u_base,
                               const LineModel& lm = flag_line(),
                               const Vec3c& cvec = Vec3c::Ones());

struct CompatibilityResult {
    double tau;                     // scaling factor, expected positive
    double collinearity_residual;   // sine of the angle between lift and X_{h∘psi}
};

CompatibilityResult compatibility_check(const FlagPoint& p, const LineFunction& h);

/// Numerical rank of [X_{F1} X_{F2}]; rank < 2 detects the degeneration
/// simplex Delta(F1, F2) = B ∪ Sing.
int simplex_rank(const FlagPoint& p, const IntegralPair& integrals, double threshold = 1e-7);

}  // namespace pseudotor
