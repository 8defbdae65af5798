#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "pseudotor/rng.hpp"

namespace pseudotor {

using cplx = std::complex<double>;
using Vec2c = Eigen::Vector2cd;
using Vec3c = Eigen::Vector3cd;
using Mat2c = Eigen::Matrix2cd;
using Mat3c = Eigen::Matrix3cd;
using Mat6d = Eigen::Matrix<double, 6, 6>;
using Vec6d = Eigen::Matrix<double, 6, 1>;

/// Point of a complex projective space, stored as a canonical homogeneous
/// representative: unit Euclidean norm, first nonzero entry real positive.
struct ProjectivePoint {
    Eigen::VectorXcd coords;
    int dim() const { return static_cast<int>(coords.size()); }
};

/// Canonicalize a nonzero homogeneous vector. Throws ZeroVector.
Eigen::VectorXcd canonicalize(const Eigen::VectorXcd& raw);
Vec3c canonicalize3(const Vec3c& raw);
Vec2c canonicalize2(const Vec2c& raw);
ProjectivePoint normalize(const Eigen::VectorXcd& raw);

/// Fubini-Study chordal distance between projective points (phase and
/// scale invariant, in [0, 1]).
double proj_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// Component of v Hermitian-orthogonal to z (z need not be unit).
Vec3c herm_project(const Vec3c& z, const Vec3c& v);

/// Point of the hypersurface model of the flag variety: pair (x, y) in
/// CP^2 x CP^2 with sum x_i y_i = 0.
struct FlagPoint {
    Vec3c x, y;
};

/// Point of the ambient product CP^2 x CP^2 (no hypersurface constraint).
struct AmbientPoint {
    Vec3c x, y;
    AmbientPoint() = default;
    AmbientPoint(const Vec3c& x_, const Vec3c& y_) : x(x_), y(y_) {}
    explicit AmbientPoint(const FlagPoint& p) : x(p.x), y(p.y) {}
};

double flag_residual(const Vec3c& x, const Vec3c& y);
inline double flag_residual(const FlagPoint& p) { return flag_residual(p.x, p.y); }

/// Residual of the deformed constraint <c, x.*y> = 0 (c = (1,1,1) is the
/// flag variety, c = (t,1,1) the degeneration family member F_t).
double constraint_residual(const Vec3c& x, const Vec3c& y, const Vec3c& cvec);

/// Build a FlagPoint after validating the constraint. Throws DomainMismatch
/// when the residual exceeds tol.
FlagPoint make_flag(const Vec3c& x, const Vec3c& y, double tol = 1e-10);

/// Nearest constraint-satisfying point by damped Newton with minimal-norm
/// corrections; cvec generalizes to the F_t hypersurfaces.
FlagPoint project_to_flag(const Vec3c& x, const Vec3c& y, double tol = 1e-10,
                          const Vec3c& cvec = Vec3c::Ones());

/// Real tangent vector of the product in ambient representation: a pair of
/// C^3 velocities attached to homogeneous representatives of (x, y).
struct AmbientTangent {
    Vec3c dx = Vec3c::Zero(), dy = Vec3c::Zero();
    AmbientTangent() = default;
    AmbientTangent(const Vec3c& u, const Vec3c& v) : dx(u), dy(v) {}
    AmbientTangent operator+(const AmbientTangent& o) const { return {dx + o.dx, dy + o.dy}; }
    AmbientTangent operator-(const AmbientTangent& o) const { return {dx - o.dx, dy - o.dy}; }
    AmbientTangent operator*(double s) const { return {s * dx, s * dy}; }
    AmbientTangent rotated() const { return {cplx(0, 1) * dx, cplx(0, 1) * dy}; }  // I . v
    double norm() const;
};

/// Fubini-Study symplectic pairing on one factor at representative z
/// (any scale): Im[(u^† v)|z|^2 - (u^† z)(z^† v)] / |z|^4.
double fs_pair(const Vec3c& z, const Vec3c& u, const Vec3c& v);

/// Product symplectic form evaluated on two ambient tangents at p.
double omega_pair(const AmbientPoint& p, const AmbientTangent& a, const AmbientTangent& b);

/// Basis (6 real dimensions) of the tangent space of {<c, x.*y> = 0} at p,
/// in horizontal representation (dx ⟂ x, dy ⟂ y). Deterministic.
std::array<AmbientTangent, 6> flag_tangent_basis(const FlagPoint& p,
                                                 const Vec3c& cvec = Vec3c::Ones());

/// Basis (8 real dimensions) of the tangent space of the ambient product.
std::array<AmbientTangent, 8> product_tangent_basis(const AmbientPoint& p);

/// Product affine chart (x_i = 1, y_j = 1) with the coordinate y_k
/// eliminated through the hypersurface equation. Local coordinates are the
/// three remaining complex ratios; omega is the pulled-back product
/// Fubini-Study form in the 6 real chart directions.
struct ChartFrame {
    int xi = 0, yj = 0, yk = 1;
    std::array<int, 2> xfree{};  // x indices != xi, ascending
    int yfree = 0;               // the y index != yj that is kept
    std::array<cplx, 3> local{};
    Mat6d omega = Mat6d::Zero();
};

/// Chart auto-selected for maximal conditioning (dominant |x_i|, |y_j|,
/// then the largest remaining |x_k|).
ChartFrame chart_frame(const FlagPoint& p);
/// Explicit chart; throws DegenerateChart when a pivot coordinate is tiny.
ChartFrame chart_frame_at(const FlagPoint& p, int xi, int yj, int yk);

/// Parameterize the flag from chart data (inverse of the local coordinates).
FlagPoint chart_point(const ChartFrame& c);

/// Holomorphic Jacobian of the chart parameterization: ambient velocities
/// of the three complex chart directions at the chart representative.
std::array<AmbientTangent, 3> chart_jacobian(const ChartFrame& c);

/// Chart representation of a tangent vector (3 complex chart velocities
/// stored as 6 reals: Re/Im interleaved).
struct TangentVector {
    int xi = 0, yj = 0, yk = 1;
    Vec6d comps = Vec6d::Zero();
};

TangentVector to_chart(const FlagPoint& p, const ChartFrame& c, const AmbientTangent& t);
AmbientTangent from_chart(const FlagPoint& p, const ChartFrame& c, const TangentVector& t);

/// Distance between two flags measured in the chart of the first.
double chart_distance(const FlagPoint& p, const FlagPoint& q);

FlagPoint random_flag(Rng& rng);
AmbientPoint random_ambient(Rng& rng);
ProjectivePoint random_projective(Rng& rng, int dim);

}  // namespace pseudotor
