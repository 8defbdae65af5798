#include "pseudotor/pseudotoric.hpp"

#include <cmath>

#include "pseudotor/errors.hpp"

namespace pseudotor {

std::optional<BaseSetLine> in_base_set(const FlagPoint& p, double tol) {
    // XXY family: x = e_k, y_k = 0 (i.e. x_i = x_j = y_k = 0, {i,j} = complement of k)
    for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        if (std::abs(p.x(i)) < tol && std::abs(p.x(j)) < tol && std::abs(p.y(k)) < tol)
            return BaseSetLine{BaseSetLine::Kind::XXY, i, j, k};
    }
    // XYY family: y = e_i, x_i = 0 (i.e. x_i = y_j = y_k = 0)
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        if (std::abs(p.x(i)) < tol && std::abs(p.y(j)) < tol && std::abs(p.y(k)) < tol)
            return BaseSetLine{BaseSetLine::Kind::XYY, i, j, k};
    }
    return std::nullopt;
}

double distance_to_base_set(const AmbientPoint& p) {
    const Vec3c x = p.x.normalized(), y = p.y.normalized();
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        const int i = (k + 1) % 3, j = (k + 2) % 3;
        best = std::min(best, std::sqrt(std::norm(x(i)) + std::norm(x(j)) + std::norm(y(k))));
        best = std::min(best, std::sqrt(std::norm(y(i)) + std::norm(y(j)) + std::norm(x(k))));
    }
    return best;
}

double distance_to_sing(const AmbientPoint& p) {
    const Vec3c x = p.x.normalized(), y = p.y.normalized();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        best = std::min(best, std::sqrt(std::norm(x(i)) + std::norm(y(i))));
    return best;
}

double distance_to_delta(const AmbientPoint& p) {
    return std::min(distance_to_base_set(p), distance_to_sing(p));
}

LineModel make_line(const Eigen::Vector3d& normal) {
    LineModel lm;
    lm.normal = normal.normalized();
    int a = 0;
    lm.normal.cwiseAbs().minCoeff(&a);
    Eigen::Vector3d u1 = Eigen::Vector3d::Unit(a) - lm.normal(a) * lm.normal;
    u1.normalize();
    const Eigen::Vector3d u2 = lm.normal.cross(u1);
    lm.plane.col(0) = u1.cast<cplx>();
    lm.plane.col(1) = u2.cast<cplx>();
    return lm;
}

const LineModel& flag_line() {
    static const LineModel lm = make_line(Eigen::Vector3d::Ones());
    return lm;
}

Vec3c psi_raw(const AmbientPoint& p) {
    return p.x.cwiseProduct(p.y);
}

ProjectivePoint psi(const FlagPoint& p) {
    const Vec3c w = psi_raw(AmbientPoint(p));
    if (w.norm() / (p.x.norm() * p.y.norm()) < 1e-8)
        throw OnBaseSet("all coordinate products vanish");
    return ProjectivePoint{canonicalize3(w)};
}

Vec3c d_psi(const AmbientPoint& p, const AmbientTangent& t) {
    const Vec3c w = psi_raw(p);
    const Vec3c dw = t.dx.cwiseProduct(p.y) + p.x.cwiseProduct(t.dy);
    const double n = w.norm();
    return herm_project(w / n, dw) / n;
}

FiberClass classify_fiber_point(const ProjectivePoint& w, double tol) {
    if (w.dim() != 3) throw DomainMismatch("fiber classification expects a CP^2_w point");
    int zeros = 0, zero_idx = -1, nonzero_idx = -1;
    for (int i = 0; i < 3; ++i) {
        if (std::abs(w.coords(i)) < tol) {
            ++zeros;
            zero_idx = i;
        } else {
            nonzero_idx = i;
        }
    }
    switch (zeros) {
        case 0: return FiberClass{FiberClass::Tag::Generic, -1};
        case 1: return FiberClass{FiberClass::Tag::OneZero, zero_idx};
        case 2: return FiberClass{FiberClass::Tag::TwoZero, nonzero_idx};
        default: throw ZeroVector("all w coordinates vanish");
    }
}

LineSymbol::LineSymbol(const Mat2c& h2, const LineModel& lm) : h2_(h2), lm_(lm) {
    if ((h2 - h2.adjoint()).norm() > 1e-14)
        throw DomainMismatch("line symbol requires a Hermitian 2x2 form");
}

double LineSymbol::value(const Vec3c& w_unit) const {
    const Vec2c z = lm_.to_line(w_unit);
    return std::real(z.dot(h2_ * z)) / z.squaredNorm();
}

double LineSymbol::diff(const Vec3c& w_unit, const Vec3c& dw) const {
    Vec2c z = lm_.to_line(w_unit);
    const double nz = z.norm();
    z /= nz;
    Vec2c dz = lm_.to_line(dw) / nz;
    dz -= z * z.dot(dz);
    const double f = std::real(z.dot(h2_ * z));
    return 2.0 * std::real(dz.dot(h2_ * z - f * z));
}

Vec3c LineSymbol::field(const Vec3c& w_unit) const {
    Vec2c z = lm_.to_line(w_unit);
    z /= z.norm();
    const double f = std::real(z.dot(h2_ * z));
    const Vec2c xz = cplx(0, -2) * (h2_ * z - f * z);
    return lm_.from_line(xz);
}

AmbientTangent pullback_ham_field(const LineFunction& h, const FlagPoint& p, const Vec3c& cvec) {
    const AmbientPoint ap(p);
    const Vec3c w_unit = psi_raw(ap).normalized();
    return ham_from_differential_flag(
        p, [&](const AmbientTangent& t) { return h.diff(w_unit, d_psi(ap, t)); }, cvec);
}

double pullback_value(const LineFunction& h, const AmbientPoint& p) {
    return h.value(psi_raw(p).normalized());
}

HorizontalLift horizontal_lift(const FlagPoint& p, const Vec3c& u_base, const LineModel& lm,
                               const Vec3c& cvec) {
    const AmbientPoint ap(p);
    const auto basis = flag_tangent_basis(p, cvec);
    const Vec3c w = psi_raw(ap);
    if (w.norm() < 1e-8) throw OnBaseSet("horizontal lift at a base-set point");
    Vec2c zeta = lm.to_line(w);
    zeta /= zeta.norm();

    // dpsi of the basis, in horizontal zeta coordinates
    Eigen::Matrix<cplx, 6, 2> dz;
    for (int a = 0; a < 6; ++a) {
        Vec2c v = lm.to_line(d_psi(ap, basis[a]));
        v -= zeta * zeta.dot(v);
        dz.row(a) = v.transpose();
    }
    Eigen::Matrix<double, 6, 4> r;
    for (int a = 0; a < 6; ++a)
        r.row(a) << dz(a, 0).real(), dz(a, 0).imag(), dz(a, 1).real(), dz(a, 1).imag();

    // dpsi must have rank exactly 2 on the 6-dimensional tangent space
    Eigen::JacobiSVD<Eigen::Matrix<double, 4, 6>> nsvd(r.transpose(), Eigen::ComputeFullV);
    if (nsvd.singularValues()(1) < 1e-7)
        throw SingularFiberPoint("dpsi rank drop at the given flag");
    const Eigen::Matrix<double, 6, 4> fiber = nsvd.matrixV().rightCols<4>();

    Vec2c uz = lm.to_line(u_base);
    uz -= zeta * zeta.dot(uz);

    Eigen::Matrix<double, 8, 6> A = Eigen::Matrix<double, 8, 6>::Zero();
    Eigen::Matrix<double, 8, 1> b = Eigen::Matrix<double, 8, 1>::Zero();
    for (int a = 0; a < 6; ++a) {
        A(0, a) = dz(a, 0).real();
        A(1, a) = dz(a, 0).imag();
        A(2, a) = dz(a, 1).real();
        A(3, a) = dz(a, 1).imag();
    }
    b(0) = uz(0).real();
    b(1) = uz(0).imag();
    b(2) = uz(1).real();
    b(3) = uz(1).imag();
    Mat6d om;
    for (int a = 0; a < 6; ++a)
        for (int c = 0; c < 6; ++c) om(a, c) = omega_pair(ap, basis[a], basis[c]);
    for (int k = 0; k < 4; ++k)
        for (int a = 0; a < 6; ++a) A(4 + k, a) = om.row(a).dot(fiber.col(k));

    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 6>> solver(A,
                                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec6d coeff = solver.solve(b);

    HorizontalLift lift;
    lift.base_vector = u_base;
    for (int a = 0; a < 6; ++a) lift.lifted = lift.lifted + basis[a] * coeff(a);
    return lift;
}

CompatibilityResult compatibility_check(const FlagPoint& p, const LineFunction& h) {
    const AmbientPoint ap(p);
    const Vec3c w_unit = psi_raw(ap).normalized();
    const HorizontalLift lift = horizontal_lift(p, h.field(w_unit), h.line());
    const AmbientTangent xh = pullback_ham_field(h, p);

    const double nl = lift.lifted.norm();
    const double nx = xh.norm();
    if (nl < 1e-12 || nx < 1e-12)
        return CompatibilityResult{0.0, 0.0};  // critical point of h over psi(p)
    const double dot = std::real(lift.lifted.dx.dot(xh.dx)) + std::real(lift.lifted.dy.dot(xh.dy));
    const double tau = nl * nl / dot;  // lift = tau * X_{psi* h} if collinear
    const AmbientTangent resid = lift.lifted - xh * (dot / (nx * nx));
    return CompatibilityResult{tau, resid.norm() / nl};
}

int simplex_rank(const FlagPoint& p, const IntegralPair& integrals, double threshold) {
    const AmbientTangent x1 = ham_field(integrals.F1, p);
    const AmbientTangent x2 = ham_field(integrals.F2, p);
    Eigen::Matrix<double, 12, 2> m;
    for (int i = 0; i < 3; ++i) {
        m(i, 0) = x1.dx(i).real();
        m(3 + i, 0) = x1.dy(i).real();
        m(6 + i, 0) = x1.dx(i).imag();
        m(9 + i, 0) = x1.dy(i).imag();
        m(i, 1) = x2.dx(i).real();
        m(3 + i, 1) = x2.dy(i).real();
        m(6 + i, 1) = x2.dx(i).imag();
        m(9 + i, 1) = x2.dy(i).imag();
    }
    const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix<double, 12, 2>>(m).singularValues();
    int rank = 0;
    for (int i = 0; i < 2; ++i)
        if (sv(i) > threshold) ++rank;
    return rank;
}

}  // namespace pseudotor
