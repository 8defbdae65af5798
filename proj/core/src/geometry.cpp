#include "pseudotor/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "pseudotor/errors.hpp"

namespace pseudotor {

namespace {

// Real-linear rows for complex functionals of z = (u; v) in C^6, acting on
// the stacked real coordinates (Re z, Im z) in R^12.
void push_bilinear_rows(Eigen::Matrix<double, Eigen::Dynamic, 12>& m, int row,
                        const Eigen::Matrix<cplx, 6, 1>& c) {
    for (int i = 0; i < 6; ++i) {
        m(row, i) = c(i).real();
        m(row, 6 + i) = -c(i).imag();
        m(row + 1, i) = c(i).imag();
        m(row + 1, 6 + i) = c(i).real();
    }
}

}  // namespace

Eigen::VectorXcd canonicalize(const Eigen::VectorXcd& raw) {
    const double n = raw.norm();
    if (n < 1e-14) throw ZeroVector("homogeneous vector has norm below 1e-14");
    Eigen::VectorXcd z = raw / n;
    for (int i = 0; i < z.size(); ++i) {
        const double a = std::abs(z(i));
        if (a > 1e-12) {
            z *= std::conj(z(i)) / a;
            break;
        }
    }
    return z;
}

Vec3c canonicalize3(const Vec3c& raw) {
    return canonicalize(Eigen::VectorXcd(raw));
}

Vec2c canonicalize2(const Vec2c& raw) {
    return canonicalize(Eigen::VectorXcd(raw));
}

ProjectivePoint normalize(const Eigen::VectorXcd& raw) {
    return ProjectivePoint{canonicalize(raw)};
}

double proj_distance(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    const double na = a.norm(), nb = b.norm();
    if (na < 1e-14 || nb < 1e-14) throw ZeroVector("proj_distance on zero vector");
    const double c = std::abs(a.dot(b)) / (na * nb);
    return std::sqrt(std::max(0.0, 1.0 - c * c));
}

Vec3c herm_project(const Vec3c& z, const Vec3c& v) {
    return v - z * (z.dot(v) / z.squaredNorm());
}

double flag_residual(const Vec3c& x, const Vec3c& y) {
    return constraint_residual(x, y, Vec3c::Ones());
}

double constraint_residual(const Vec3c& x, const Vec3c& y, const Vec3c& cvec) {
    const cplx r = cvec.transpose() * x.cwiseProduct(y);
    return std::abs(r) / (x.norm() * y.norm());
}

FlagPoint make_flag(const Vec3c& x, const Vec3c& y, double tol) {
    FlagPoint p{canonicalize3(x), canonicalize3(y)};
    if (flag_residual(p) >= tol)
        throw DomainMismatch("flag residual " + std::to_string(flag_residual(p)) +
                             " exceeds tolerance");
    return p;
}

FlagPoint project_to_flag(const Vec3c& x0, const Vec3c& y0, double tol, const Vec3c& cvec) {
    Vec3c x = canonicalize3(x0), y = canonicalize3(y0);
    for (int iter = 0; iter < 50; ++iter) {
        const cplx r = cvec.transpose() * x.cwiseProduct(y);
        if (std::abs(r) < tol) return FlagPoint{canonicalize3(x), canonicalize3(y)};
        // minimal-norm correction of the single complex constraint
        const Vec3c gu = cvec.cwiseProduct(y).conjugate();
        const Vec3c gv = cvec.cwiseProduct(x).conjugate();
        const double s = gu.squaredNorm() + gv.squaredNorm();
        if (s < 1e-28) throw NoConvergence("degenerate constraint gradient");
        x = (x - (r / s) * gu).normalized();
        y = (y - (r / s) * gv).normalized();
    }
    throw NoConvergence("projection to the hypersurface did not converge in 50 steps");
}

double AmbientTangent::norm() const {
    return std::sqrt(dx.squaredNorm() + dy.squaredNorm());
}

double fs_pair(const Vec3c& z, const Vec3c& u, const Vec3c& v) {
    const double n2 = z.squaredNorm();
    const cplx uv = u.dot(v);
    const cplx uz = u.dot(z);
    const cplx zv = z.dot(v);
    return std::imag(uv * n2 - uz * zv) / (n2 * n2);
}

double omega_pair(const AmbientPoint& p, const AmbientTangent& a, const AmbientTangent& b) {
    return fs_pair(p.x, a.dx, b.dx) + fs_pair(p.y, a.dy, b.dy);
}

std::array<AmbientTangent, 6> flag_tangent_basis(const FlagPoint& p, const Vec3c& cvec) {
    Eigen::Matrix<double, Eigen::Dynamic, 12> m(6, 12);
    Eigen::Matrix<cplx, 6, 1> row;
    // bilinear constraint: sum c_i (u_i y_i + x_i v_i) = 0
    row << cvec.cwiseProduct(p.y), cvec.cwiseProduct(p.x);
    push_bilinear_rows(m, 0, row);
    // horizontality: x^† u = 0
    row << p.x.conjugate(), Vec3c::Zero();
    push_bilinear_rows(m, 2, row);
    // horizontality: y^† v = 0
    row << Vec3c::Zero(), p.y.conjugate();
    push_bilinear_rows(m, 4, row);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    std::array<AmbientTangent, 6> basis;
    for (int k = 0; k < 6; ++k) {
        const Eigen::VectorXd col = svd.matrixV().col(6 + k);
        Vec3c u, v;
        for (int i = 0; i < 3; ++i) {
            u(i) = cplx(col(i), col(6 + i));
            v(i) = cplx(col(3 + i), col(9 + i));
        }
        basis[k] = AmbientTangent{u, v};
    }
    return basis;
}

std::array<AmbientTangent, 8> product_tangent_basis(const AmbientPoint& p) {
    std::array<AmbientTangent, 8> basis;
    int n = 0;
    for (int block = 0; block < 2; ++block) {
        const Vec3c& z = block == 0 ? p.x : p.y;
        // orthonormal complement of z via Householder QR of [z | e_a | e_b]
        int imax = 0;
        z.cwiseAbs().maxCoeff(&imax);
        Mat3c cols = Mat3c::Zero();
        cols.col(0) = z;
        cols((imax + 1) % 3, 1) = 1.0;
        cols((imax + 2) % 3, 2) = 1.0;
        const Mat3c q = Eigen::HouseholderQR<Mat3c>(cols).householderQ();
        for (int c = 1; c < 3; ++c) {
            for (const cplx mult : {cplx(1, 0), cplx(0, 1)}) {
                AmbientTangent t;
                (block == 0 ? t.dx : t.dy) = mult * q.col(c);
                basis[n++] = t;
            }
        }
    }
    return basis;
}

ChartFrame chart_frame(const FlagPoint& p) {
    int xi = 0, yj = 0;
    p.x.cwiseAbs().maxCoeff(&xi);
    p.y.cwiseAbs().maxCoeff(&yj);
    int yk = -1;
    double best = -1.0;
    for (int k = 0; k < 3; ++k) {
        if (k == yj) continue;
        if (std::abs(p.x(k)) > best) {
            best = std::abs(p.x(k));
            yk = k;
        }
    }
    return chart_frame_at(p, xi, yj, yk);
}

ChartFrame chart_frame_at(const FlagPoint& p, int xi, int yj, int yk) {
    if (yk == yj) throw DegenerateChart("eliminated index equals the y-chart index");
    if (std::abs(p.x(xi)) < 1e-10 || std::abs(p.y(yj)) < 1e-10 || std::abs(p.x(yk)) < 1e-10)
        throw DegenerateChart("chart pivot coordinate below 1e-10");
    ChartFrame c;
    c.xi = xi;
    c.yj = yj;
    c.yk = yk;
    int n = 0;
    for (int a = 0; a < 3; ++a)
        if (a != xi) c.xfree[n++] = a;
    for (int a = 0; a < 3; ++a)
        if (a != yj && a != yk) c.yfree = a;
    c.local[0] = p.x(c.xfree[0]) / p.x(xi);
    c.local[1] = p.x(c.xfree[1]) / p.x(xi);
    c.local[2] = p.y(c.yfree) / p.y(yj);

    const FlagPoint rep = chart_point(c);
    const auto jac = chart_jacobian(c);
    const AmbientPoint ap(rep);
    std::array<AmbientTangent, 6> dirs;
    for (int m = 0; m < 3; ++m) {
        dirs[2 * m] = jac[m];
        dirs[2 * m + 1] = jac[m].rotated();
    }
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) c.omega(a, b) = omega_pair(ap, dirs[a], dirs[b]);
    return c;
}

FlagPoint chart_point(const ChartFrame& c) {
    Vec3c x = Vec3c::Zero(), y = Vec3c::Zero();
    x(c.xi) = 1.0;
    x(c.xfree[0]) = c.local[0];
    x(c.xfree[1]) = c.local[1];
    y(c.yj) = 1.0;
    y(c.yfree) = c.local[2];
    // hypersurface equation solved for y_k
    y(c.yk) = -(x(c.yj) + x(c.yfree) * c.local[2]) / x(c.yk);
    return FlagPoint{x, y};
}

std::array<AmbientTangent, 3> chart_jacobian(const ChartFrame& c) {
    const FlagPoint rep = chart_point(c);
    const Vec3c& x = rep.x;
    const cplx xk = x(c.yk);
    const cplx num = x(c.yj) + x(c.yfree) * c.local[2];

    std::array<AmbientTangent, 3> jac;
    for (int m = 0; m < 2; ++m) {
        AmbientTangent t;
        t.dx(c.xfree[m]) = 1.0;
        const cplx dnum = t.dx(c.yj) + t.dx(c.yfree) * c.local[2];
        t.dy(c.yk) = -dnum / xk + num * t.dx(c.yk) / (xk * xk);
        jac[m] = t;
    }
    AmbientTangent t;
    t.dy(c.yfree) = 1.0;
    t.dy(c.yk) = -x(c.yfree) / xk;
    jac[2] = t;
    return jac;
}

TangentVector to_chart(const FlagPoint& p, const ChartFrame& c, const AmbientTangent& t) {
    TangentVector tv;
    tv.xi = c.xi;
    tv.yj = c.yj;
    tv.yk = c.yk;
    const cplx xi = p.x(c.xi), yj = p.y(c.yj);
    const cplx d0 = (t.dx(c.xfree[0]) * xi - p.x(c.xfree[0]) * t.dx(c.xi)) / (xi * xi);
    const cplx d1 = (t.dx(c.xfree[1]) * xi - p.x(c.xfree[1]) * t.dx(c.xi)) / (xi * xi);
    const cplx d2 = (t.dy(c.yfree) * yj - p.y(c.yfree) * t.dy(c.yj)) / (yj * yj);
    tv.comps << d0.real(), d0.imag(), d1.real(), d1.imag(), d2.real(), d2.imag();
    return tv;
}

AmbientTangent from_chart(const FlagPoint& p, const ChartFrame& c, const TangentVector& t) {
    const cplx z0(t.comps(0), t.comps(1));
    const cplx z1(t.comps(2), t.comps(3));
    const cplx z2(t.comps(4), t.comps(5));
    // affine velocities at the chart representative
    Vec3c dxr = Vec3c::Zero(), dyr = Vec3c::Zero();
    dxr(c.xfree[0]) = z0;
    dxr(c.xfree[1]) = z1;
    dyr(c.yfree) = z2;
    const Vec3c xr = p.x / p.x(c.xi);
    const cplx xk = xr(c.yk);
    const cplx num = xr(c.yj) + xr(c.yfree) * (p.y(c.yfree) / p.y(c.yj));
    dyr(c.yk) = -(dxr(c.yj) + dxr(c.yfree) * (p.y(c.yfree) / p.y(c.yj)) +
                  xr(c.yfree) * z2) / xk +
                num * dxr(c.yk) / (xk * xk);
    return AmbientTangent{p.x(c.xi) * dxr, p.y(c.yj) * dyr};
}

double chart_distance(const FlagPoint& p, const FlagPoint& q) {
    const ChartFrame c = chart_frame(p);
    const cplx qxi = q.x(c.xi), qyj = q.y(c.yj);
    if (std::abs(qxi) < 1e-12 || std::abs(qyj) < 1e-12)
        return 1e6;  // q outside the chart; report "far"
    const cplx d0 = q.x(c.xfree[0]) / qxi - c.local[0];
    const cplx d1 = q.x(c.xfree[1]) / qxi - c.local[1];
    const cplx d2 = q.y(c.yfree) / qyj - c.local[2];
    return std::sqrt(std::norm(d0) + std::norm(d1) + std::norm(d2));
}

FlagPoint random_flag(Rng& rng) {
    const Vec3c x = canonicalize3(rng.cnormal3());
    Vec3c y = rng.cnormal3();
    const Vec3c u = x.conjugate();  // sum x_i y_i = 0 means y ⟂ conj(x)
    y -= u * (u.dot(y) / u.squaredNorm());
    return FlagPoint{x, canonicalize3(y)};
}

AmbientPoint random_ambient(Rng& rng) {
    return AmbientPoint{canonicalize3(rng.cnormal3()), canonicalize3(rng.cnormal3())};
}

ProjectivePoint random_projective(Rng& rng, int dim) {
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = rng.cnormal();
    return normalize(v);
}

}  // namespace pseudotor
