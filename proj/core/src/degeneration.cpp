#include "pseudotor/degeneration.hpp"

#include <cmath>

#include "pseudotor/errors.hpp"
#include "pseudotor/parallel.hpp"

namespace pseudotor {

double ft_residual(const Vec3c& x, const Vec3c& y, cplx t) {
    return constraint_residual(x, y, ft_cvec(t));
}

FlagPoint ft_project(const Vec3c& x, const Vec3c& y, cplx t) {
    return project_to_flag(x, y, 1e-12, ft_cvec(t));
}

const LineModel& limit_line() {
    static const LineModel lm = make_line(Eigen::Vector3d(0.0, 1.0, 1.0));
    return lm;
}

FiberClass psi0_classify(const ProjectivePoint& w, double tol) {
    if (w.dim() != 3) throw DomainMismatch("expected a CP^2_w point");
    if (std::abs(w.coords(1) + w.coords(2)) / w.coords.norm() > tol)
        throw DomainMismatch("point does not lie on the limit line l0");
    return classify_fiber_point(w, tol);
}

BaseMorseFunction toric_h0() {
    const Vec3c a(1.0, 0.0, 0.0);
    const Vec3c b(0.0, 1.0, -1.0);
    return make_height(a, b, BaseMorseFunction::Mode::Symbol, limit_line());
}

std::pair<SymbolFunction, SymbolFunction> default_diagonal_moments() {
    Mat3c h1 = Mat3c::Zero(), h2 = Mat3c::Zero();
    h1.diagonal() << 0.0, 1.0, 2.0;
    h2.diagonal() << 0.0, 2.0, 1.0;
    return {SymbolFunction::x_only(h1, Domain::BaseCP2w),
            SymbolFunction::x_only(h2, Domain::BaseCP2w)};
}

int cp2_rank(const SymbolFunction& h1, const SymbolFunction& h2, const Vec3c& w,
             double threshold) {
    const Vec3c wu = w.normalized();
    // orthonormal complex basis of the horizontal space at wu
    int jmin = 0;
    wu.cwiseAbs().minCoeff(&jmin);
    Vec3c u1 = Vec3c::Unit(jmin) - wu * wu(jmin);
    u1 = herm_project(wu, u1).normalized();
    Vec3c u2 = herm_project(wu, Vec3c::Unit((jmin + 1) % 3));
    u2 = (u2 - u1 * u1.dot(u2)).normalized();

    const Vec3c f1 = sym_field(h1.mx, wu);
    const Vec3c f2 = sym_field(h2.mx, wu);
    Eigen::Matrix<double, 4, 2> m;
    int col = 0;
    for (const Vec3c* f : {&f1, &f2}) {
        m(0, col) = std::real(u1.dot(*f));
        m(1, col) = std::real((cplx(0, 1) * u1).dot(*f));
        m(2, col) = std::real(u2.dot(*f));
        m(3, col) = std::real((cplx(0, 1) * u2).dot(*f));
        ++col;
    }
    const Eigen::Vector2d sv = Eigen::JacobiSVD<Eigen::Matrix<double, 4, 2>>(m).singularValues();
    int rank = 0;
    for (int i = 0; i < 2; ++i)
        if (sv(i) > threshold) ++rank;
    return rank;
}

DiagonalMomentReport diagonal_moment_check(const SymbolFunction& h1, const SymbolFunction& h2,
                                           Rng& rng, int n) {
    for (const SymbolFunction* h : {&h1, &h2}) {
        if ((h->mx - Mat3c(h->mx.diagonal().asDiagonal())).norm() > 1e-14)
            throw DomainMismatch("moment functions must be diagonal");
        const auto d = h->mx.diagonal();
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (std::abs(d(i) - d(j)) < 1e-12)
                    throw DomainMismatch("moment eigenvalues must be distinct");
    }
    // the pair must separate directions: the eigenvalue difference vectors
    // of h1 and h2 must be independent
    Eigen::Matrix2d dep;
    dep << std::real(h1.mx(1, 1) - h1.mx(0, 0)), std::real(h1.mx(2, 2) - h1.mx(0, 0)),
        std::real(h2.mx(1, 1) - h2.mx(0, 0)), std::real(h2.mx(2, 2) - h2.mx(0, 0));
    if (std::abs(dep.determinant()) < 1e-12)
        throw DomainMismatch("moment pair is functionally dependent");

    DiagonalMomentReport rep;
    rep.n = n;
    for (int s = 0; s < n; ++s) {
        Vec3c raw = rng.cnormal3();
        // generic draws miss the coordinate lines with probability one, so
        // place every eighth probe on a line to exercise the rank drop
        if (s % 8 == 0) raw(s / 8 % 3) = 0.0;
        const Vec3c w = canonicalize3(raw);
        if (cp2_rank(h1, h2, w) < 2) {
            ++rep.rank_drops;
            const double line_dist = w.cwiseAbs().minCoeff();
            rep.max_drop_line_distance = std::max(rep.max_drop_line_distance, line_dist);
            if (line_dist > 1e-2) rep.no_false_positives = false;
        }
    }
    return rep;
}

bool f0_boundary_components_ok(Rng& rng, int n) {
    const Vec3c cvec = ft_cvec(0.0);
    for (int trial = 0; trial < n; ++trial) {
        // one construction per component, labels (i, x/y)
        for (int i = 0; i < 3; ++i) {
            for (int pattern = 0; pattern < 2; ++pattern) {
                Vec3c x = rng.cnormal3(), y = rng.cnormal3();
                const cplx s = rng.cnormal();
                switch (i) {
                    case 0:
                        if (pattern == 0)
                            x(0) = 0.0;
                        else
                            y(0) = 0.0;
                        y(1) = x(2) * s;
                        y(2) = -x(1) * s;
                        break;
                    case 1:
                        if (pattern == 0) {
                            x(1) = 0.0;
                            y(2) = 0.0;
                        } else {
                            y(1) = 0.0;
                            x(2) = 0.0;
                        }
                        break;
                    case 2:
                        if (pattern == 0) {
                            x(2) = 0.0;
                            y(1) = 0.0;
                        } else {
                            y(2) = 0.0;
                            x(1) = 0.0;
                        }
                        break;
                }
                if (constraint_residual(x, y, cvec) > 1e-12) return false;
                // labeled coordinate vanishes, hence w_i = 0 on the component
                const cplx wi = x(i) * y(i);
                if (std::abs(wi) / (x.norm() * y.norm()) > 1e-12) return false;
                // genericity: the vanishing pattern is exactly the label
                const double small = pattern == 0 ? std::abs(x(i)) : std::abs(y(i));
                const double other = pattern == 0 ? std::abs(y(i)) : std::abs(x(i));
                if (small > 1e-12 || other < 1e-8) return false;
            }
        }
    }
    return true;
}

RotationPlan make_g() {
    RotationPlan plan;
    const Eigen::Vector3d n1 = Eigen::Vector3d::Ones().normalized();
    const Eigen::Vector3d n0 = Eigen::Vector3d(0.0, 1.0, 1.0).normalized();
    Eigen::Vector3d n2 = n0 - n0.dot(n1) * n1;
    n2.normalize();
    const Eigen::Matrix3d j = n2 * n1.transpose() - n1 * n2.transpose();
    const Mat3c hg = cplx(0, 1) * j.cast<cplx>();
    plan.g = SymbolFunction::x_only(hg, Domain::BaseCP2w);
    plan.T = std::acos(n1.dot(n0)) / 2.0;
    plan.from = make_line(n1);
    plan.to = make_line(n0);
    return plan;
}

Vec3c RotationPlan::transport(const Vec3c& w, double t) const {
    return herm_exp(g.mx, cplx(0, -2.0 * t)) * w;
}

namespace {

double smoothstep5(double s) {
    return s * s * s * (s * (6.0 * s - 15.0) + 10.0);
}

double smoothstep5_d(double s) {
    return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

}  // namespace

CutoffHamiltonian::CutoffHamiltonian(const SymbolFunction& g, double r1, double r2)
    : g_(g), r1_(r1), r2_(r2) {
    if (!(r1 > r2 && r2 > 0.0)) throw DomainMismatch("cutoff radii must satisfy r1 > r2 > 0");
}

CutoffHamiltonian cutoff_G(const SymbolFunction& g, double r1, double r2) {
    return CutoffHamiltonian(g, r1, r2);
}

double CutoffHamiltonian::value(const AmbientPoint& p) const {
    const double d = distance_to_delta(p);
    if (d <= r2_) return 0.0;
    const double gval = sym_value(g_.mx, psi_raw(p).normalized());
    if (d >= r1_) return gval;
    return smoothstep5((d - r2_) / (r1_ - r2_)) * gval;
}

AmbientTangent CutoffHamiltonian::field(const AmbientPoint& p) const {
    const double d = distance_to_delta(p);
    if (d <= r2_) return AmbientTangent{};
    const AmbientPoint pn(p.x.normalized(), p.y.normalized());
    const Vec3c w_unit = psi_raw(pn).normalized();
    const double gval = sym_value(g_.mx, w_unit);
    double s = 1.0, ds = 0.0;
    if (d < r1_) {
        s = smoothstep5((d - r2_) / (r1_ - r2_));
        ds = smoothstep5_d((d - r2_) / (r1_ - r2_)) / (r1_ - r2_);
    }
    const DiffFn df = [&](const AmbientTangent& t) {
        double out = s * sym_diff(g_.mx, w_unit, d_psi(pn, t));
        if (ds != 0.0) {
            const double eps = 1e-6;
            const AmbientPoint pp(pn.x + eps * t.dx, pn.y + eps * t.dy);
            const AmbientPoint pm(pn.x - eps * t.dx, pn.y - eps * t.dy);
            const double dd = (distance_to_delta(pp) - distance_to_delta(pm)) / (2.0 * eps);
            out += gval * ds * dd;
        }
        return out;
    };
    return ham_from_differential_ambient(pn, df);
}

IsotopyReport isotopy_transport(const CutoffHamiltonian& g, double T,
                                const std::vector<FlagPoint>& cloud,
                                const IntegralPair& integrals) {
    IsotopyReport rep;
    rep.points.resize(cloud.size());
    const FieldFn field = [&](const AmbientPoint& q) { return g.field(q); };
    std::vector<char> breached(cloud.size(), 0);

    parallel_for(cloud.size(), [&](std::size_t idx) {
        const FlagPoint& p0 = cloud[idx];
        IsotopyPointReport& pr = rep.points[idx];
        pr.min_delta_distance = distance_to_delta(AmbientPoint(p0));

        FlowOptions opt;
        opt.tol = 1e-10;
        double dmin = pr.min_delta_distance;
        const FlowObserver obs = [&](double, const AmbientPoint& q) {
            dmin = std::min(dmin, distance_to_delta(q));
            return dmin >= g.r2();
        };
        auto run = [&](const AmbientPoint& start) {
            return flow_field(field, start, T, opt, nullptr, &obs);
        };
        const AmbientPoint q = run(AmbientPoint(p0));
        pr.min_delta_distance = dmin;
        if (dmin < g.r2()) {
            breached[idx] = 1;
            return;
        }
        pr.end = q;
        pr.f0_residual = ft_residual(q.x, q.y, 0.0);
        pr.f1_drift = std::abs(eval_symbol(integrals.F1, q) - eval_symbol(integrals.F1, AmbientPoint(p0)));
        pr.f2_drift = std::abs(eval_symbol(integrals.F2, q) - eval_symbol(integrals.F2, AmbientPoint(p0)));
        pr.line_residual = limit_line().off_line_residual(psi_raw(q));

        // symplectomorphism check on finite-difference-transported frames
        const auto basis = flag_tangent_basis(p0);
        const double eps = 1e-5;
        std::array<AmbientTangent, 3> pushed;
        for (int a = 0; a < 3; ++a) {
            const AmbientTangent& v = basis[a];
            const AmbientPoint qp =
                run(AmbientPoint((p0.x + eps * v.dx).normalized(), (p0.y + eps * v.dy).normalized()));
            const AmbientPoint qm =
                run(AmbientPoint((p0.x - eps * v.dx).normalized(), (p0.y - eps * v.dy).normalized()));
            pushed[a] = AmbientTangent((qp.x - qm.x) / (2.0 * eps), (qp.y - qm.y) / (2.0 * eps));
        }
        if (dmin < g.r2()) {
            breached[idx] = 1;
            return;
        }
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const double before = omega_pair(AmbientPoint(p0), basis[a], basis[b]);
                const double after = omega_pair(q, pushed[a], pushed[b]);
                pr.omega_drift = std::max(pr.omega_drift, std::abs(after - before));
            }
    });

    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (breached[i])
            throw EnteredCollar("trajectory " + std::to_string(i) +
                                " entered the inner cutoff neighborhood");
    for (const auto& pr : rep.points) {
        rep.max_f0_residual = std::max(rep.max_f0_residual, pr.f0_residual);
        rep.max_value_drift = std::max({rep.max_value_drift, pr.f1_drift, pr.f2_drift});
        rep.max_line_residual = std::max(rep.max_line_residual, pr.line_residual);
        rep.min_line_residual = std::min(rep.min_line_residual, pr.line_residual);
        rep.max_omega_drift = std::max(rep.max_omega_drift, pr.omega_drift);
    }
    return rep;
}

}  // namespace pseudotor
