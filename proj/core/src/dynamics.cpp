#include "pseudotor/dynamics.hpp"

#include <cmath>

#include "pseudotor/errors.hpp"

namespace pseudotor {

SymbolFunction SymbolFunction::pair(const Mat3c& mx, const Mat3c& my, Domain d) {
    if ((mx - mx.adjoint()).norm() > 1e-14 || (my - my.adjoint()).norm() > 1e-14)
        throw DomainMismatch("symbol matrices must be Hermitian");
    SymbolFunction f;
    f.mx = mx;
    f.my = my;
    f.domain = d;
    return f;
}

SymbolFunction SymbolFunction::diag_pair(const std::array<double, 3>& lx,
                                         const std::array<double, 3>& ly, Domain d) {
    Mat3c mx = Mat3c::Zero(), my = Mat3c::Zero();
    for (int i = 0; i < 3; ++i) {
        mx(i, i) = lx[i];
        my(i, i) = ly[i];
    }
    return pair(mx, my, d);
}

SymbolFunction SymbolFunction::x_only(const Mat3c& m, Domain d) {
    SymbolFunction f = pair(m, Mat3c::Zero(), d);
    f.has_y = false;
    return f;
}

bool SymbolFunction::balanced(double tol) const {
    if (!has_x || !has_y) return false;
    const Mat3c s = mx + my.transpose();
    const cplx sigma = s.trace() / 3.0;
    return (s - sigma * Mat3c::Identity()).norm() <= tol;
}

IntegralPair make_default_integrals() {
    return IntegralPair{SymbolFunction::diag_pair({0, 1, 2}, {2, 1, 0}),
                        SymbolFunction::diag_pair({0, 1, 3}, {3, 2, 0})};
}

IntegralPair integrals_from(const RunConfig& cfg) {
    return IntegralPair{SymbolFunction::diag_pair(cfg.f1_lambda_x, cfg.f1_lambda_y),
                        SymbolFunction::diag_pair(cfg.f2_lambda_x, cfg.f2_lambda_y)};
}

double sym_value(const Mat3c& A, const Vec3c& z) {
    return std::real(z.dot(A * z)) / z.squaredNorm();
}

double sym_diff(const Mat3c& A, const Vec3c& z_unit, const Vec3c& u) {
    const double f = std::real(z_unit.dot(A * z_unit));
    return 2.0 * std::real(u.dot(A * z_unit - f * z_unit));
}

Vec3c sym_field(const Mat3c& A, const Vec3c& z_unit) {
    const double f = std::real(z_unit.dot(A * z_unit));
    return cplx(0, -2) * (A * z_unit - f * z_unit);
}

Mat3c herm_exp(const Mat3c& A, cplx factor) {
    Eigen::SelfAdjointEigenSolver<Mat3c> es(A);
    Vec3c d;
    for (int i = 0; i < 3; ++i) d(i) = std::exp(factor * es.eigenvalues()(i));
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

double eval_symbol(const SymbolFunction& f, const AmbientPoint& p) {
    double v = 0.0;
    if (f.has_x) v += sym_value(f.mx, p.x);
    if (f.has_y) v += sym_value(f.my, p.y);
    return v;
}

double eval_symbol(const SymbolFunction& f, const FlagPoint& p) {
    if (f.domain != Domain::Flag && f.domain != Domain::Ambient)
        throw DomainMismatch("symbol not defined on the flag variety");
    return eval_symbol(f, AmbientPoint(p));
}

double eval_symbol(const SymbolFunction& f, const ProjectivePoint& p) {
    if (f.domain != Domain::BaseCP2w && f.domain != Domain::BaseCP1w)
        throw DomainMismatch("symbol not defined on a base projective space");
    if (p.dim() != 3 || f.has_y) throw DomainMismatch("base symbols act on single 3-vectors");
    return sym_value(f.mx, Vec3c(p.coords));
}

double symbol_differential(const SymbolFunction& f, const AmbientPoint& p,
                           const AmbientTangent& t) {
    double v = 0.0;
    if (f.has_x) v += sym_diff(f.mx, p.x.normalized(), t.dx / p.x.norm());
    if (f.has_y) v += sym_diff(f.my, p.y.normalized(), t.dy / p.y.norm());
    return v;
}

AmbientTangent ham_field(const SymbolFunction& f, const AmbientPoint& p) {
    AmbientTangent t;
    if (f.has_x) t.dx = sym_field(f.mx, p.x.normalized());
    if (f.has_y) t.dy = sym_field(f.my, p.y.normalized());
    return t;
}

AmbientTangent ham_field(const SymbolFunction& f, const FlagPoint& p) {
    return ham_field(f, AmbientPoint(p));
}

double poisson(const SymbolFunction& f, const SymbolFunction& g, const FlagPoint& p) {
    return omega_pair(AmbientPoint(p), ham_field(f, p), ham_field(g, p));
}

namespace {

template <std::size_t N>
AmbientTangent solve_hamiltonian(const AmbientPoint& p, const DiffFn& df,
                                 const std::array<AmbientTangent, N>& basis) {
    Eigen::Matrix<double, N, N> om;
    Eigen::Matrix<double, N, 1> g;
    for (std::size_t a = 0; a < N; ++a) {
        g(a) = df(basis[a]);
        for (std::size_t b = 0; b < N; ++b) om(a, b) = omega_pair(p, basis[a], basis[b]);
    }
    // omega(X, e_b) = g_b with X = sum_a c_a e_a  =>  om^T c = g
    const Eigen::Matrix<double, N, 1> c = om.transpose().fullPivLu().solve(g);
    AmbientTangent x;
    for (std::size_t a = 0; a < N; ++a) x = x + basis[a] * c(a);
    return x;
}

}  // namespace

AmbientTangent ham_from_differential_flag(const FlagPoint& p, const DiffFn& df,
                                          const Vec3c& cvec) {
    return solve_hamiltonian(AmbientPoint(p), df, flag_tangent_basis(p, cvec));
}

AmbientTangent ham_from_differential_ambient(const AmbientPoint& p, const DiffFn& df) {
    return solve_hamiltonian(p, df, product_tangent_basis(p));
}

// ---- Dormand-Prince 4(5) ----

namespace {

using State = Eigen::Matrix<double, 12, 1>;

State pack(const AmbientPoint& p) {
    State s;
    for (int i = 0; i < 3; ++i) {
        s(i) = p.x(i).real();
        s(3 + i) = p.y(i).real();
        s(6 + i) = p.x(i).imag();
        s(9 + i) = p.y(i).imag();
    }
    return s;
}

AmbientPoint unpack(const State& s) {
    AmbientPoint p;
    for (int i = 0; i < 3; ++i) {
        p.x(i) = cplx(s(i), s(6 + i));
        p.y(i) = cplx(s(3 + i), s(9 + i));
    }
    return p;
}

}  // namespace

AmbientPoint flow_field(const FieldFn& field, const AmbientPoint& start, double time,
                        const FlowOptions& opt, FlowMonitor* mon, const FlowObserver* observer) {
    // Dormand-Prince coefficients
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double dir = time >= 0 ? 1.0 : -1.0;
    const double total = std::abs(time);
    if (total == 0.0) return start;

    auto deriv = [&](const State& s) -> State {
        AmbientPoint p = unpack(s);
        const double nx = p.x.norm(), ny = p.y.norm();
        p.x /= nx;
        p.y /= ny;
        const AmbientTangent t = field(p);
        AmbientPoint v(nx * t.dx * dir, ny * t.dy * dir);
        return pack(v);
    };

    State s = pack(start);
    double t = 0.0;
    double h = std::min(total, 1e-2);
    int steps = 0;

    State k1 = deriv(s);
    while (t < total) {
        if (++steps > opt.max_steps)
            throw NoConvergence("flow exceeded the step budget");
        h = std::min(h, total - t);
        const State k2 = deriv(s + h * (a21 * k1));
        const State k3 = deriv(s + h * (a31 * k1 + a32 * k2));
        const State k4 = deriv(s + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const State k5 = deriv(s + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const State k6 = deriv(s + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const State snew = s + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const State k7 = deriv(snew);
        const State err_vec =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = err_vec.norm() / std::max(1.0, s.norm());

        if (err <= opt.tol) {
            t += h;
            AmbientPoint p = unpack(snew);
            p.x.normalize();
            p.y.normalize();
            if (opt.reproject) {
                const FlagPoint fp = project_to_flag(p.x, p.y, 1e-13, opt.cvec);
                p.x = fp.x;
                p.y = fp.y;
            }
            if (mon) {
                mon->max_constraint_residual = std::max(
                    mon->max_constraint_residual, constraint_residual(p.x, p.y, opt.cvec));
                mon->min_step = std::min(mon->min_step, h);
                mon->steps = steps;
            }
            if (observer && !(*observer)(dir * t, p)) return p;
            s = pack(p);
            k1 = deriv(s);
        }
        const double shrink =
            err > 0 ? 0.9 * std::pow(opt.tol / err, 0.2) : 5.0;
        h *= std::clamp(shrink, 0.2, 5.0);
        if (h < 1e-12 && t < total)
            throw StepCollapse("adaptive step fell below 1e-12 at t = " + std::to_string(t));
    }
    AmbientPoint p = unpack(s);
    p.x.normalize();
    p.y.normalize();
    return p;
}

SymbolFlowResult flow(const SymbolFunction& f, const FlagPoint& p, double time, double tol,
                      int path_samples) {
    if (std::abs(time) >= 1e3) throw UsageError("flow time must satisfy |t| < 1e3");
    SymbolFlowResult res;
    const double f0 = eval_symbol(f, p);
    FlowOptions opt;
    opt.tol = tol;
    opt.reproject = f.balanced(1e-12);
    FieldFn field = [&](const AmbientPoint& q) { return ham_field(f, q); };

    const double sample_dt =
        path_samples > 0 ? std::abs(time) / path_samples : std::numeric_limits<double>::infinity();
    double next_sample = sample_dt;
    FlowObserver obs = [&](double t, const AmbientPoint& q) {
        res.monitor.max_value_drift =
            std::max(res.monitor.max_value_drift, std::abs(eval_symbol(f, q) - f0));
        while (path_samples > 0 && std::abs(t) >= next_sample - 1e-15) {
            res.path.push_back(FlagPoint{canonicalize3(q.x), canonicalize3(q.y)});
            next_sample += sample_dt;
        }
        return true;
    };
    const AmbientPoint end = flow_field(field, AmbientPoint(p), time, opt, &res.monitor, &obs);
    res.end = FlagPoint{canonicalize3(end.x), canonicalize3(end.y)};
    return res;
}

AmbientPoint symbol_transport(const SymbolFunction& f, const AmbientPoint& p, double t) {
    AmbientPoint q = p;
    if (f.has_x) q.x = canonicalize3(herm_exp(f.mx, cplx(0, -2 * t)) * p.x);
    if (f.has_y) q.y = canonicalize3(herm_exp(f.my, cplx(0, -2 * t)) * p.y);
    return q;
}

AmbientPoint gradient_transport(const SymbolFunction& f, const AmbientPoint& p, double t) {
    AmbientPoint q = p;
    if (f.has_x) q.x = canonicalize3(herm_exp(f.mx, cplx(2 * t, 0)) * p.x);
    if (f.has_y) q.y = canonicalize3(herm_exp(f.my, cplx(2 * t, 0)) * p.y);
    return q;
}

}  // namespace pseudotor
