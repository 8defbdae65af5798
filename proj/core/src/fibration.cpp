#include "pseudotor/fibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pseudotor/errors.hpp"
#include "pseudotor/parallel.hpp"

namespace pseudotor {

namespace {

cplx det2(const Vec2c& u, const Vec2c& v) {
    return u(0) * v(1) - u(1) * v(0);
}

Vec2c perp(const Vec2c& z) {
    return Vec2c(-std::conj(z(1)), std::conj(z(0)));
}

double flag_pair_distance(const FlagPoint& p, const FlagPoint& q) {
    const double dx = proj_distance(p.x, q.x);
    const double dy = proj_distance(p.y, q.y);
    return std::sqrt(dx * dx + dy * dy);
}

std::array<double, 3> diag_of(const Mat3c& m) {
    if ((m - Mat3c(m.diagonal().asDiagonal())).norm() > 1e-14)
        throw DomainMismatch("operation requires diagonal integral symbols");
    return {std::real(m(0, 0)), std::real(m(1, 1)), std::real(m(2, 2))};
}

}  // namespace

// ---- BaseMorseFunction ----

BaseMorseFunction make_height(const Vec3c& a, const Vec3c& b, BaseMorseFunction::Mode mode,
                              const LineModel& lm) {
    BaseMorseFunction h;
    h.mode_ = mode;
    h.lm_ = lm;
    h.a_ = canonicalize3(a);
    Vec3c bb = canonicalize3(b);
    if (lm.off_line_residual(h.a_) > 1e-8 || lm.off_line_residual(bb) > 1e-8)
        throw DomainMismatch("critical points must lie on the base line");
    if (proj_distance(h.a_, bb) < 1e-9)
        throw DegeneratePair("max and min points coincide");

    Vec2c za = lm.to_line(h.a_);
    za /= za.norm();
    Vec2c zb = lm.to_line(bb);
    zb /= zb.norm();

    if (mode == BaseMorseFunction::Mode::Symbol) {
        h.warned_ = std::abs(za.dot(zb)) > 1e-9;
        zb = perp(za);
        bb = canonicalize3(lm.from_line(zb));
        h.h2_ = 2.0 * (za * za.adjoint()) - Mat2c::Identity();
    }
    h.b_ = bb;
    h.za_ = za;
    h.zb_ = zb;
    return h;
}

BaseMorseFunction height_from(const RunConfig& cfg) {
    Vec3c a, b;
    for (int i = 0; i < 3; ++i) {
        a(i) = cfg.h_max_point[i];
        b(i) = cfg.h_min_point[i];
    }
    const auto mode = cfg.h_mode == "symbol" ? BaseMorseFunction::Mode::Symbol
                                             : BaseMorseFunction::Mode::Mobius;
    return make_height(a, b, mode);
}

double BaseMorseFunction::value(const Vec3c& w_unit) const {
    const Vec2c z = lm_.to_line(w_unit);
    if (mode_ == Mode::Symbol)
        return std::real(z.dot(h2_ * z)) / z.squaredNorm();
    const double da = std::norm(det2(z, za_));
    const double db = std::norm(det2(z, zb_));
    return (db - da) / (db + da);
}

double BaseMorseFunction::diff(const Vec3c& w_unit, const Vec3c& dw) const {
    Vec2c z = lm_.to_line(w_unit);
    const double nz = z.norm();
    if (mode_ == Mode::Symbol) {
        z /= nz;
        Vec2c dz = lm_.to_line(dw) / nz;
        dz -= z * z.dot(dz);
        const double f = std::real(z.dot(h2_ * z));
        return 2.0 * std::real(dz.dot(h2_ * z - f * z));
    }
    const Vec2c dz = lm_.to_line(dw);
    const cplx da = det2(z, za_), db = det2(z, zb_);
    const double A = std::norm(da), B = std::norm(db);
    const double dA = 2.0 * std::real(std::conj(da) * det2(dz, za_));
    const double dB = 2.0 * std::real(std::conj(db) * det2(dz, zb_));
    const double s = A + B;
    return 2.0 * (A * dB - B * dA) / (s * s);
}

Vec3c BaseMorseFunction::field(const Vec3c& w_unit) const {
    Vec2c z = lm_.to_line(w_unit);
    z /= z.norm();
    if (mode_ == Mode::Symbol) {
        const double f = std::real(z.dot(h2_ * z));
        return lm_.from_line(cplx(0, -2) * (h2_ * z - f * z));
    }
    // solve omega(X, .) = dh(.) on the 2-real-dim horizontal space at z
    const Vec2c v0 = perp(z);
    const Vec3c w0 = lm_.from_line(v0);
    const Vec3c w1 = lm_.from_line(cplx(0, 1) * v0);
    const double d0 = diff(w_unit, w0);
    const double d1 = diff(w_unit, w1);
    return lm_.from_line(d1 * v0 - d0 * (cplx(0, 1) * v0));
}

// ---- loops ----

LevelLoop trace_loop(const BaseMorseFunction& h, double level, int n) {
    if (!(level > h.hmin() + 1e-12 && level < h.hmax() - 1e-12))
        throw LevelOutOfRange("level " + std::to_string(level) +
                              " is not strictly between min and max of h");
    LevelLoop loop;
    loop.h_level = level;
    loop.samples.reserve(n);
    const LineModel& lm = h.line();
    if (h.mode() == BaseMorseFunction::Mode::Mobius) {
        Vec2c za = lm.to_line(h.max_point());
        za /= za.norm();
        Vec2c zb = lm.to_line(h.min_point());
        zb /= zb.norm();
        const double rho = std::sqrt((1.0 - level) / (1.0 + level));
        for (int k = 0; k < n; ++k) {
            const cplx m = rho * std::exp(cplx(0, 2.0 * M_PI * k / n));
            loop.samples.push_back(canonicalize3(lm.from_line(za - m * zb)));
        }
    } else {
        Vec2c za = lm.to_line(h.max_point());
        za /= za.norm();
        const Vec2c zb = perp(za);
        const double mu = (level + 1.0) / 2.0;  // eigenvalues are -1 and +1
        for (int k = 0; k < n; ++k) {
            const cplx ph = std::exp(cplx(0, 2.0 * M_PI * k / n));
            loop.samples.push_back(
                canonicalize3(lm.from_line(std::sqrt(mu) * za + std::sqrt(1.0 - mu) * ph * zb)));
        }
    }
    loop.closed = true;
    return loop;
}

double loop_distance(const BaseMorseFunction& h, double level, const Vec3c& w) {
    const LineModel& lm = h.line();
    Vec2c z = lm.to_line(w);
    z /= z.norm();
    Vec2c za = lm.to_line(h.max_point());
    za /= za.norm();
    if (h.mode() == BaseMorseFunction::Mode::Mobius) {
        Vec2c zb = lm.to_line(h.min_point());
        zb /= zb.norm();
        const double rho = std::sqrt((1.0 - level) / (1.0 + level));
        const cplx m = det2(z, za) / det2(z, zb);
        return std::abs(std::abs(m) - rho) / (1.0 + std::norm(m));
    }
    const double mu = (level + 1.0) / 2.0;
    return std::abs(std::norm(za.dot(z)) - mu);
}

std::array<Vec3c, 3> singular_base_points(const LineModel& lm) {
    std::array<Vec3c, 3> pts;
    for (int i = 0; i < 3; ++i) {
        const Vec2c row(lm.plane(i, 0), lm.plane(i, 1));
        const Vec2c zeta(-row(1), row(0));
        pts[i] = canonicalize3(lm.from_line(zeta));
    }
    return pts;
}

// ---- seed finding ----

namespace {

struct ModuliProblem {
    std::array<double, 3> q;  // |w_i|^2 of the canonical base point
    std::array<double, 3> l1x, l1y, l2x, l2y;

    // f values and 2x3 Jacobian at a simplex point u
    void eval(const Eigen::Vector3d& u, Eigen::Vector2d& f, Eigen::Matrix<double, 2, 3>* jac) const {
        const auto part = [&](const std::array<double, 3>& lx, const std::array<double, 3>& ly,
                              int row) {
            double fx = 0.0, su = 0.0;
            double gy = 0.0, sr = 0.0;
            Eigen::Vector3d r = Eigen::Vector3d::Zero();
            for (int i = 0; i < 3; ++i) {
                fx += lx[i] * u(i);
                su += u(i);
                r(i) = q[i] / u(i);
                gy += ly[i] * r(i);
                sr += r(i);
            }
            fx /= su;
            gy /= sr;
            f(row) = fx + gy;
            if (jac) {
                for (int j = 0; j < 3; ++j) {
                    const double dfx = (lx[j] - fx) / su;
                    const double drj = -q[j] / (u(j) * u(j));
                    const double dgy = (ly[j] - gy) * drj / sr;
                    (*jac)(row, j) = dfx + dgy;
                }
            }
        };
        part(l1x, l1y, 0);
        part(l2x, l2y, 1);
    }
};

}  // namespace

FlagPoint seed_point(const Vec3c& w, double c1, double c2, const IntegralPair& integrals,
                     Rng& rng, const LineModel& lm) {
    const Vec3c wc = canonicalize3(w);
    if (lm.off_line_residual(wc) > 1e-8)
        throw DomainMismatch("seed base point must lie on the base line");

    ModuliProblem prob;
    for (int i = 0; i < 3; ++i) prob.q[i] = std::norm(wc(i));
    prob.l1x = diag_of(integrals.F1.mx);
    prob.l1y = diag_of(integrals.F1.my);
    prob.l2x = diag_of(integrals.F2.mx);
    prob.l2y = diag_of(integrals.F2.my);

    const Eigen::Vector2d target(c1, c2);
    const double floor_u = 1e-9;
    const Eigen::Matrix3d proj =
        Eigen::Matrix3d::Identity() - Eigen::Matrix3d::Constant(1.0 / 3.0);

    Eigen::Vector3d best_u = Eigen::Vector3d::Constant(1.0 / 3.0);
    double best_res = std::numeric_limits<double>::infinity();

    for (int start = 0; start < 60; ++start) {
        Eigen::Vector3d u;
        if (start == 0) {
            u = Eigen::Vector3d::Constant(1.0 / 3.0);
        } else {
            for (int i = 0; i < 3; ++i) u(i) = -std::log(std::max(rng.uniform(), 1e-16));
            u /= u.sum();
            u = u.cwiseMax(floor_u);
        }
        Eigen::Vector2d f;
        prob.eval(u, f, nullptr);
        double res = (f - target).norm();
        for (int iter = 0; iter < 120 && res > 1e-13; ++iter) {
            Eigen::Matrix<double, 2, 3> jac;
            prob.eval(u, f, &jac);
            const Eigen::Matrix<double, 2, 3> jp = jac * proj;
            Eigen::JacobiSVD<Eigen::Matrix<double, 2, 3>> svd(
                jp, Eigen::ComputeFullU | Eigen::ComputeFullV);
            svd.setThreshold(1e-12);
            Eigen::Vector3d du = svd.solve(target - f);
            // damped line search staying inside the simplex
            double scale = 1.0;
            bool improved = false;
            for (int halving = 0; halving < 25; ++halving) {
                Eigen::Vector3d cand = u + scale * du;
                cand = cand.cwiseMax(floor_u);
                cand /= cand.sum();
                Eigen::Vector2d fc;
                prob.eval(cand, fc, nullptr);
                const double rc = (fc - target).norm();
                if (rc < res) {
                    u = cand;
                    res = rc;
                    improved = true;
                    break;
                }
                scale *= 0.5;
            }
            if (!improved) break;
        }
        if (res < best_res) {
            best_res = res;
            best_u = u;
        }
        if (best_res < 1e-13) break;
    }

    if (best_res > 1e-10) {
        // report the attained range over a simplex grid
        double f1lo = 1e18, f1hi = -1e18, f2lo = 1e18, f2hi = -1e18;
        const int n = 60;
        for (int a = 1; a < n; ++a) {
            for (int b = 1; a + b < n; ++b) {
                Eigen::Vector3d u(static_cast<double>(a) / n, static_cast<double>(b) / n,
                                  static_cast<double>(n - a - b) / n);
                Eigen::Vector2d f;
                prob.eval(u, f, nullptr);
                f1lo = std::min(f1lo, f(0));
                f1hi = std::max(f1hi, f(0));
                f2lo = std::min(f2lo, f(1));
                f2hi = std::max(f2hi, f(1));
            }
        }
        throw NoSolution("no torus point with (c1, c2) = (" + std::to_string(c1) + ", " +
                         std::to_string(c2) + "); attained ranges f1 in [" +
                         std::to_string(f1lo) + ", " + std::to_string(f1hi) + "], f2 in [" +
                         std::to_string(f2lo) + ", " + std::to_string(f2hi) + "]");
    }

    Vec3c x, y;
    for (int i = 0; i < 3; ++i) {
        x(i) = std::sqrt(best_u(i));
        y(i) = prob.q[i] > 1e-28 ? wc(i) / x(i) : cplx(0.0);
    }
    return FlagPoint{canonicalize3(x), canonicalize3(y)};
}

// ---- torus sampling ----

double first_return_period(const SymbolFunction& f, const FlagPoint& p) {
    const AmbientPoint start(p);
    auto dist = [&](double t) {
        const AmbientPoint q = symbol_transport(f, start, t);
        return flag_pair_distance(FlagPoint{q.x, q.y}, p);
    };
    bool left = false;
    for (double t = 0.02; t < 40.0; t += 0.02) {
        const double d = dist(t);
        if (!left) {
            if (d > 0.1) left = true;
            continue;
        }
        if (d < 1e-2) {
            // ternary search for the local minimum in [t - 0.04, t + 0.04]
            double lo = t - 0.04, hi = t + 0.04;
            for (int it = 0; it < 80; ++it) {
                const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                if (dist(m1) < dist(m2))
                    hi = m2;
                else
                    lo = m1;
            }
            const double tm = 0.5 * (lo + hi);
            if (dist(tm) < 1e-6) return tm;
        }
    }
    throw NoConvergence("no first return of the angular flow within t < 40");
}

namespace {

// Flow of h∘psi_1 from `from` for time dt (adaptive, re-projected).
FlagPoint loop_flow(const BaseMorseFunction& h, const FlagPoint& from, double dt,
                    const Vec3c& cvec = Vec3c::Ones()) {
    FlowOptions opt;
    opt.tol = 1e-11;
    opt.reproject = true;
    opt.cvec = cvec;
    const FieldFn field = [&](const AmbientPoint& q) {
        return pullback_ham_field(h, FlagPoint{q.x, q.y}, cvec);
    };
    const AmbientPoint end = flow_field(field, AmbientPoint(from), dt, opt);
    return FlagPoint{canonicalize3(end.x), canonicalize3(end.y)};
}

// Angular coordinate of a base point along a level loop of h.
double loop_angle(const BaseMorseFunction& h, const Vec3c& w) {
    const LineModel& lm = h.line();
    Vec2c z = lm.to_line(w);
    z /= z.norm();
    Vec2c za = lm.to_line(h.max_point());
    za /= za.norm();
    if (h.mode() == BaseMorseFunction::Mode::Mobius) {
        Vec2c zb = lm.to_line(h.min_point());
        zb /= zb.norm();
        return std::arg(det2(z, za) / det2(z, zb));
    }
    const Vec2c zb(-std::conj(za(1)), std::conj(za(0)));
    return std::arg(zb.dot(z) * std::conj(za.dot(z)));
}

double wrap_pi(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

// First-return time of the base image along the h∘psi flow: the unwrapped
// loop angle of psi accumulates exactly 2*pi.
double loop_return_time(const BaseMorseFunction& h, const FlagPoint& seed,
                        const Vec3c& cvec = Vec3c::Ones()) {
    const double theta0 = loop_angle(h, psi_raw(AmbientPoint(seed)).normalized());
    FlowOptions opt;
    opt.tol = 1e-11;
    opt.reproject = true;
    opt.cvec = cvec;
    const FieldFn field = [&](const AmbientPoint& q) {
        return pullback_ham_field(h, FlagPoint{q.x, q.y}, cvec);
    };
    double theta_prev = theta0, total = 0.0;
    double t_prev = 0.0, t_lo = -1.0, t_hi = -1.0;
    double sgn = 1.0;
    const FlowObserver obs = [&](double t, const AmbientPoint& q) {
        const double th = loop_angle(h, psi_raw(q).normalized());
        total += wrap_pi(th - theta_prev);
        theta_prev = th;
        if (std::abs(total) >= 2.0 * M_PI) {
            t_lo = t_prev;
            t_hi = t;
            sgn = total > 0.0 ? 1.0 : -1.0;
            return false;
        }
        t_prev = t;
        return true;
    };
    flow_field(field, AmbientPoint(seed), 400.0, opt, nullptr, &obs);
    if (t_lo < 0.0) throw NoConvergence("loop transport did not return to the start point");

    // bisect the wrapped angular offset on [t_lo, t_hi]
    FlagPoint p_lo = loop_flow(h, seed, t_lo, cvec);
    for (int it = 0; it < 90 && t_hi - t_lo > 1e-13; ++it) {
        const double tm = 0.5 * (t_lo + t_hi);
        const FlagPoint pm = loop_flow(h, p_lo, tm - t_lo, cvec);
        const double delta =
            wrap_pi(loop_angle(h, psi_raw(AmbientPoint(pm)).normalized()) - theta0);
        if (sgn * delta < 0.0) {
            t_lo = tm;
            p_lo = pm;
        } else {
            t_hi = tm;
        }
    }
    return 0.5 * (t_lo + t_hi);
}

}  // namespace

TorusFiber sample_torus(const BaseMorseFunction& h, const LevelLoop& loop, double c1, double c2,
                        int res, const IntegralPair& integrals, Rng& rng,
                        double collapse_exclusion, const Vec3c& cvec) {
    if (loop.samples.size() < 4) throw InsufficientSamples("loop needs at least 4 samples");
    TorusFiber t;
    t.cvec = cvec;
    t.loop = loop;
    t.c1 = c1;
    t.c2 = c2;
    t.res = res;
    t.n_loop = static_cast<int>(loop.samples.size());
    t.fiber_type = classify_torus(h, loop.h_level, c1, c2, integrals);

    // base points of the grid columns
    std::vector<FlagPoint> column(t.n_loop);
    std::vector<char> col_valid(t.n_loop, 1);

    if (t.fiber_type == TorusFiber::Type::Smooth) {
        const FlagPoint seed = seed_point(loop.samples[0], c1, c2, integrals, rng, h.line());
        column[0] = seed;
        t.loop_period = loop_return_time(h, seed, cvec);
        const double dt = t.loop_period / t.n_loop;
        for (int k = 1; k < t.n_loop; ++k) column[k] = loop_flow(h, column[k - 1], dt, cvec);
    } else {
        // collapsed type: seed each admissible loop position independently;
        // near the collapse circle the level set pinches and the (c1, c2)
        // pair sits on the boundary of the joint moment range, so some loop
        // positions genuinely carry no torus point
        const auto sing = singular_base_points(h.line());
        for (int k = 0; k < t.n_loop; ++k) {
            double dmin = 1e18;
            for (const auto& s : sing) dmin = std::min(dmin, proj_distance(loop.samples[k], s));
            if (dmin < collapse_exclusion) {
                col_valid[k] = 0;
                continue;
            }
            try {
                column[k] = seed_point(loop.samples[k], c1, c2, integrals, rng, h.line());
            } catch (const NoSolution&) {
                col_valid[k] = 0;
            }
        }
    }

    int first_col = 0;
    while (first_col < t.n_loop && !col_valid[first_col]) ++first_col;
    if (first_col == t.n_loop)
        throw NoSolution("no loop position admits a torus point at (c1, c2)");
    t.period1 = first_return_period(integrals.F1, column[first_col]);
    t.period2 = first_return_period(integrals.F2, column[first_col]);

    const std::size_t total = static_cast<std::size_t>(t.n_loop) * res * res;
    t.samples.resize(total);
    t.frames.resize(total);
    t.valid.assign(total, 1);

    std::vector<double> fres(total, 0.0), flres(total, 0.0), lres(total, 0.0);
    parallel_for(total, [&](std::size_t idx) {
        const int k = static_cast<int>(idx / (res * res));
        const int a = static_cast<int>((idx / res) % res);
        const int b = static_cast<int>(idx % res);
        if (!col_valid[k]) {
            t.valid[idx] = 0;
            return;
        }
        AmbientPoint q(column[k]);
        q = symbol_transport(integrals.F1, q, t.period1 * a / res);
        q = symbol_transport(integrals.F2, q, t.period2 * b / res);
        const FlagPoint p{canonicalize3(q.x), canonicalize3(q.y)};
        t.samples[idx] = p;
        fres[idx] = std::max(std::abs(eval_symbol(integrals.F1, p) - c1),
                             std::abs(eval_symbol(integrals.F2, p) - c2));
        flres[idx] = constraint_residual(p.x, p.y, cvec);
        const Vec3c w_unit = psi_raw(AmbientPoint(p)).normalized();
        lres[idx] = loop_distance(h, loop.h_level, w_unit);
        TorusSampleFrame fr;
        fr.xf1 = ham_field(integrals.F1, p);
        fr.xf2 = ham_field(integrals.F2, p);
        fr.lift = horizontal_lift(p, h.field(w_unit), h.line(), cvec).lifted;
        t.frames[idx] = fr;
    });
    for (std::size_t i = 0; i < total; ++i) {
        if (!t.valid[i]) continue;
        t.max_f_residual = std::max(t.max_f_residual, fres[i]);
        t.max_flag_residual = std::max(t.max_flag_residual, flres[i]);
        t.max_loop_residual = std::max(t.max_loop_residual, lres[i]);
    }

    if (t.fiber_type == TorusFiber::Type::Smooth) {
        // holonomy closure: the full-period return lies on the seed 2-torus
        // up to an angular rotation
        const FlagPoint ret = loop_flow(h, column[t.n_loop - 1], t.loop_period / t.n_loop, cvec);
        auto rot_dist = [&](double s1, double s2) {
            AmbientPoint q(column[0]);
            q = symbol_transport(integrals.F1, q, s1);
            q = symbol_transport(integrals.F2, q, s2);
            return flag_pair_distance(FlagPoint{q.x, q.y}, ret);
        };
        double b1 = 0.0, b2 = 0.0, bd = 1e18;
        const int ng = 48;
        for (int i = 0; i < ng; ++i)
            for (int j = 0; j < ng; ++j) {
                const double d = rot_dist(t.period1 * i / ng, t.period2 * j / ng);
                if (d < bd) {
                    bd = d;
                    b1 = t.period1 * i / ng;
                    b2 = t.period2 * j / ng;
                }
            }
        // 8-direction pattern search: axis moves alone stall in the
        // diagonal valleys of the orbit distance
        double step1 = t.period1 / ng, step2 = t.period2 / ng;
        for (int round = 0; round < 200 && step1 > 1e-16; ++round) {
            bool moved = false;
            for (int di = -1; di <= 1; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const double d = rot_dist(b1 + di * step1, b2 + dj * step2);
                    if (d < bd) {
                        bd = d;
                        b1 += di * step1;
                        b2 += dj * step2;
                        moved = true;
                    }
                }
            if (!moved) {
                step1 *= 0.5;
                step2 *= 0.5;
            }
        }
        t.holonomy_distance = bd;
    }
    return t;
}

double lagrangian_residual(const TorusFiber& t) {
    std::vector<double> worst(t.samples.size(), 0.0);
    parallel_for(t.samples.size(), [&](std::size_t i) {
        if (!t.valid[i]) return;
        const AmbientPoint p(t.samples[i]);
        std::array<AmbientTangent, 3> e{t.frames[i].xf1, t.frames[i].xf2, t.frames[i].lift};
        for (auto& v : e) {
            const double n = v.norm();
            if (n > 1e-12) v = v * (1.0 / n);
        }
        double m = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
                m = std::max(m, std::abs(omega_pair(p, e[a], e[b])));
        worst[i] = m;
    });
    double m = 0.0;
    for (double v : worst) m = std::max(m, v);
    return m;
}

std::array<std::array<double, 2>, 2> diagonal_segment(int i, const IntegralPair& integrals) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    const auto l1x = diag_of(integrals.F1.mx), l1y = diag_of(integrals.F1.my);
    const auto l2x = diag_of(integrals.F2.mx), l2y = diag_of(integrals.F2.my);
    // mu = 1: (x, y) concentrated at (e_j, e_k); mu = 0: at (e_k, e_j)
    return {{{l1x[k] + l1y[j], l2x[k] + l2y[j]}, {l1x[j] + l1y[k], l2x[j] + l2y[k]}}};
}

TorusFiber::Type classify_torus(const BaseMorseFunction& h, double level, double c1, double c2,
                                const IntegralPair& integrals, double segment_tol) {
    const auto sing = singular_base_points(h.line());
    for (int i = 0; i < 3; ++i) {
        if (std::abs(h.value(sing[i].normalized()) - level) > 1e-8) continue;
        // the loop passes through singular point i; check the diagonal segment
        const auto seg = diagonal_segment(i, integrals);
        const Eigen::Vector2d p0(seg[0][0], seg[0][1]), p1(seg[1][0], seg[1][1]);
        const Eigen::Vector2d q(c1, c2);
        const Eigen::Vector2d d = p1 - p0;
        const double tt = std::clamp(d.dot(q - p0) / d.squaredNorm(), 0.0, 1.0);
        if ((q - (p0 + tt * d)).norm() < segment_tol) return TorusFiber::Type::Collapsed;
    }
    return TorusFiber::Type::Smooth;
}

// ---- moment geometry ----

namespace {

std::vector<std::array<double, 2>> convex_hull(std::vector<std::array<double, 2>> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) {
                              return std::abs(a[0] - b[0]) < 1e-12 && std::abs(a[1] - b[1]) < 1e-12;
                          }),
              pts.end());
    if (pts.size() < 3) return pts;
    auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                    const std::array<double, 2>& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    std::vector<std::array<double, 2>> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 1e-12) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 1e-12) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace

std::array<FlagPoint, 6> hexagon_flags() {
    std::array<FlagPoint, 6> out;
    int n = 0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            if (i == k) continue;
            Vec3c x = Vec3c::Zero(), y = Vec3c::Zero();
            x(i) = 1.0;
            y(k) = 1.0;
            out[n++] = FlagPoint{x, y};
        }
    return out;
}

MomentImage moment_image(const std::vector<FlagPoint>& samples, const IntegralPair& integrals) {
    if (samples.empty()) throw InsufficientSamples("moment image of an empty sample set");
    MomentImage img;
    img.values.reserve(samples.size());
    for (const auto& p : samples)
        img.values.push_back({eval_symbol(integrals.F1, p), eval_symbol(integrals.F2, p)});

    const auto l1x = diag_of(integrals.F1.mx), l1y = diag_of(integrals.F1.my);
    const auto l2x = diag_of(integrals.F2.mx), l2y = diag_of(integrals.F2.my);
    int n = 0;
    std::vector<std::array<double, 2>> vertex_pts;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) {
            if (i == k) continue;
            img.vertices[n] = {i, k, l1x[i] + l1y[k], l2x[i] + l2y[k]};
            vertex_pts.push_back({img.vertices[n].f1, img.vertices[n].f2});
            ++n;
        }
    std::vector<std::array<double, 2>> all = img.values;
    all.insert(all.end(), vertex_pts.begin(), vertex_pts.end());
    img.hull = convex_hull(std::move(all));
    return img;
}

double hull_signed_distance(const std::vector<std::array<double, 2>>& hull,
                            const std::array<double, 2>& q) {
    const std::size_t n = hull.size();
    if (n < 3) throw InsufficientSamples("degenerate hull");
    bool inside = true;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = hull[i];
        const auto& b = hull[(i + 1) % n];
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        const double cross = ex * (q[1] - a[1]) - ey * (q[0] - a[0]);
        if (cross < -1e-12) inside = false;
        const double len2 = ex * ex + ey * ey;
        const double tt = std::clamp(((q[0] - a[0]) * ex + (q[1] - a[1]) * ey) / len2, 0.0, 1.0);
        const double dx = q[0] - (a[0] + tt * ex), dy = q[1] - (a[1] + tt * ey);
        dmin = std::min(dmin, std::sqrt(dx * dx + dy * dy));
    }
    return inside ? -dmin : dmin;
}

FlagPoint base_line_sample(const BaseSetLine& line, Rng& rng) {
    Vec3c x = Vec3c::Zero(), y = Vec3c::Zero();
    if (line.kind == BaseSetLine::Kind::XXY) {
        x(line.k) = 1.0;
        y(line.i) = rng.cnormal();
        y(line.j) = rng.cnormal();
    } else {
        y(line.i) = 1.0;
        x(line.j) = rng.cnormal();
        x(line.k) = rng.cnormal();
    }
    return FlagPoint{canonicalize3(x), canonicalize3(y)};
}

FlagPoint diagonal_line_sample(int i, double mu, double phase) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    Vec3c x = Vec3c::Zero(), y = Vec3c::Zero();
    x(j) = std::sqrt(mu);
    x(k) = std::sqrt(1.0 - mu) * std::exp(cplx(0, phase));
    y(j) = x(k);
    y(k) = -x(j);
    return FlagPoint{canonicalize3(x), canonicalize3(y)};
}

std::vector<std::pair<std::string, FlagPoint>> divisor_branch_samples(const BaseMorseFunction& h,
                                                                      int n_per_branch, Rng& rng) {
    std::vector<std::pair<std::string, FlagPoint>> out;
    int crit_idx = 0;
    for (const Vec3c& c : {h.max_point(), h.min_point()}) {
        const FiberClass fc = classify_fiber_point(ProjectivePoint{c});
        if (fc.tag != FiberClass::Tag::OneZero) {
            ++crit_idx;
            continue;  // generic fiber: irreducible, no coordinate branches
        }
        const int i0 = fc.index;
        for (const char* branch : {"x", "y"}) {
            for (int n = 0; n < n_per_branch; ++n) {
                Vec3c x, y;
                if (branch[0] == 'x') {
                    x = rng.cnormal3();
                    x(i0) = 0.0;
                    for (int j = 0; j < 3; ++j) y(j) = j == i0 ? rng.cnormal() : c(j) / x(j);
                } else {
                    y = rng.cnormal3();
                    y(i0) = 0.0;
                    for (int j = 0; j < 3; ++j) x(j) = j == i0 ? rng.cnormal() : c(j) / y(j);
                }
                const std::string label =
                    "crit" + std::to_string(crit_idx) + ":" + branch + std::to_string(i0);
                out.emplace_back(label, FlagPoint{canonicalize3(x), canonicalize3(y)});
            }
        }
        ++crit_idx;
    }
    return out;
}

int collapsed_level_count(const BaseMorseFunction& h, double tol) {
    std::vector<double> levels;
    for (const Vec3c& s : singular_base_points(h.line())) {
        const double v = h.value(s.normalized());
        if (v <= h.hmin() + tol || v >= h.hmax() - tol) continue;
        bool dup = false;
        for (double l : levels) dup = dup || std::abs(l - v) < tol;
        if (!dup) levels.push_back(v);
    }
    return static_cast<int>(levels.size());
}

}  // namespace pseudotor
