#include "pseudotor/flagconn.hpp"

#include <cmath>

#include "pseudotor/errors.hpp"

namespace pseudotor {

FlagAsPair as_pair(const FlagPoint& f) {
    return FlagAsPair{f.x, f.y};
}

FlagPoint as_flag(const FlagAsPair& f, double tol) {
    return make_flag(f.p, f.l, tol);
}

double incidence_residual(const FlagAsPair& f) {
    return std::abs((f.l.transpose() * f.p).value()) / (f.l.norm() * f.p.norm());
}

ProjectivePoint pi_project(const FlagAsPair& f) {
    return ProjectivePoint{canonicalize3(f.p)};
}

SymbolFunction flag_symbol(const Mat3c& a) {
    if ((a - a.adjoint()).norm() > 1e-12) throw DomainMismatch("flag symbol requires Hermitian A");
    return SymbolFunction::pair(a, -a.conjugate());
}

DpiCheck dpi_relation_check(const Mat3c& a, const FlagAsPair& f, const IntegralPair&) {
    const FlagPoint fp = as_flag(f);
    const SymbolFunction fa = flag_symbol(a);
    const AmbientTangent x_big = ham_field(fa, fp);
    const Vec3c dpi_x = herm_project(fp.x, x_big.dx);
    const Vec3c x_small = sym_field(a, fp.x);

    DpiCheck out;
    const double nref = std::max(x_small.norm(), 1e-14);
    out.residual = (dpi_x - x_small).norm() / nref;

    // pairing-ratio fit over tangent basis pairs with a nondegenerate
    // projected pairing
    const auto basis = flag_tangent_basis(fp);
    const AmbientPoint ap(fp);
    std::vector<double> ratios;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            const double den = fs_pair(fp.x, basis[i].dx, basis[j].dx);
            if (std::abs(den) < 1e-6) continue;
            ratios.push_back(omega_pair(ap, basis[i], basis[j]) / den);
        }
    if (!ratios.empty()) {
        double mean = 0.0;
        for (double r : ratios) mean += r;
        mean /= static_cast<double>(ratios.size());
        double var = 0.0;
        for (double r : ratios) var += (r - mean) * (r - mean);
        out.constant = mean;
        out.constant_dispersion =
            std::sqrt(var / static_cast<double>(ratios.size())) / std::max(std::abs(mean), 1e-14);
    }
    return out;
}

std::array<AmbientTangent, 4> horizontal_distribution(const FlagAsPair& f,
                                                      const IntegralPair& integrals,
                                                      double threshold) {
    const FlagPoint fp = as_flag(f);
    std::array<AmbientTangent, 4> d;
    d[0] = ham_field(integrals.F1, fp);
    d[1] = ham_field(integrals.F2, fp);
    d[2] = d[0].rotated();
    d[3] = d[1].rotated();

    Eigen::Matrix<double, 12, 4> m;
    for (int c = 0; c < 4; ++c)
        for (int i = 0; i < 3; ++i) {
            m(i, c) = d[c].dx(i).real();
            m(3 + i, c) = d[c].dx(i).imag();
            m(6 + i, c) = d[c].dy(i).real();
            m(9 + i, c) = d[c].dy(i).imag();
        }
    const auto sv = Eigen::JacobiSVD<Eigen::Matrix<double, 12, 4>>(m).singularValues();
    if (sv(3) < threshold)
        throw DegenerateDistribution("connection distribution drops rank over Delta");
    return d;
}

namespace {

using TransportFn = std::function<AmbientPoint(const AmbientPoint&, double)>;

Eigen::Matrix<double, 12, 1> pack_tangent(const AmbientTangent& t) {
    Eigen::Matrix<double, 12, 1> v;
    for (int i = 0; i < 3; ++i) {
        v(i) = t.dx(i).real();
        v(3 + i) = t.dx(i).imag();
        v(6 + i) = t.dy(i).real();
        v(9 + i) = t.dy(i).imag();
    }
    return v;
}

double bracket_residual(const AmbientPoint& p, const std::array<TransportFn, 4>& flows,
                        const std::array<AmbientTangent, 4>& gen, double step) {
    Eigen::Matrix<double, 12, 4> d;
    for (int c = 0; c < 4; ++c) d.col(c) = pack_tangent(gen[c]);
    const Eigen::JacobiSVD<Eigen::Matrix<double, 12, 4>> dsvd(
        d, Eigen::ComputeThinU | Eigen::ComputeThinV);

    double worst = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            AmbientPoint q = flows[a](p, step);
            q = flows[b](q, step);
            q = flows[a](q, -step);
            q = flows[b](q, -step);
            const Vec3c cx = canonicalize3(q.x), cy = canonicalize3(q.y);
            AmbientTangent br((cx - p.x) / (step * step), (cy - p.y) / (step * step));
            br.dx = herm_project(p.x, br.dx);
            br.dy = herm_project(p.y, br.dy);
            const Eigen::Matrix<double, 12, 1> v = pack_tangent(br);
            const Eigen::Matrix<double, 12, 1> resid = v - d * dsvd.solve(v);
            // normalize by the generator scale, not by |br| itself: when the
            // flows commute the bracket estimate is pure roundoff noise and a
            // self-normalized ratio would report it as a full violation
            const double scale = std::max(gen[a].norm() * gen[b].norm(), 1e-12);
            worst = std::max(worst, resid.norm() / scale);
        }
    return worst;
}

}  // namespace

double frobenius_residual(const FlagAsPair& f, double step, const IntegralPair& integrals) {
    const FlagPoint fp = as_flag(f);
    const AmbientPoint p(canonicalize3(fp.x), canonicalize3(fp.y));
    const auto gen = horizontal_distribution(f, integrals);
    const std::array<TransportFn, 4> flows{
        [&](const AmbientPoint& q, double t) { return symbol_transport(integrals.F1, q, t); },
        [&](const AmbientPoint& q, double t) { return symbol_transport(integrals.F2, q, t); },
        [&](const AmbientPoint& q, double t) { return gradient_transport(integrals.F1, q, t); },
        [&](const AmbientPoint& q, double t) { return gradient_transport(integrals.F2, q, t); }};
    return bracket_residual(p, flows, gen, step);
}

double frobenius_control_residual(const FlagAsPair& f, double step, const IntegralPair& integrals,
                                  Rng& rng) {
    const FlagPoint fp = as_flag(f);
    const AmbientPoint p(canonicalize3(fp.x), canonicalize3(fp.y));
    auto gen = horizontal_distribution(f, integrals);

    // random non-balanced symbol: its Hamiltonian field leaves the
    // distribution bracket-closed span
    Mat3c r1 = Mat3c::Zero(), r2 = Mat3c::Zero();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j <= i; ++j) {
            const cplx v1 = i == j ? cplx(rng.normal()) : 0.5 * rng.cnormal();
            const cplx v2 = i == j ? cplx(rng.normal()) : 0.5 * rng.cnormal();
            r1(i, j) = v1;
            r1(j, i) = std::conj(v1);
            r2(i, j) = v2;
            r2(j, i) = std::conj(v2);
        }
    const SymbolFunction control = SymbolFunction::pair(r1, r2, Domain::Ambient);
    gen[3] = ham_field(control, AmbientPoint(p));

    FlowOptions opt;
    opt.tol = 1e-11;
    const FieldFn control_field = [&](const AmbientPoint& q) {
        return ham_field(control, AmbientPoint(q.x.normalized(), q.y.normalized()));
    };
    const std::array<TransportFn, 4> flows{
        [&](const AmbientPoint& q, double t) { return symbol_transport(integrals.F1, q, t); },
        [&](const AmbientPoint& q, double t) { return symbol_transport(integrals.F2, q, t); },
        [&](const AmbientPoint& q, double t) { return gradient_transport(integrals.F1, q, t); },
        [&](const AmbientPoint& q, double t) { return flow_field(control_field, q, t, opt); }};
    return bracket_residual(p, flows, gen, step);
}

FlagAsPair torus_orbit_sample(const FlagAsPair& seed, cplx s, cplx t) {
    if (std::abs(s) < 1e-14 || std::abs(t) < 1e-14)
        throw DomainMismatch("torus action requires nonzero (s, t)");
    Vec3c p = seed.p, l = seed.l;
    p(0) *= s;
    p(1) *= t;
    l(0) /= s;
    l(1) /= t;
    return FlagAsPair{canonicalize3(p), canonicalize3(l)};
}

FlagClass classify_flag(const FlagAsPair& f, double tol) {
    const Vec3c l = f.l / f.l.norm();
    for (int i = 0; i < 3; ++i)
        if (std::abs(l(i)) < tol) return FlagClass{FlagClass::Tag::ThroughVertex, i};
    return FlagClass{FlagClass::Tag::Generic, -1};
}

SchubertMembership schubert_membership(const FlagAsPair& f, double tol) {
    const bool in_p0 = std::abs(f.l(0)) / f.l.norm() < tol;   // l through [1:0:0]
    const bool in_l0 = std::abs(f.p(0)) / f.p.norm() < tol;   // p on {z_0 = 0}
    if (in_p0 && in_l0) return SchubertMembership::Both;
    if (in_p0) return SchubertMembership::InDp0;
    if (in_l0) return SchubertMembership::InDl0;
    return SchubertMembership::Neither;
}

double orbit_coverage(const FlagAsPair& seed, Rng& rng, int grid, int n_targets, double radius) {
    std::vector<Vec3c> images;
    images.reserve(static_cast<std::size_t>(grid) * grid * 64);
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b)
            for (int ph = 0; ph < 64; ++ph) {
                const double us = -3.0 + 6.0 * a / (grid - 1);
                const double ut = -3.0 + 6.0 * b / (grid - 1);
                const double p1 = 2.0 * M_PI * (ph % 8) / 8.0;
                const double p2 = 2.0 * M_PI * (ph / 8) / 8.0;
                const cplx s = std::exp(us) * std::exp(cplx(0, p1));
                const cplx t = std::exp(ut) * std::exp(cplx(0, p2));
                images.push_back(canonicalize3(torus_orbit_sample(seed, s, t).p));
            }
    int hit = 0, used = 0;
    while (used < n_targets) {
        const Vec3c w = canonicalize3(rng.cnormal3());
        if (w.cwiseAbs().minCoeff() < 0.05) continue;  // skip targets near the triangle Delta
        ++used;
        for (const auto& im : images)
            if (proj_distance(w, im) < radius) {
                ++hit;
                break;
            }
    }
    return static_cast<double>(hit) / static_cast<double>(n_targets);
}

}  // namespace pseudotor
