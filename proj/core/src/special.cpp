#include "pseudotor/special.hpp"

#include <cmath>

#include "pseudotor/errors.hpp"

namespace pseudotor {

namespace {

double wrap_pi(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

}  // namespace

BoundaryDivisor divisor_from(const BaseMorseFunction& h) {
    BoundaryDivisor d;
    d.c1 = h.max_point().cross(Vec3c::Ones());
    d.c2 = h.min_point().cross(Vec3c::Ones());
    if (d.c1.norm() < 1e-12 || d.c2.norm() < 1e-12)
        throw DegeneratePair("critical point proportional to (1,1,1) gives no divisor factor");
    return d;
}

FrameTriple frame_of(const TorusSampleFrame& f) {
    return FrameTriple{f.xf1, f.xf2, f.lift};
}

cplx theta_D_chart(const FlagPoint& p, const FrameTriple& fr, const BoundaryDivisor& d, int i,
                   int j, int k) {
    if (std::abs(p.x(i)) < 1e-10 || std::abs(p.y(j)) < 1e-10 || std::abs(p.x(k)) < 1e-10)
        throw DegenerateChart("vanishing pivot coordinate for the residue chart");
    const std::array<int, 2> xs{i == 0 ? 1 : 0, i == 2 ? 1 : 2};
    const std::array<int, 2> ys{j == 0 ? 1 : 0, j == 2 ? 1 : 2};
    const int kpos = ys[0] == k ? 0 : 1;
    if (ys[kpos] != k) throw DomainMismatch("eliminated index k must differ from j");

    const cplx xi = p.x(i), yj = p.y(j);
    const auto aff_vel = [&](const AmbientTangent& t) {
        Eigen::Vector4cd out;
        for (int a = 0; a < 2; ++a)
            out(a) = (t.dx(xs[a]) * xi - p.x(xs[a]) * t.dx(i)) / (xi * xi);
        for (int c = 0; c < 2; ++c)
            out(2 + c) = (t.dy(ys[c]) * yj - p.y(ys[c]) * t.dy(j)) / (yj * yj);
        return out;
    };

    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    m(2 + kpos, 0) = 1.0;  // residue direction: the eliminated affine coordinate
    m.col(1) = aff_vel(fr.e1);
    m.col(2) = aff_vel(fr.e2);
    m.col(3) = aff_vel(fr.e3);

    const cplx s_aff = d.section(AmbientPoint(p)) / (xi * xi * yj * yj);
    if (std::abs(s_aff) < 1e-13) throw OnDivisor("theta_D evaluated on the boundary divisor");
    const cplx dq = p.x(k) / xi;  // derivative of the constraint in the eliminated direction
    const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
    return sign * m.determinant() / (dq * s_aff);
}

cplx theta_D(const FlagPoint& p, const FrameTriple& fr, const BoundaryDivisor& d) {
    int i = 0, j = 0;
    p.x.cwiseAbs().maxCoeff(&i);
    p.y.cwiseAbs().maxCoeff(&j);
    int k = -1;
    double best = -1.0;
    for (int kk = 0; kk < 3; ++kk) {
        if (kk == j) continue;
        if (std::abs(p.x(kk)) > best) {
            best = std::abs(p.x(kk));
            k = kk;
        }
    }
    return theta_D_chart(p, fr, d, i, j, k);
}

double specialty_phase(const FlagPoint& p, const FrameTriple& fr, const BoundaryDivisor& d) {
    return std::arg(theta_D(p, fr, d));
}

SpecialtyReport specialty_report(const TorusFiber& t, const BoundaryDivisor& d) {
    std::vector<double> phases;
    phases.reserve(t.samples.size());
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
        if (!t.valid[i]) continue;
        phases.push_back(specialty_phase(t.samples[i], frame_of(t.frames[i]), d));
    }
    if (phases.empty()) throw InsufficientSamples("no valid torus samples for specialty");
    SpecialtyReport rep;
    rep.n = phases.size();
    cplx r = 0.0;
    for (double ph : phases) r += std::exp(cplx(0, ph));
    rep.mean_phase = std::arg(r);
    rep.dispersion = 1.0 - std::abs(r) / static_cast<double>(phases.size());
    for (double ph : phases)
        rep.max_deviation = std::max(rep.max_deviation, std::abs(wrap_pi(ph - rep.mean_phase)));
    return rep;
}

SpecialtyReport merge_reports(const std::vector<SpecialtyReport>& parts) {
    if (parts.empty()) throw InsufficientSamples("no specialty reports to merge");
    SpecialtyReport rep;
    cplx r = 0.0;
    for (const auto& p : parts) {
        rep.n += p.n;
        r += static_cast<double>(p.n) * (1.0 - p.dispersion) * std::exp(cplx(0, p.mean_phase));
    }
    rep.mean_phase = std::arg(r);
    rep.dispersion = 1.0 - std::abs(r) / static_cast<double>(rep.n);
    for (const auto& p : parts)
        rep.max_deviation = std::max(
            rep.max_deviation, p.max_deviation + std::abs(wrap_pi(p.mean_phase - rep.mean_phase)));
    return rep;
}

double lie_invariance_drift(const SymbolFunction& f, const FlagPoint& p, const FrameTriple& fr,
                            const BoundaryDivisor& d, double t) {
    const Mat3c u = f.has_x ? herm_exp(f.mx, cplx(0, -2.0 * t)) : Mat3c::Identity();
    const Mat3c v = f.has_y ? herm_exp(f.my, cplx(0, -2.0 * t)) : Mat3c::Identity();
    const FlagPoint q{u * p.x, v * p.y};
    const auto push = [&](const AmbientTangent& e) { return AmbientTangent(u * e.dx, v * e.dy); };
    const FrameTriple fq{push(fr.e1), push(fr.e2), push(fr.e3)};
    const double ph0 = specialty_phase(p, fr, d);
    const double ph1 = specialty_phase(q, fq, d);
    return std::abs(wrap_pi(ph1 - ph0));
}

}  // namespace pseudotor
