#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "pseudotor/config.hpp"
#include "pseudotor/geometry.hpp"

namespace pseudotor {

/// Where a function lives; evaluation enforces the marker.
enum class Domain { Flag, Ambient, BaseCP2w, BaseCP1w };

/// Real function induced by Hermitian matrices, one per projective factor:
/// f(x, y) = (x^† M_x x)/|x|^2 + (y^† M_y y)/|y|^2 (terms as applicable).
struct SymbolFunction {
    Mat3c mx = Mat3c::Zero();
    Mat3c my = Mat3c::Zero();
    bool has_x = true;
    bool has_y = true;
    Domain domain = Domain::Flag;

    static SymbolFunction pair(const Mat3c& mx, const Mat3c& my, Domain d = Domain::Flag);
    static SymbolFunction diag_pair(const std::array<double, 3>& lx,
                                    const std::array<double, 3>& ly, Domain d = Domain::Flag);
    static SymbolFunction x_only(const Mat3c& m, Domain d);

    /// Fiber-preservation (balance) condition: M_x + M_y^T is a multiple of
    /// the identity, so the induced flow on w = x.*y is a projective scalar.
    bool balanced(double tol = 1e-12) const;
};

/// Commuting pair of integrals with the balance condition.
struct IntegralPair {
    SymbolFunction F1, F2;
};

IntegralPair make_default_integrals();
IntegralPair integrals_from(const RunConfig& cfg);

// ---- symbol primitives on one factor (z any scale unless noted) ----
double sym_value(const Mat3c& A, const Vec3c& z);
/// df(u) at unit z for a real tangent direction u.
double sym_diff(const Mat3c& A, const Vec3c& z_unit, const Vec3c& u);
/// Hamiltonian field at unit z in horizontal representation: -2i (A - f) z.
Vec3c sym_field(const Mat3c& A, const Vec3c& z_unit);
/// exp(factor * A) for Hermitian A via eigendecomposition.
Mat3c herm_exp(const Mat3c& A, cplx factor);

double eval_symbol(const SymbolFunction& f, const AmbientPoint& p);
double eval_symbol(const SymbolFunction& f, const FlagPoint& p);
double eval_symbol(const SymbolFunction& f, const ProjectivePoint& p);

/// Differential of the symbol at p applied to an ambient tangent.
double symbol_differential(const SymbolFunction& f, const AmbientPoint& p,
                           const AmbientTangent& t);

/// Closed-form Hamiltonian field at a canonical point.
AmbientTangent ham_field(const SymbolFunction& f, const AmbientPoint& p);
AmbientTangent ham_field(const SymbolFunction& f, const FlagPoint& p);

/// Poisson bracket omega(X_f, X_g) at p.
double poisson(const SymbolFunction& f, const SymbolFunction& g, const FlagPoint& p);

// ---- Hamiltonian fields of general functions, via the tangent-basis solve ----
using DiffFn = std::function<double(const AmbientTangent&)>;

/// Hamiltonian field on the hypersurface {<c, x.*y> = 0} of a function given
/// by its differential on ambient tangents.
AmbientTangent ham_from_differential_flag(const FlagPoint& p, const DiffFn& df,
                                          const Vec3c& cvec = Vec3c::Ones());
/// Same on the ambient product.
AmbientTangent ham_from_differential_ambient(const AmbientPoint& p, const DiffFn& df);

// ---- monitored adaptive flow ----
using FieldFn = std::function<AmbientTangent(const AmbientPoint&)>;
/// Called after each accepted step; return false to stop the integration.
using FlowObserver = std::function<bool(double t, const AmbientPoint&)>;

struct FlowOptions {
    double tol = 1e-10;          // local error tolerance
    bool reproject = false;      // re-project to the hypersurface each step
    Vec3c cvec = Vec3c::Ones();  // hypersurface for re-projection
    int max_steps = 2'000'000;
};

struct FlowMonitor {
    double max_constraint_residual = 0.0;
    double max_value_drift = 0.0;  // filled by the symbol flow wrapper
    double min_step = std::numeric_limits<double>::infinity();
    int steps = 0;
};

/// Dormand-Prince 4(5) integration of an arbitrary field with per-step
/// renormalization (and optional hypersurface re-projection). Throws
/// StepCollapse when the accepted step falls below 1e-12.
AmbientPoint flow_field(const FieldFn& field, const AmbientPoint& start, double time,
                        const FlowOptions& opt, FlowMonitor* mon = nullptr,
                        const FlowObserver* observer = nullptr);

struct SymbolFlowResult {
    FlagPoint end;
    FlowMonitor monitor;
    std::vector<FlagPoint> path;  // filled when path_samples > 0
};

/// Monitored flow of a symbol Hamiltonian on the flag variety: adaptive
/// integration with re-projection; reports constraint and energy drift.
SymbolFlowResult flow(const SymbolFunction& f, const FlagPoint& p, double time,
                      double tol = 1e-10, int path_samples = 0);

/// Exact Hamiltonian transport of a symbol: z -> exp(-2 i M t) z per factor.
AmbientPoint symbol_transport(const SymbolFunction& f, const AmbientPoint& p, double t);
/// Exact flow of the rotated field I.X_f: z -> exp(+2 M t) z per factor.
AmbientPoint gradient_transport(const SymbolFunction& f, const AmbientPoint& p, double t);

}  // namespace pseudotor
