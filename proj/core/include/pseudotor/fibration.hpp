#pragma once

#include <string>
#include <vector>

#include "pseudotor/pseudotoric.hpp"
#include "pseudotor/rng.hpp"

namespace pseudotor {

/// Morse function on a projective line in CP^2_w with exactly two critical
/// points. Symbol mode is induced by a Hermitian form on the plane (the
/// second critical point is forced to the orthogonal complement of a);
/// Mobius mode pins both critical points exactly via a Mobius chart.
class BaseMorseFunction : public LineFunction {
  public:
    enum class Mode { Mobius, Symbol };

    double value(const Vec3c& w_unit) const override;
    double diff(const Vec3c& w_unit, const Vec3c& dw) const override;
    Vec3c field(const Vec3c& w_unit) const override;
    const LineModel& line() const override { return lm_; }

    Mode mode() const { return mode_; }
    const Vec3c& max_point() const { return a_; }
    const Vec3c& min_point() const { return b_; }
    double hmax() const { return 1.0; }
    double hmin() const { return -1.0; }
    /// True when Symbol mode discarded a non-orthogonal min_point request.
    bool orthogonality_warning() const { return warned_; }

    friend BaseMorseFunction make_height(const Vec3c& a, const Vec3c& b, Mode mode,
                                         const LineModel& lm);

  private:
    Mode mode_ = Mode::Mobius;
    Vec3c a_, b_;       // canonical max / min points on the line
    Vec2c za_, zb_;     // their zeta coordinates (unit)
    Mat2c h2_ = Mat2c::Zero();  // Symbol mode form
    LineModel lm_;
    bool warned_ = false;
};

BaseMorseFunction make_height(const Vec3c& a, const Vec3c& b, BaseMorseFunction::Mode mode,
                              const LineModel& lm = flag_line());
BaseMorseFunction height_from(const RunConfig& cfg);

/// Closed level circle of the base Morse function.
struct LevelLoop {
    double h_level = 0.0;
    std::vector<Vec3c> samples;  // canonical points on the line
    bool closed = true;
};

LevelLoop trace_loop(const BaseMorseFunction& h, double level, int n);

/// Distance from w to the level circle, measured in the explicit loop chart.
double loop_distance(const BaseMorseFunction& h, double level, const Vec3c& w);

/// The three intersections of the base line with the coordinate lines
/// {w_i = 0}; these carry the singular fibers.
std::array<Vec3c, 3> singular_base_points(const LineModel& lm = flag_line());

/// One point of the torus T^{c1,c2} over a base point w (w on the line).
/// Constrained root finding over the x-modulus simplex with multistart.
FlagPoint seed_point(const Vec3c& w, double c1, double c2, const IntegralPair& integrals,
                     Rng& rng, const LineModel& lm = flag_line());

struct TorusSampleFrame {
    AmbientTangent xf1, xf2, lift;
};

/// Sampled fiber of the minimal Lagrangian fibration.
struct TorusFiber {
    enum class Type { Smooth, Collapsed };

    LevelLoop loop;
    double c1 = 0.0, c2 = 0.0;
    int n_loop = 0, res = 0;
    std::vector<FlagPoint> samples;        // index (k*res + a)*res + b
    std::vector<TorusSampleFrame> frames;  // same indexing
    std::vector<char> valid;               // 0 inside the collapse exclusion annulus
    Type fiber_type = Type::Smooth;

    double max_f_residual = 0.0;
    double max_flag_residual = 0.0;
    double max_loop_residual = 0.0;
    double holonomy_distance = 0.0;  // smooth type only
    double period1 = 0.0, period2 = 0.0, loop_period = 0.0;

    Vec3c cvec = Vec3c::Ones();  // hypersurface the fiber lives on

    std::size_t index(int k, int a, int b) const {
        return (static_cast<std::size_t>(k) * res + a) * res + b;
    }
};

TorusFiber sample_torus(const BaseMorseFunction& h, const LevelLoop& loop, double c1, double c2,
                        int res, const IntegralPair& integrals, Rng& rng,
                        double collapse_exclusion = 1e-3, const Vec3c& cvec = Vec3c::Ones());

/// Max over samples and unit-frame pairs of |omega(e_i, e_j)|.
double lagrangian_residual(const TorusFiber& t);

TorusFiber::Type classify_torus(const BaseMorseFunction& h, double level, double c1, double c2,
                                const IntegralPair& integrals, double segment_tol = 1e-6);

/// First-return period of the exact Hamiltonian transport of a diagonal
/// integral through p.
double first_return_period(const SymbolFunction& f, const FlagPoint& p);

// ---- moment geometry ----

struct MomentImage {
    struct Vertex {
        int i, k;  // flag (x = e_i, y = e_k)
        double f1, f2;
    };
    std::vector<std::array<double, 2>> values;
    std::vector<std::array<double, 2>> hull;  // counter-clockwise
    std::array<Vertex, 6> vertices;
};

MomentImage moment_image(const std::vector<FlagPoint>& samples, const IntegralPair& integrals);

/// Signed distance of q to the hull boundary (negative inside).
double hull_signed_distance(const std::vector<std::array<double, 2>>& hull,
                            const std::array<double, 2>& q);

/// The six torus-fixed flags (x = e_i, y = e_k), i != k.
std::array<FlagPoint, 6> hexagon_flags();

/// Random point on a base-set line / on a diagonal line (canonical flags).
FlagPoint base_line_sample(const BaseSetLine& line, Rng& rng);
FlagPoint diagonal_line_sample(int i, double mu, double phase);

/// The (F1, F2) image segment of diagonal line i: returns its endpoints.
std::array<std::array<double, 2>, 2> diagonal_segment(int i, const IntegralPair& integrals);

/// Labeled samples of the four local branches of the boundary divisor of the
/// minimal fibration (two per compactified singular fiber).
std::vector<std::pair<std::string, FlagPoint>> divisor_branch_samples(const BaseMorseFunction& h,
                                                                      int n_per_branch, Rng& rng);

/// Number of interior h-levels whose loop meets a singular base point; the
/// minimal fibration has exactly one.
int collapsed_level_count(const BaseMorseFunction& h, double tol = 1e-9);

}  // namespace pseudotor
