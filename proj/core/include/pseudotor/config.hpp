#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace pseudotor {

/// All tunable knobs for a run. Defaults reproduce the minimal fibration
/// with the standard integral pair; everything can be overridden from a
/// key-value config file.
struct RunConfig {
    // integral eigenvalues (x and y triples; the balance sums must agree)
    std::array<double, 3> f1_lambda_x{0.0, 1.0, 2.0};
    std::array<double, 3> f1_lambda_y{2.0, 1.0, 0.0};
    std::array<double, 3> f2_lambda_x{0.0, 1.0, 3.0};
    std::array<double, 3> f2_lambda_y{3.0, 2.0, 0.0};

    // base height function
    std::string h_mode = "mobius";  // "mobius" | "symbol"
    std::array<double, 3> h_max_point{0.0, 1.0, -1.0};
    std::array<double, 3> h_min_point{1.0, 0.0, -1.0};

    // fiber sampling labels
    std::vector<double> loop_levels{-0.5, 0.0, 0.5};
    std::vector<std::pair<double, double>> c_levels{{2.0, 2.6}, {1.8, 2.9}};

    // grid resolutions
    int n_gamma = 64;   // loop samples
    int n_angle = 32;   // angular resolution per torus direction

    // tolerances
    double flag_tol = 1e-10;
    double rank_tol = 1e-7;
    double phase_tol = 1e-3;
    double exclusion_radius = 1e-2;     // around D and Sing
    double collapse_exclusion = 1e-3;   // around collapse circles

    // cutoff radii for the isotopy Hamiltonian
    double r1 = 0.2;
    double r2 = 0.1;

    // misc
    std::uint64_t seed = 7;
    std::string out_dir = ".";

    static RunConfig defaults() { return RunConfig{}; }
    static RunConfig load(const std::string& path);

    /// Apply a single "key = value" assignment (used by the file loader).
    void set(const std::string& key, const std::string& value);

    /// Dump every field in the loadable key-value format.
    void dump(std::ostream& os) const;

    /// Throws UsageError when an invariant is broken (balance condition,
    /// non-positive tolerances, bad mode string).
    void validate() const;
};

}  // namespace pseudotor
