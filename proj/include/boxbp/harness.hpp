#pragma once

#include "boxbp/core.hpp"
#include "boxbp/statdim.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace boxbp {

struct Rational {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    /// round(num * n / den), halves rounded up.
    int of(int n) const;
    /// "p/q" or a decimal literal such as "0.02".
    static Rational parse(const std::string& text);
    std::string to_string() const;
};

/// Which program the grid solves.  Box uses the hull of the alphabet;
/// MirroredAuto runs the direct and mirrored binary programs and keeps the
/// candidate closer to {0,1}^N.
enum class GridProgram { Box, Pplus, L1, MirroredAuto };
const char* to_string(GridProgram p);
GridProgram parse_grid_program(const std::string& name);  // box|pplus|l1|mirrored

struct PhaseGridConfig {
    int N = 100;
    Alphabet alphabet = Alphabet::binary();
    std::vector<Rational> k_fractions;
    std::vector<Rational> m_fractions;
    /// Fraction of the support placed on interior levels; the rest sits on
    /// the extreme levels.  Unset: levels drawn uniformly from the nonzero ones.
    std::optional<double> level_ratio;
    int trials = 25;
    double eta = 0.0;
    bool rounding = false;
    std::uint64_t seed = 0;
    double success_tol = 1e-4;
    GridProgram program = GridProgram::Box;
    /// Record wall-clock solve times.  Off by default so that the CSV is
    /// reproducible byte for byte.
    bool timing = false;

    /// JSON mirror of the fields above.  Fraction lists accept numbers,
    /// "p/q" strings, {"num":p,"den":q} objects, or a range object
    /// {"from":..,"to":..,"step":..}.
    static PhaseGridConfig from_json(const std::string& text);
    std::string to_json() const;
    /// Throws std::invalid_argument when the config is unusable.
    void validate() const;

    std::vector<int> k_values() const;
    std::vector<int> m_values() const;
};

struct PhaseCell {
    int k = 0;
    int m = 0;
    std::string k_detail;
    int trials = 0;
    int successes = 0;
    int failures = 0;  // solver errors or non-optimal status
    double mean_rel_err = 0.0;
    double mean_runtime_ms = 0.0;

    double success_rate() const { return trials ? static_cast<double>(successes) / trials : 0.0; }
};

struct PhaseTable {
    PhaseGridConfig config;
    std::string variant;
    std::vector<PhaseCell> cells;  // sorted by (k, m)

    inline static constexpr const char* kHeader =
        "variant,N,k,k_detail,m,eta,trials,successes,success_rate,mean_rel_err,mean_runtime_ms,seed";

    /// '#' comment lines with the success rule and failure count, then the
    /// header and one row per cell.
    std::string to_csv() const;
    const PhaseCell* find(int k, int m) const;
};

/// Short variant name of the grid: bin, ter, uf, bf, pplus, l1 or mirrored.
std::string grid_variant(const PhaseGridConfig& cfg);

/// Runs every (k, m) of the fraction grid.  Trial t of cell (k, m) uses the
/// substream (seed; k, m, t), so cells do not depend on the rest of the grid
/// and results do not depend on `jobs`.
PhaseTable run_phase_grid(const PhaseGridConfig& cfg, int jobs = 1);

/// Same protocol on an explicit list of (k, m) cells, with noise when eta > 0.
PhaseTable run_cells(const PhaseGridConfig& cfg, const std::vector<std::pair<int, int>>& cells,
                     int jobs = 1);

/// Noisy grid: b = A x0 + e with e uniform on the eta-sphere.  eta = 0
/// reproduces run_phase_grid exactly.
PhaseTable run_robustness_grid(const PhaseGridConfig& cfg, int jobs = 1);

/// CSV "variant,N,level_ratio,k_over_N,delta_over_N" for k/N = 0.01, ..., 1.
/// level_ratio is k_hat / k for uf and bf and ignored otherwise.
std::string emit_theory_overlay(CurveVariant variant, int N, double level_ratio = 0.0);
/// The curve spec used by the overlay for support size k.
CurveSpec overlay_spec(CurveVariant variant, int N, int k, double level_ratio);

struct TransitionPoint {
    int k = 0;
    double m_star = 0.0;  // NaN when the level is never reached
    /// ok, trivial (k = 0), nonmonotone, starts_above (first m already at
    /// the level) or not_reached.
    std::string flag;
};

/// Linear interpolation in m of the first upward crossing of `level`.
std::vector<TransitionPoint> empirical_transition_location(const PhaseTable& table,
                                                           double level = 0.5);
std::string transition_csv(const std::vector<TransitionPoint>& points);

}  // namespace boxbp
