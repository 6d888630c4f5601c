#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace boxbp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// xoshiro256** seeded through SplitMix64.  Streams are split by hashing
/// (seed, a, b) into a fresh seed, so any substream can be built directly
/// without advancing a parent generator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) : seed_(seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) {
            sm += 0x9E3779B97F4A7C15ULL;
            word = splitmix64(sm);
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    std::uint64_t seed() const { return seed_; }

    /// Deterministic child stream; the parent state is not consumed.
    Rng substream(std::uint64_t a, std::uint64_t b = 0) const {
        return Rng(splitmix64(splitmix64(splitmix64(seed_) ^ a) ^ (b * 0xD1B54A32D192ED03ULL)));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    static constexpr const char* algorithm() { return "xoshiro256**/splitmix64"; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
};

// ---------------------------------------------------------------------------
// Alphabets and support profiles
// ---------------------------------------------------------------------------

enum class Polarity { Unipolar, Bipolar };

/// Integer grid alphabet {lower, ..., upper} containing 0.
struct Alphabet {
    int lower = 0;
    int upper = 1;

    Alphabet() = default;
    Alphabet(int lo, int hi);

    static Alphabet binary() { return {0, 1}; }
    static Alphabet ternary() { return {-1, 1}; }

    Polarity polarity() const {
        return (lower == 0 || upper == 0) ? Polarity::Unipolar : Polarity::Bipolar;
    }
    int cardinality() const { return upper - lower + 1; }
    bool contains(int level) const { return level >= lower && level <= upper; }

    /// Nonzero levels that are not an endpoint of the alphabet.
    std::vector<int> interior_levels() const;
    /// Nonzero endpoints (one for unipolar, two for bipolar alphabets).
    std::vector<int> extreme_levels() const;

    /// {0..L} with L < 0, i.e. lower < 0 == upper.
    bool is_negative_unipolar() const { return upper == 0 && lower < 0; }
    Alphabet reflected() const { return {-upper, -lower}; }

    std::string to_string() const;
    static Alphabet parse(const std::string& text);  // "LO:HI"

    bool operator==(const Alphabet&) const = default;
};

/// Level counts of a finite-valued signal.  Only nonzero levels are stored;
/// the zero level receives whatever is left of N.
struct SupportProfile {
    int N = 0;
    std::map<int, int> counts;

    SupportProfile() = default;
    SupportProfile(int n, std::map<int, int> level_counts);

    int count(int level) const;
    int support() const;  // k
    int zeros() const { return N - support(); }
    /// Entries that are neither zero nor an extreme level of `alphabet`.
    int interior(const Alphabet& alphabet) const;
    /// Entries sitting on an extreme level of `alphabet`.
    int extreme(const Alphabet& alphabet) const;

    /// Throws std::invalid_argument if a level is outside the alphabet or
    /// the counts exceed N.
    void validate(const Alphabet& alphabet) const;
};

/// A signal with its levels kept as exact integers next to the float vector.
struct Signal {
    std::vector<int> levels;
    Vector values;
};

// ---------------------------------------------------------------------------
// Boxes, problems, results
// ---------------------------------------------------------------------------

/// Componentwise bounds; either side may be +-infinity.
struct Box {
    Vector lower;
    Vector upper;

    static Box uniform(Eigen::Index n, double lo, double hi);
    static Box unbounded(Eigen::Index n) { return uniform(n, -kInf, kInf); }
    static Box nonnegative(Eigen::Index n) { return uniform(n, 0.0, kInf); }

    Eigen::Index size() const { return lower.size(); }
    bool contains(const Vector& x, double tol) const;
    Box scaled(double beta) const;
    void validate() const;
};

/// Convex hull endpoints of the alphabet.
std::pair<double, double> box_for(const Alphabet& alphabet);
Box box_for(const Alphabet& alphabet, Eigen::Index n);

struct RecoveryProblem {
    Matrix A;
    Vector b;
    Box box;
    double eta = 0.0;

    void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, ToleranceNotMet };
enum class Uniqueness { Unique, NonUnique, NotChecked };

const char* to_string(SolveStatus s);
const char* to_string(Uniqueness u);

struct SolveResult {
    Vector x;
    double objective = 0.0;          // ||x||_1
    double equality_residual = 0.0;  // ||Ax - b||_2
    SolveStatus status = SolveStatus::Infeasible;
    Uniqueness unique = Uniqueness::NotChecked;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// i.i.d. N(0, 1/m) entries.
Matrix sample_gaussian_matrix(Rng& rng, int m, int n);

/// Exactly profile.count(l) entries equal to l, positions uniformly random.
Signal sample_signal(Rng& rng, const Alphabet& alphabet, const SupportProfile& profile);

/// Uniformly random point on the sphere of the given radius in R^m.
Vector sample_sphere(Rng& rng, Eigen::Index m, double radius);

}  // namespace boxbp
