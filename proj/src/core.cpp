#include "boxbp/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace boxbp {

Alphabet::Alphabet(int lo, int hi) : lower(lo), upper(hi) {
    if (lo > 0 || hi < 0) {
        throw std::invalid_argument("alphabet must contain 0: got " + std::to_string(lo) + ":" +
                                    std::to_string(hi));
    }
    if (lo == hi) throw std::invalid_argument("alphabet needs at least two levels");
}

std::vector<int> Alphabet::interior_levels() const {
    std::vector<int> out;
    for (int l = lower + 1; l < upper; ++l) {
        if (l != 0) out.push_back(l);
    }
    return out;
}

std::vector<int> Alphabet::extreme_levels() const {
    std::vector<int> out;
    if (lower != 0) out.push_back(lower);
    if (upper != 0) out.push_back(upper);
    return out;
}

std::string Alphabet::to_string() const {
    return std::to_string(lower) + ":" + std::to_string(upper);
}

Alphabet Alphabet::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("alphabet must look like LO:HI, got '" + text + "'");
    }
    auto parse_int = [&](std::string_view s) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw std::invalid_argument("alphabet bound is not an integer: '" + std::string(s) + "'");
        }
        return v;
    };
    std::string_view sv(text);
    return Alphabet(parse_int(sv.substr(0, colon)), parse_int(sv.substr(colon + 1)));
}

SupportProfile::SupportProfile(int n, std::map<int, int> level_counts)
    : N(n), counts(std::move(level_counts)) {
    counts.erase(0);
}

int SupportProfile::count(int level) const {
    if (level == 0) return zeros();
    auto it = counts.find(level);
    return it == counts.end() ? 0 : it->second;
}

int SupportProfile::support() const {
    int k = 0;
    for (const auto& [level, c] : counts) k += c;
    return k;
}

int SupportProfile::extreme(const Alphabet& alphabet) const {
    int k = 0;
    for (int level : alphabet.extreme_levels()) k += count(level);
    return k;
}

int SupportProfile::interior(const Alphabet& alphabet) const {
    return support() - extreme(alphabet);
}

void SupportProfile::validate(const Alphabet& alphabet) const {
    if (N < 0) throw std::invalid_argument("profile: N must be nonnegative");
    for (const auto& [level, c] : counts) {
        if (!alphabet.contains(level)) {
            throw std::invalid_argument("profile level " + std::to_string(level) +
                                        " is not in alphabet " + alphabet.to_string());
        }
        if (c < 0) throw std::invalid_argument("profile counts must be nonnegative");
    }
    if (support() > N) {
        throw std::invalid_argument("profile counts (" + std::to_string(support()) +
                                    ") exceed N = " + std::to_string(N));
    }
}

Box Box::uniform(Eigen::Index n, double lo, double hi) {
    Box box{Vector::Constant(n, lo), Vector::Constant(n, hi)};
    box.validate();
    return box;
}

bool Box::contains(const Vector& x, double tol) const {
    if (x.size() != size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
    }
    return true;
}

Box Box::scaled(double beta) const {
    if (!(beta > 0)) throw std::invalid_argument("box scale must be positive");
    return Box{lower * beta, upper * beta};
}

void Box::validate() const {
    if (lower.size() != upper.size()) throw std::invalid_argument("box: bound sizes differ");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (std::isnan(lower[i]) || std::isnan(upper[i]) || lower[i] > upper[i] ||
            lower[i] == kInf || upper[i] == -kInf) {
            throw std::invalid_argument("box: invalid bounds at coordinate " + std::to_string(i));
        }
    }
}

std::pair<double, double> box_for(const Alphabet& alphabet) {
    return {static_cast<double>(alphabet.lower), static_cast<double>(alphabet.upper)};
}

Box box_for(const Alphabet& alphabet, Eigen::Index n) {
    const auto [lo, hi] = box_for(alphabet);
    return Box::uniform(n, lo, hi);
}

void RecoveryProblem::validate() const {
    if (A.rows() != b.size()) throw std::invalid_argument("A and b have inconsistent row counts");
    if (A.cols() != box.size()) throw std::invalid_argument("A and box have inconsistent sizes");
    if (!(eta >= 0)) throw std::invalid_argument("eta must be nonnegative");
    box.validate();
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "Optimal";
        case SolveStatus::Infeasible: return "Infeasible";
        case SolveStatus::ToleranceNotMet: return "ToleranceNotMet";
    }
    return "?";
}

const char* to_string(Uniqueness u) {
    switch (u) {
        case Uniqueness::Unique: return "Unique";
        case Uniqueness::NonUnique: return "NonUnique";
        case Uniqueness::NotChecked: return "NotChecked";
    }
    return "?";
}

Matrix sample_gaussian_matrix(Rng& rng, int m, int n) {
    if (m < 1 || n < 1) throw std::invalid_argument("matrix dimensions must be positive");
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
    Matrix A(m, n);
    // Row-major fill so that growing N keeps earlier rows' prefixes stable.
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) A(i, j) = normal(rng);
    }
    return A;
}

Signal sample_signal(Rng& rng, const Alphabet& alphabet, const SupportProfile& profile) {
    profile.validate(alphabet);
    const int n = profile.N;
    std::vector<int> positions(static_cast<std::size_t>(n));
    std::iota(positions.begin(), positions.end(), 0);
    std::shuffle(positions.begin(), positions.end(), rng);

    Signal s{std::vector<int>(static_cast<std::size_t>(n), 0), Vector::Zero(n)};
    std::size_t next = 0;
    for (const auto& [level, c] : profile.counts) {
        for (int t = 0; t < c; ++t) {
            const int pos = positions[next++];
            s.levels[static_cast<std::size_t>(pos)] = level;
            s.values[pos] = level;
        }
    }
    return s;
}

Vector sample_sphere(Rng& rng, Eigen::Index m, double radius) {
    std::normal_distribution<double> normal;
    Vector v(m);
    double norm = 0.0;
    do {
        for (Eigen::Index i = 0; i < m; ++i) v[i] = normal(rng);
        norm = v.norm();
    } while (norm == 0.0);
    return v * (radius / norm);
}

}  // namespace boxbp
