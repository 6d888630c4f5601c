#pragma once

#include "boxbp/core.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace boxbp {

/// Orthonormal basis of ker(A) (N x d).  Singular values at or below
/// 1e-12 * max(m, N) * sigma_max count as zero.
Matrix kernel_basis(const Matrix& A);

enum class NspKind { BNSP, NSPplus, BTNSP, UFNSP, FNSP };
const char* to_string(NspKind k);
NspKind parse_nsp_kind(const std::string& name);  // bnsp|nspplus|btnsp|ufnsp|fnsp

/// Index sets are 0-based.  Which fields are used depends on the kind:
///   BNSP, NSPplus: K
///   BTNSP: K_pos (K_1), K_neg (K_-1); K is their union
///   UFNSP: K, K_top (K_L, a subset of K)
///   FNSP:  K, K_top (K_L2), K_neg (K_-L1); K_top and K_neg disjoint subsets of K
struct NspQuery {
    NspKind kind = NspKind::BNSP;
    std::vector<int> K;
    std::vector<int> K_top;
    std::vector<int> K_pos;
    std::vector<int> K_neg;

    /// Throws std::invalid_argument when sets are out of range, overlap where
    /// they must not, or are not contained in K.
    void validate(int N) const;
    /// Sets in the command-line order, 1-based, groups separated by ';'.
    std::string sets_string() const;
    /// Parses the command-line form: bnsp/nspplus "K"; btnsp "K1;K-1";
    /// ufnsp "K;K_L"; fnsp "K;K_L2;K_-L1".  Indices are 1-based.
    static NspQuery parse(NspKind kind, const std::string& sets);
};

struct NspVerdict {
    bool holds = true;
    /// Nonzero kernel vector inside the cone, scaled to max-norm 1.
    std::optional<Vector> witness;
};

class ComplexityRefused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxSignEnumeration = 20;

/// Decides ker(A) meets the cone of the query only at 0.  Exact up to LP
/// tolerances; throws ComplexityRefused for FNSP with |K \ (K_L2 u K_-L1)| > 20.
NspVerdict check_nsp(const Matrix& A, const NspQuery& q);

/// Re-evaluates the cone membership of w directly from the definitions.
bool in_nsp_cone(const NspQuery& q, const Vector& w, double tol);

/// {"kind":..,"holds":..,"witness":[..]?,"sets":"..","m":..,"N":..}
std::string verdict_json(const NspVerdict& v, const NspQuery& q, Eigen::Index m, Eigen::Index N);

struct CrosscheckLine {
    std::string name;
    int trials = 0;
    int agreements = 0;
    int property_holds = 0;
    std::vector<std::string> counterexamples;

    bool all_agree() const { return agreements == trials; }
};

struct CrosscheckReport {
    int m = 0;
    int N = 0;
    int k = 0;  // 0 means a random support size per trial
    std::vector<CrosscheckLine> lines;

    bool all_agree() const;
    const CrosscheckLine* find(const std::string& name) const;
    std::string to_json() const;
};

/// For random Gaussian A and random supports, compares each NSP checker with
/// uniqueness certificates of the matching program.  Lines:
///   bnsp            B-NSP(K) vs unique recovery of 1_K by the [0,1] program
///   nspplus         NSP+(K) vs every binary x on K vs 20 random [0,1] x on K
///   pplus_support   1_K unique for min ||x||_1, x >= 0 vs 20 positive x on K
///   btnsp           BT-NSP vs unique recovery of 1_K1 - 1_K-1 on [-1,1]
///   ufnsp           UF-NSP vs unique recovery of x0 in {0..L}^N, L in {2,3}
///   uf_interior     x0 unique vs 20 interior-valued x_hat with the same K_L
///   fnsp            F-NSP vs unique recovery of x0 in {-L1..L2}^N, L1, L2 in {1,2}
///   fnsp_all_signs  F-NSP vs unique recovery for every sign pattern on K_hat
/// Trials run on `threads` workers with per-trial substreams; the report does
/// not depend on the thread count.  Requires N <= 10.
CrosscheckReport nsp_recovery_crosscheck(const Rng& rng, int trials, int m, int N, int k,
                                         int threads = 1);

}  // namespace boxbp
