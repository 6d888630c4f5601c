#pragma once

#include "boxbp/core.hpp"
#include "boxbp/lp.hpp"

namespace boxbp {

enum class ProgramKind { P1, Pplus, BoxEq, BoxDenoise, MirroredBinary };
const char* to_string(ProgramKind k);

/// Face tolerance used by check_unique: the optimal face is widened by this
/// amount times max(1, optimum).  Coordinates that look free on the widened
/// face are re-measured on the exact face before NonUnique is reported.
inline constexpr double kUniqueFaceTol = 1e-10;
/// A coordinate whose range over the optimal face exceeds this is free.
inline constexpr double kUniqueWidth = 1e-7;

/// min ||x||_1 s.t. Ax = b, x in box.  Coordinates whose box straddles 0 are
/// split into positive and negative parts; the others keep their sign.
SolveResult solve_box_bp(const Matrix& A, const Vector& b, const Box& box,
                         bool certify_uniqueness = false);

/// Classic basis pursuit (unbounded box) and its nonnegative variant.
SolveResult solve_l1(const Matrix& A, const Vector& b, bool certify_uniqueness = false);
SolveResult solve_positive_l1(const Matrix& A, const Vector& b, bool certify_uniqueness = false);

/// Box program over conv(alphabet).  Negative unipolar alphabets are solved
/// on the reflected problem and negated back.
SolveResult solve_alphabet(const Matrix& A, const Vector& b, const Alphabet& alphabet,
                           bool certify_uniqueness = false);

struct DenoiseOptions {
    double tol = 1e-8;
    int max_iter = 100000;
    double rho = 1.0;
    /// Accepted violation of ||Ax - b||_2 <= eta for the returned x.
    double feas_tol = 1e-6;
};

/// min ||x||_1 s.t. ||Ax - b||_2 <= eta, x in box.  ADMM on the splitting
/// x = z with x carrying l1 + box and z the measurement ball.
SolveResult solve_box_bp_denoise(const Matrix& A, const Vector& b, double eta, const Box& box,
                                 const DenoiseOptions& opts = {});

/// Solves A y = A 1 - b over [0,1]^N and returns 1 - y.
SolveResult solve_mirrored_binary(const Matrix& A, const Vector& b, bool certify_uniqueness = false);

/// Solves the direct and the mirrored binary program and keeps the candidate
/// closest to {0,1}^N in l1; ties keep the direct candidate.
SolveResult recover_binary_auto(const Matrix& A, const Vector& b);

/// Componentwise nearest alphabet level; ties go to the smaller magnitude.
Vector round_to_alphabet(const Vector& x, const Alphabet& alphabet);

/// Unique iff every coordinate varies by at most kUniqueWidth over the optimal
/// face of the box program.  Throws std::invalid_argument when x_opt is
/// clearly not optimal.
Uniqueness check_unique(const Matrix& A, const Vector& b, const Box& box, const Vector& x_opt);

/// LP form of the box program together with the linear map back to x.
struct BoxLp {
    lp::LpProblem problem;
    // x_j = v[pos_j] - (neg_j >= 0 ? v[neg_j] : 0)
    std::vector<Eigen::Index> pos;
    std::vector<Eigen::Index> neg;

    Vector to_x(const Vector& v) const;
    /// LP functional whose value is x_j.
    Vector coordinate(Eigen::Index j) const;
};
BoxLp box_bp_lp(const Matrix& A, const Vector& b, const Box& box);

/// Success rule shared with the harness: ||x - x0||_2 / max(1, ||x0||_2) <= tol.
double relative_error(const Vector& x, const Vector& x0);

}  // namespace boxbp
