#pragma once

#include "boxbp/core.hpp"

#include <utility>

namespace boxbp::lp {

inline constexpr double kFeasTol = 1e-9;
inline constexpr double kObjTol = 1e-8;

/// min c.x  s.t.  A_eq x = b_eq,  A_ineq x <= b_ineq,  lower <= x <= upper.
/// Bounds may be infinite.  Empty constraint blocks are 0 x n matrices.
struct LpProblem {
    Vector c;
    Matrix A_eq;
    Vector b_eq;
    Matrix A_ineq;
    Vector b_ineq;
    Vector lower;
    Vector upper;

    /// Zero objective, no constraints, bounds [lo, hi] on n variables.
    static LpProblem with_bounds(Eigen::Index n, double lo, double hi);

    Eigen::Index num_vars() const { return c.size(); }
    void add_equality(const Vector& row, double rhs);
    void add_inequality(const Vector& row, double rhs);
    /// Throws std::invalid_argument on inconsistent dimensions or bounds.
    void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };
const char* to_string(LpStatus s);

struct LpResult {
    LpStatus status = LpStatus::NumericalFailure;
    Vector x;
    double objective = 0.0;
    /// Unbounded: a direction d with A_eq d = 0, A_ineq d <= 0, d respecting
    /// the recession cone of the bounds, and c.d < 0.
    Vector ray;
    /// Infeasible: multipliers y on [A_eq; A_ineq] with farkas_gap(p, y) > 0.
    Vector farkas;
    int iterations = 0;
};

struct LpOptions {
    double feas_tol = kFeasTol;
    double obj_tol = kObjTol;
    /// Dantzig pricing switches to Bland's rule after this many iterations
    /// in a phase; negative means 5 * (rows + columns).
    int bland_after = -1;
};

/// Dense bounded-variable two-phase primal simplex.
LpResult lp_solve(const LpProblem& p, const LpOptions& opts = {});

/// Phase one only.
bool lp_feasible(const LpProblem& p, const LpOptions& opts = {});

/// y.b - sup { y.(Ax) : x in bounds, slack >= 0 } for multipliers on
/// [A_eq; A_ineq].  A positive value certifies that p is infeasible.
double farkas_gap(const LpProblem& p, const Vector& y);

/// min/max of functional.x over { x feasible for p, c.x <= v_opt + face_tol }.
std::pair<double, double> range_on_optimal_face(const LpProblem& p, double v_opt,
                                                const Vector& functional,
                                                double face_tol = kObjTol);

/// min/max of x_j over the (tolerance-widened) optimal face.
std::pair<double, double> coordinate_range_on_optimal_face(const LpProblem& p, double v_opt,
                                                           Eigen::Index j,
                                                           double face_tol = kObjTol);

}  // namespace boxbp::lp
