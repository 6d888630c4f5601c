#pragma once

// Brute-force LP reference: enumerate every basic solution of a bounded LP.

#include "boxbp/lp.hpp"

#include <Eigen/LU>

#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace boxbp::testing {

struct VertexOracleResult {
    bool feasible = false;
    double objective = 0.0;
    Vector x;
};

// Requires finite bounds on every variable.  A vertex is fixed by all
// equalities plus n - m_eq further active constraints (inequality rows or
// one bound per variable).
inline VertexOracleResult vertex_enumeration(const lp::LpProblem& p, double tol = 1e-9) {
    const Eigen::Index n = p.num_vars();
    const Eigen::Index m_eq = p.A_eq.rows();
    const Eigen::Index m_in = p.A_ineq.rows();
    VertexOracleResult best;
    if (m_eq > n) return best;

    // Candidate active constraints: inequality rows, then (var, side) bounds.
    struct Cand {
        int kind;  // 0 = ineq row, 1 = lower bound, 2 = upper bound
        Eigen::Index idx;
    };
    std::vector<Cand> cands;
    for (Eigen::Index i = 0; i < m_in; ++i) cands.push_back({0, i});
    for (Eigen::Index j = 0; j < n; ++j) {
        cands.push_back({1, j});
        cands.push_back({2, j});
    }
    const Eigen::Index need = n - m_eq;
    std::vector<std::size_t> pick;
    std::vector<char> var_used(static_cast<std::size_t>(n), 0);

    auto feasible = [&](const Vector& x) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (x[j] < p.lower[j] - tol || x[j] > p.upper[j] + tol) return false;
        }
        for (Eigen::Index i = 0; i < m_eq; ++i) {
            if (std::abs(p.A_eq.row(i).dot(x) - p.b_eq[i]) > tol * (1 + std::abs(p.b_eq[i]))) return false;
        }
        for (Eigen::Index i = 0; i < m_in; ++i) {
            if (p.A_ineq.row(i).dot(x) - p.b_ineq[i] > tol * (1 + std::abs(p.b_ineq[i]))) return false;
        }
        return true;
    };

    auto evaluate = [&]() {
        Matrix M(n, n);
        Vector r(n);
        for (Eigen::Index i = 0; i < m_eq; ++i) {
            M.row(i) = p.A_eq.row(i);
            r[i] = p.b_eq[i];
        }
        for (Eigen::Index t = 0; t < need; ++t) {
            const Cand& c = cands[pick[static_cast<std::size_t>(t)]];
            const Eigen::Index row = m_eq + t;
            if (c.kind == 0) {
                M.row(row) = p.A_ineq.row(c.idx);
                r[row] = p.b_ineq[c.idx];
            } else {
                M.row(row).setZero();
                M(row, c.idx) = 1.0;
                r[row] = c.kind == 1 ? p.lower[c.idx] : p.upper[c.idx];
            }
        }
        Eigen::FullPivLU<Matrix> lu(M);
        lu.setThreshold(1e-10);
        if (lu.rank() < n) return;
        const Vector x = lu.solve(r);
        if (!feasible(x)) return;
        const double obj = p.c.dot(x);
        if (!best.feasible || obj < best.objective) {
            best.feasible = true;
            best.objective = obj;
            best.x = x;
        }
    };

    auto recurse = [&](auto&& self, std::size_t start) -> void {
        if (static_cast<Eigen::Index>(pick.size()) == need) {
            evaluate();
            return;
        }
        for (std::size_t c = start; c < cands.size(); ++c) {
            const Cand& cand = cands[c];
            if (cand.kind != 0 && var_used[static_cast<std::size_t>(cand.idx)]) continue;
            if (cand.kind != 0) var_used[static_cast<std::size_t>(cand.idx)] = 1;
            pick.push_back(c);
            self(self, c + 1);
            pick.pop_back();
            if (cand.kind != 0) var_used[static_cast<std::size_t>(cand.idx)] = 0;
        }
    };
    recurse(recurse, 0);
    return best;
}

// Random LP with finite bounds, N <= 6 and at most 10 constraint rows.
template <class Gen>
lp::LpProblem random_bounded_lp(Gen& gen) {
    std::uniform_int_distribution<int> n_dist(1, 6);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = n_dist(gen);
    const int m_eq = std::uniform_int_distribution<int>(0, std::min(n, 3))(gen);
    const int m_in = std::uniform_int_distribution<int>(0, 10 - m_eq)(gen);
    lp::LpProblem p = lp::LpProblem::with_bounds(n, 0.0, 0.0);
    for (int j = 0; j < n; ++j) {
        const double lo = -2.0 * unit(gen);
        p.lower[j] = lo;
        p.upper[j] = lo + 0.1 + 2.0 * unit(gen);
        p.c[j] = normal(gen);
    }
    // Right-hand sides are centred on a point in the box so that a good share
    // of instances is feasible, then shifted to make others infeasible.
    Vector center(n);
    for (int j = 0; j < n; ++j) center[j] = p.lower[j] + unit(gen) * (p.upper[j] - p.lower[j]);
    const bool push_infeasible = unit(gen) < 0.25;
    for (int i = 0; i < m_eq; ++i) {
        Vector a(n);
        for (int j = 0; j < n; ++j) a[j] = normal(gen);
        p.add_equality(a, a.dot(center) + (push_infeasible ? 3.0 * normal(gen) : 0.0));
    }
    for (int i = 0; i < m_in; ++i) {
        Vector a(n);
        for (int j = 0; j < n; ++j) a[j] = normal(gen);
        p.add_inequality(a, a.dot(center) + (push_infeasible ? 0.5 * normal(gen) - 1.0 : 0.5 * std::abs(normal(gen))));
    }
    return p;
}

}  // namespace boxbp::testing
