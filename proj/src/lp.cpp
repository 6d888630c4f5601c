#include "boxbp/lp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace boxbp::lp {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

constexpr double kPivotTol = 1e-11;
constexpr double kHarrisTol = 1e-11;
constexpr double kDualTol = 1e-9;
constexpr int kReinvertEvery = 100;

// x_j = offset_j + sum(sign * x'_col) over the entries of map[j].
struct Term {
    Index col;
    double sign;
};

// Standard form: base * x' = rhs, 0 <= x' <= ub, rhs >= 0, every row scaled
// to unit max-norm.  The last `rows` columns are artificials (an identity).
struct Standard {
    Index n_orig = 0;
    Index n_total = 0;  // structural + slack columns
    Index rows = 0;
    Index width = 0;    // n_total + rows
    std::vector<std::vector<Term>> map;
    Vector offset;
    RowMatrix base;
    Vector rhs;
    Vector ub;
    Vector cost;        // phase-two cost, scaled to unit max-norm
    Vector row_mult;    // standard row i = row_mult[i] * original row i
};

Standard standardize(const LpProblem& p) {
    Standard s;
    const Index n = p.num_vars();
    const Index m_eq = p.A_eq.rows();
    const Index m_in = p.A_ineq.rows();
    s.n_orig = n;
    s.rows = m_eq + m_in;
    s.map.resize(static_cast<std::size_t>(n));
    s.offset = Vector::Zero(n);

    std::vector<double> ub;
    for (Index j = 0; j < n; ++j) {
        const double lo = p.lower[j], hi = p.upper[j];
        auto& terms = s.map[static_cast<std::size_t>(j)];
        if (std::isfinite(lo)) {
            s.offset[j] = lo;
            terms.push_back({static_cast<Index>(ub.size()), 1.0});
            ub.push_back(hi - lo);
        } else if (std::isfinite(hi)) {
            s.offset[j] = hi;
            terms.push_back({static_cast<Index>(ub.size()), -1.0});
            ub.push_back(kInf);
        } else {
            terms.push_back({static_cast<Index>(ub.size()), 1.0});
            ub.push_back(kInf);
            terms.push_back({static_cast<Index>(ub.size()), -1.0});
            ub.push_back(kInf);
        }
    }
    const Index n_struct = static_cast<Index>(ub.size());
    s.n_total = n_struct + m_in;
    s.width = s.n_total + s.rows;
    s.base = RowMatrix::Zero(s.rows, s.width);
    s.rhs = Vector::Zero(s.rows);
    s.ub = Vector::Zero(s.width);
    for (Index j = 0; j < n_struct; ++j) s.ub[j] = ub[static_cast<std::size_t>(j)];
    for (Index j = n_struct; j < s.width; ++j) s.ub[j] = kInf;

    for (Index i = 0; i < s.rows; ++i) {
        const bool eq = i < m_eq;
        const auto row = eq ? p.A_eq.row(i) : p.A_ineq.row(i - m_eq);
        double b = eq ? p.b_eq[i] : p.b_ineq[i - m_eq];
        for (Index j = 0; j < n; ++j) {
            b -= row[j] * s.offset[j];
            for (const Term& t : s.map[static_cast<std::size_t>(j)]) {
                s.base(i, t.col) = t.sign * row[j];
            }
        }
        if (!eq) s.base(i, n_struct + (i - m_eq)) = 1.0;
        s.rhs[i] = b;
    }

    s.row_mult = Vector::Ones(s.rows);
    for (Index i = 0; i < s.rows; ++i) {
        const double scale = s.base.row(i).head(s.n_total).cwiseAbs().maxCoeff();
        double mult = scale > 0 ? 1.0 / scale : 1.0;
        if (s.rhs[i] * mult < 0) mult = -mult;
        s.base.row(i).head(s.n_total) *= mult;
        s.rhs[i] *= mult;
        s.row_mult[i] = mult;
        s.base(i, s.n_total + i) = 1.0;
    }

    s.cost = Vector::Zero(s.width);
    for (Index j = 0; j < n; ++j) {
        for (const Term& t : s.map[static_cast<std::size_t>(j)]) s.cost[t.col] = t.sign * p.c[j];
    }
    const double cmax = s.cost.cwiseAbs().maxCoeff();
    if (cmax > 0) s.cost /= cmax;
    return s;
}

enum class Outcome { Optimal, Unbounded, IterationLimit, Singular };

class Simplex {
public:
    Simplex(const Standard& s, const Vector& rhs) : s_(s), rhs_(rhs) {
        ub_ = s.ub;
        excluded_.assign(static_cast<std::size_t>(s.width), 0);
        at_upper_.assign(static_cast<std::size_t>(s.width), 0);
        row_of_.assign(static_cast<std::size_t>(s.width), -1);
        basis_.resize(static_cast<std::size_t>(s.rows));
        for (Index i = 0; i < s.rows; ++i) {
            basis_[static_cast<std::size_t>(i)] = s.n_total + i;
            row_of_[static_cast<std::size_t>(s.n_total + i)] = i;
        }
    }

    void set_cost(const Vector& c) {
        cost_ = c;
        price();
    }

    void set_rhs(const Vector& rhs) { rhs_ = rhs; }

    bool reinvert() {
        Matrix B(s_.rows, s_.rows);
        for (Index i = 0; i < s_.rows; ++i) B.col(i) = s_.base.col(basis_[static_cast<std::size_t>(i)]);
        Vector r = rhs_;
        for (Index j = 0; j < s_.width; ++j) {
            if (at_upper_[static_cast<std::size_t>(j)]) r -= ub_[j] * s_.base.col(j);
        }
        if (s_.rows > 0) {
            Eigen::PartialPivLU<Matrix> lu(B);
            if (!(lu.rcond() > 1e-14)) return false;
            T_ = lu.solve(Matrix(s_.base));
            beta_ = lu.solve(r);
        } else {
            T_.resize(0, s_.width);
            beta_.resize(0);
        }
        since_reinvert_ = 0;
        if (cost_.size() == s_.width) price();
        return true;
    }

    // Phase two: artificials may no longer move; try to pivot basic ones out.
    void retire_artificials() {
        for (Index j = s_.n_total; j < s_.width; ++j) {
            excluded_[static_cast<std::size_t>(j)] = 1;
            ub_[j] = 0.0;
        }
        for (Index r = 0; r < s_.rows; ++r) {
            const Index bv = basis_[static_cast<std::size_t>(r)];
            if (bv < s_.n_total) continue;
            Index best = -1;
            double best_abs = 1e-7;
            for (Index j = 0; j < s_.n_total; ++j) {
                if (row_of_[static_cast<std::size_t>(j)] >= 0) continue;
                if (std::abs(T_(r, j)) > best_abs) {
                    best_abs = std::abs(T_(r, j));
                    best = j;
                }
            }
            if (best < 0) continue;
            const double value = at_upper_[static_cast<std::size_t>(best)] ? ub_[best] : 0.0;
            pivot(r, best);
            at_upper_[static_cast<std::size_t>(best)] = 0;
            beta_[r] = value;
        }
    }

    Outcome run(int bland_after, int max_iter, bool force_bland, int& iterations) {
        int in_phase = 0;
        while (true) {
            if (in_phase >= max_iter) return Outcome::IterationLimit;
            if (since_reinvert_ >= kReinvertEvery && !reinvert()) return Outcome::Singular;
            const bool bland = force_bland || in_phase >= bland_after;

            Index q = -1;
            double dir = 0.0, best_score = 0.0;
            for (Index j = 0; j < s_.width; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                if (row_of_[uj] >= 0 || excluded_[uj] || !(ub_[j] > 0)) continue;
                const double dj = d_[j];
                double score = 0.0, dj_dir = 0.0;
                if (!at_upper_[uj] && dj < -kDualTol) {
                    score = -dj;
                    dj_dir = 1.0;
                } else if (at_upper_[uj] && dj > kDualTol) {
                    score = dj;
                    dj_dir = -1.0;
                } else {
                    continue;
                }
                if (bland) {
                    q = j;
                    dir = dj_dir;
                    break;
                }
                if (score > best_score) {
                    best_score = score;
                    q = j;
                    dir = dj_dir;
                }
            }
            if (q < 0) return Outcome::Optimal;

            Index leave = -1;
            bool leave_to_upper = false;
            double theta = ub_[q];
            if (bland) {
                for (Index i = 0; i < s_.rows; ++i) {
                    const double a = dir * T_(i, q);
                    if (std::abs(a) <= kPivotTol) continue;
                    const Index bv = basis_[static_cast<std::size_t>(i)];
                    double lim;
                    bool to_upper;
                    if (a > 0) {
                        lim = std::max(beta_[i], 0.0) / a;
                        to_upper = false;
                    } else {
                        if (!std::isfinite(ub_[bv])) continue;
                        lim = std::max(ub_[bv] - beta_[i], 0.0) / -a;
                        to_upper = true;
                    }
                    const bool tie = std::abs(lim - theta) <= 1e-12;
                    if (lim < theta - 1e-12 ||
                        (tie && leave >= 0 && bv < basis_[static_cast<std::size_t>(leave)])) {
                        theta = lim;
                        leave = i;
                        leave_to_upper = to_upper;
                    }
                }
            } else {
                // Harris two-pass ratio test.
                double relaxed = ub_[q];
                for (Index i = 0; i < s_.rows; ++i) {
                    const double a = dir * T_(i, q);
                    if (std::abs(a) <= kPivotTol) continue;
                    const Index bv = basis_[static_cast<std::size_t>(i)];
                    if (a > 0) {
                        relaxed = std::min(relaxed, (beta_[i] + kHarrisTol) / a);
                    } else if (std::isfinite(ub_[bv])) {
                        relaxed = std::min(relaxed, (ub_[bv] - beta_[i] + kHarrisTol) / -a);
                    }
                }
                double best_abs = 0.0;
                for (Index i = 0; i < s_.rows; ++i) {
                    const double a = dir * T_(i, q);
                    if (std::abs(a) <= kPivotTol) continue;
                    const Index bv = basis_[static_cast<std::size_t>(i)];
                    double lim;
                    bool to_upper;
                    if (a > 0) {
                        lim = beta_[i] / a;
                        to_upper = false;
                    } else {
                        if (!std::isfinite(ub_[bv])) continue;
                        lim = (ub_[bv] - beta_[i]) / -a;
                        to_upper = true;
                    }
                    if (lim <= relaxed && std::abs(a) > best_abs) {
                        best_abs = std::abs(a);
                        leave = i;
                        leave_to_upper = to_upper;
                        theta = std::max(lim, 0.0);
                    }
                }
                if (leave >= 0 && ub_[q] <= theta) {
                    leave = -1;
                    theta = ub_[q];
                }
            }

            if (!std::isfinite(theta)) {
                unbounded_col_ = q;
                unbounded_dir_ = dir;
                return Outcome::Unbounded;
            }

            ++iterations;
            ++in_phase;
            if (theta != 0.0) beta_ -= (theta * dir) * T_.col(q);
            const auto uq = static_cast<std::size_t>(q);
            if (leave < 0) {
                at_upper_[uq] = !at_upper_[uq];
                continue;
            }
            const double entering = (at_upper_[uq] ? ub_[q] : 0.0) + dir * theta;
            const Index bv = basis_[static_cast<std::size_t>(leave)];
            pivot(leave, q);
            at_upper_[static_cast<std::size_t>(bv)] = leave_to_upper ? 1 : 0;
            at_upper_[uq] = 0;
            beta_[leave] = entering;
        }
    }

    // Standard-form point for the current basis.
    Vector point() const {
        Vector x = Vector::Zero(s_.width);
        for (Index j = 0; j < s_.width; ++j) {
            if (at_upper_[static_cast<std::size_t>(j)]) x[j] = ub_[j];
        }
        for (Index i = 0; i < s_.rows; ++i) x[basis_[static_cast<std::size_t>(i)]] = beta_[i];
        return x;
    }

    double artificial_infeasibility() const {
        double worst = 0.0;
        for (Index i = 0; i < s_.rows; ++i) {
            if (basis_[static_cast<std::size_t>(i)] >= s_.n_total) worst = std::max(worst, beta_[i]);
        }
        return worst;
    }

    // Standard-form recession direction found by the last Unbounded outcome.
    Vector ray() const {
        Vector d = Vector::Zero(s_.width);
        d[unbounded_col_] = unbounded_dir_;
        for (Index i = 0; i < s_.rows; ++i) {
            d[basis_[static_cast<std::size_t>(i)]] = -unbounded_dir_ * T_(i, unbounded_col_);
        }
        return d;
    }

    // Phase-one row duals: y_i = cost(art_i) - d(art_i) with unit artificial cost.
    Vector phase_one_duals() const {
        Vector y(s_.rows);
        for (Index i = 0; i < s_.rows; ++i) y[i] = 1.0 - d_[s_.n_total + i];
        return y;
    }

    bool primal_feasible(double tol) const {
        for (Index i = 0; i < s_.rows; ++i) {
            const Index bv = basis_[static_cast<std::size_t>(i)];
            if (beta_[i] < -tol || beta_[i] > ub_[bv] + tol) return false;
        }
        return true;
    }

private:
    void price() {
        Vector cb(s_.rows);
        for (Index i = 0; i < s_.rows; ++i) cb[i] = cost_[basis_[static_cast<std::size_t>(i)]];
        d_ = cost_ - T_.transpose() * cb;
    }

    void pivot(Index r, Index q) {
        const double piv = T_(r, q);
        T_.row(r) /= piv;
        for (Index i = 0; i < s_.rows; ++i) {
            if (i == r) continue;
            const double f = T_(i, q);
            if (f != 0.0) T_.row(i) -= f * T_.row(r);
        }
        const double f = d_[q];
        if (f != 0.0) d_ -= f * T_.row(r).transpose();
        const Index old = basis_[static_cast<std::size_t>(r)];
        row_of_[static_cast<std::size_t>(old)] = -1;
        basis_[static_cast<std::size_t>(r)] = q;
        row_of_[static_cast<std::size_t>(q)] = r;
        ++since_reinvert_;
    }

    const Standard& s_;
    Vector rhs_;
    RowMatrix T_;
    Vector beta_;
    Vector cost_;
    Vector d_;
    Vector ub_;
    std::vector<Index> basis_;
    std::vector<Index> row_of_;
    std::vector<char> at_upper_;
    std::vector<char> excluded_;
    int since_reinvert_ = 0;
    Index unbounded_col_ = -1;
    double unbounded_dir_ = 0.0;
};

Vector to_original(const Standard& s, const Vector& xs, bool direction) {
    Vector x = direction ? Vector::Zero(s.n_orig) : Vector(s.offset);
    for (Index j = 0; j < s.n_orig; ++j) {
        for (const Term& t : s.map[static_cast<std::size_t>(j)]) x[j] += t.sign * xs[t.col];
    }
    return x;
}

bool satisfies(const LpProblem& p, const Standard& s, const Vector& x, double tol) {
    for (Index j = 0; j < x.size(); ++j) {
        const double slack = tol * (1.0 + std::abs(x[j]));
        if (x[j] < p.lower[j] - slack || x[j] > p.upper[j] + slack) return false;
    }
    const Index m_eq = p.A_eq.rows();
    for (Index i = 0; i < s.rows; ++i) {
        const bool eq = i < m_eq;
        const auto row = eq ? p.A_eq.row(i) : p.A_ineq.row(i - m_eq);
        const double b = eq ? p.b_eq[i] : p.b_ineq[i - m_eq];
        const double mult = std::abs(s.row_mult[i]);
        const double lhs = row.dot(x);
        const double scale = 1.0 + mult * (std::abs(b) + row.cwiseAbs().dot(x.cwiseAbs()));
        const double viol = mult * (lhs - b);
        if (eq ? std::abs(viol) > tol * scale : viol > tol * scale) return false;
    }
    return true;
}

LpResult attempt(const LpProblem& p, const Standard& s, const LpOptions& opts, bool phase_one_only,
                 bool robust) {
    LpResult res;
    Vector rhs = s.rhs;
    if (robust) {
        // Deterministic tiny right-hand-side perturbation against stalling.
        Rng rng(0x5eedULL);
        for (Index i = 0; i < s.rows; ++i) rhs[i] += 1e-10 * (1.0 + std::abs(rhs[i])) * rng.uniform01();
    }
    Simplex sx(s, rhs);
    const int size = static_cast<int>(s.rows + s.width);
    const int bland_after = opts.bland_after >= 0 ? opts.bland_after : 5 * size;
    const int max_iter = 50 * size + 1000;

    if (!sx.reinvert()) return res;
    Vector phase1 = Vector::Zero(s.width);
    phase1.tail(s.rows).setOnes();
    sx.set_cost(phase1);
    Outcome out = sx.run(bland_after, max_iter, robust, res.iterations);
    if (out != Outcome::Optimal) return res;
    if (!sx.reinvert()) return res;

    const double infeas_tol = opts.feas_tol * (1.0 + (s.rows ? s.rhs.cwiseAbs().maxCoeff() : 0.0));
    if (sx.artificial_infeasibility() > infeas_tol) {
        res.status = LpStatus::Infeasible;
        res.farkas = sx.phase_one_duals().cwiseProduct(s.row_mult);
        return res;
    }
    if (phase_one_only) {
        res.status = LpStatus::Optimal;
        res.x = to_original(s, sx.point(), false);
        return res;
    }

    sx.retire_artificials();
    sx.set_cost(s.cost);
    out = sx.run(bland_after, max_iter, robust, res.iterations);
    if (out == Outcome::Unbounded) {
        Vector ray = to_original(s, sx.ray(), true);
        const double norm = ray.cwiseAbs().maxCoeff();
        if (!(norm > 0) || !(p.c.dot(ray) < 0)) return res;
        res.status = LpStatus::Unbounded;
        res.ray = ray / norm;
        return res;
    }
    if (out != Outcome::Optimal) return res;
    if (robust) sx.set_rhs(s.rhs);
    if (!sx.reinvert()) return res;
    if (!sx.primal_feasible(opts.feas_tol * (1.0 + s.rhs.cwiseAbs().sum()))) return res;

    Vector x = to_original(s, sx.point(), false);
    x = x.cwiseMax(p.lower).cwiseMin(p.upper);
    if (!satisfies(p, s, x, opts.feas_tol)) return res;
    res.status = LpStatus::Optimal;
    res.x = x;
    res.objective = p.c.dot(x);
    return res;
}

LpResult solve_impl(const LpProblem& p, const LpOptions& opts, bool phase_one_only) {
    p.validate();
    for (Index j = 0; j < p.num_vars(); ++j) {
        if (p.lower[j] > p.upper[j]) {
            LpResult r;
            r.status = LpStatus::Infeasible;
            r.farkas = Vector::Zero(p.A_eq.rows() + p.A_ineq.rows());
            return r;
        }
    }
    const Standard s = standardize(p);
    LpResult r = attempt(p, s, opts, phase_one_only, false);
    if (r.status != LpStatus::NumericalFailure) return r;
    const int first = r.iterations;
    r = attempt(p, s, opts, phase_one_only, true);
    r.iterations += first;
    return r;
}

}  // namespace

LpProblem LpProblem::with_bounds(Eigen::Index n, double lo, double hi) {
    LpProblem p;
    p.c = Vector::Zero(n);
    p.A_eq.resize(0, n);
    p.b_eq.resize(0);
    p.A_ineq.resize(0, n);
    p.b_ineq.resize(0);
    p.lower = Vector::Constant(n, lo);
    p.upper = Vector::Constant(n, hi);
    return p;
}

void LpProblem::add_equality(const Vector& row, double rhs) {
    if (row.size() != num_vars()) throw std::invalid_argument("equality row has wrong length");
    A_eq.conservativeResize(A_eq.rows() + 1, num_vars());
    A_eq.row(A_eq.rows() - 1) = row.transpose();
    b_eq.conservativeResize(b_eq.size() + 1);
    b_eq[b_eq.size() - 1] = rhs;
}

void LpProblem::add_inequality(const Vector& row, double rhs) {
    if (row.size() != num_vars()) throw std::invalid_argument("inequality row has wrong length");
    A_ineq.conservativeResize(A_ineq.rows() + 1, num_vars());
    A_ineq.row(A_ineq.rows() - 1) = row.transpose();
    b_ineq.conservativeResize(b_ineq.size() + 1);
    b_ineq[b_ineq.size() - 1] = rhs;
}

void LpProblem::validate() const {
    const Index n = num_vars();
    auto fail = [](const std::string& what) { throw std::invalid_argument("LpProblem: " + what); };
    if (A_eq.cols() != n && !(A_eq.rows() == 0)) fail("A_eq has wrong column count");
    if (A_ineq.cols() != n && !(A_ineq.rows() == 0)) fail("A_ineq has wrong column count");
    if (A_eq.rows() != b_eq.size()) fail("A_eq and b_eq disagree");
    if (A_ineq.rows() != b_ineq.size()) fail("A_ineq and b_ineq disagree");
    if (lower.size() != n || upper.size() != n) fail("bounds have wrong length");
    for (Index j = 0; j < n; ++j) {
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] == kInf || upper[j] == -kInf) {
            fail("invalid bound at variable " + std::to_string(j));
        }
    }
    if (!c.allFinite() || !A_eq.allFinite() || !A_ineq.allFinite() || !b_eq.allFinite() ||
        !b_ineq.allFinite()) {
        fail("non-finite data");
    }
}

const char* to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "Optimal";
        case LpStatus::Infeasible: return "Infeasible";
        case LpStatus::Unbounded: return "Unbounded";
        case LpStatus::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

LpResult lp_solve(const LpProblem& p, const LpOptions& opts) {
    LpProblem q = p;
    if (q.A_eq.rows() == 0) q.A_eq.resize(0, p.num_vars());
    if (q.A_ineq.rows() == 0) q.A_ineq.resize(0, p.num_vars());
    return solve_impl(q, opts, false);
}

bool lp_feasible(const LpProblem& p, const LpOptions& opts) {
    LpProblem q = p;
    if (q.A_eq.rows() == 0) q.A_eq.resize(0, p.num_vars());
    if (q.A_ineq.rows() == 0) q.A_ineq.resize(0, p.num_vars());
    const LpResult r = solve_impl(q, opts, true);
    if (r.status == LpStatus::NumericalFailure) {
        throw std::runtime_error("lp_feasible: numerical failure");
    }
    return r.status == LpStatus::Optimal;
}

double farkas_gap(const LpProblem& p, const Vector& y) {
    const Index m_eq = p.A_eq.rows(), m_in = p.A_ineq.rows();
    if (y.size() != m_eq + m_in) throw std::invalid_argument("farkas_gap: wrong multiplier length");
    const double ymax = y.size() ? y.cwiseAbs().maxCoeff() : 0.0;
    const double tol = 1e-9 * std::max(ymax, 1e-300);
    for (Index i = 0; i < m_in; ++i) {
        if (y[m_eq + i] > tol) return -kInf;
    }
    Vector g = Vector::Zero(p.num_vars());
    double yb = 0.0;
    if (m_eq) {
        g += p.A_eq.transpose() * y.head(m_eq);
        yb += y.head(m_eq).dot(p.b_eq);
    }
    if (m_in) {
        g += p.A_ineq.transpose() * y.tail(m_in);
        yb += y.tail(m_in).dot(p.b_ineq);
    }
    double sup = 0.0;
    for (Index j = 0; j < g.size(); ++j) {
        if (std::abs(g[j]) <= tol) {
            // Treat as zero only when the corresponding bound is infinite.
            const double bound = g[j] > 0 ? p.upper[j] : p.lower[j];
            if (std::isfinite(bound)) sup += g[j] * bound;
            continue;
        }
        const double bound = g[j] > 0 ? p.upper[j] : p.lower[j];
        if (!std::isfinite(bound)) return -kInf;
        sup += g[j] * bound;
    }
    return yb - sup;
}

std::pair<double, double> range_on_optimal_face(const LpProblem& p, double v_opt,
                                                const Vector& functional, double face_tol) {
    if (functional.size() != p.num_vars()) {
        throw std::invalid_argument("range_on_optimal_face: functional has wrong length");
    }
    LpProblem q = p;
    if (q.A_ineq.rows() == 0) q.A_ineq.resize(0, p.num_vars());
    if (q.A_eq.rows() == 0) q.A_eq.resize(0, p.num_vars());
    q.add_inequality(p.c, v_opt + face_tol);
    double lo = -kInf, hi = kInf;
    for (int side = 0; side < 2; ++side) {
        q.c = side == 0 ? functional : Vector(-functional);
        const LpResult r = solve_impl(q, {}, false);
        if (r.status == LpStatus::Unbounded) continue;
        if (r.status != LpStatus::Optimal) {
            throw std::runtime_error(std::string("range_on_optimal_face: LP ") + to_string(r.status));
        }
        if (side == 0) {
            lo = r.objective;
        } else {
            hi = -r.objective;
        }
    }
    return {lo, hi};
}

std::pair<double, double> coordinate_range_on_optimal_face(const LpProblem& p, double v_opt,
                                                           Eigen::Index j, double face_tol) {
    if (j < 0 || j >= p.num_vars()) throw std::invalid_argument("coordinate index out of range");
    Vector e = Vector::Zero(p.num_vars());
    e[j] = 1.0;
    return range_on_optimal_face(p, v_opt, e, face_tol);
}

}  // namespace boxbp::lp
