#include "boxbp/solver.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace boxbp {

namespace {

void check_dims(const Matrix& A, const Vector& b, const Box& box) {
    if (A.rows() != b.size()) throw std::invalid_argument("A and b have inconsistent row counts");
    if (A.cols() != box.size()) throw std::invalid_argument("A and box have inconsistent sizes");
    box.validate();
}

SolveResult finish(const Matrix& A, const Vector& b, Vector x, SolveStatus status) {
    SolveResult r;
    r.status = status;
    if (x.size() == A.cols()) {
        r.objective = x.lpNorm<1>();
        r.equality_residual = (A * x - b).norm();
    }
    r.x = std::move(x);
    return r;
}

double soft(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

// Euclidean projection onto { z : ||Az - b||_2 <= eta } from a thin SVD of A.
class BallProjector {
public:
    BallProjector(const Matrix& A, const Vector& b, double eta) : A_(A), b_(b), eta_(eta) {
        Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Vector& s = svd.singularValues();
        const double smax = s.size() ? s[0] : 0.0;
        const double cut = 1e-12 * static_cast<double>(std::max(A.rows(), A.cols())) * smax;
        Eigen::Index r = 0;
        while (r < s.size() && s[r] > cut) ++r;
        sigma_ = s.head(r);
        V_ = svd.matrixV().leftCols(r);
        const Matrix U = svd.matrixU().leftCols(r);
        beta_ = U.transpose() * b;
        perp2_ = std::max(0.0, b.squaredNorm() - beta_.squaredNorm());
    }

    // Distance from b to range(A) already exceeds eta.
    bool empty() const { return perp2_ > eta_ * eta_ * (1.0 + 1e-12) + 1e-24; }

    Vector project(const Vector& z0) const {
        if ((A_ * z0 - b_).norm() <= eta_) return z0;
        const Vector w = V_.transpose() * z0;
        const Vector g = sigma_.cwiseProduct(w) - beta_;
        const Vector s2 = sigma_.cwiseAbs2();
        const double target = eta_ * eta_ - perp2_;
        auto f = [&](double mu) {
            return (g.array() / (1.0 + mu * s2.array())).square().sum() - target;
        };
        auto df = [&](double mu) {
            return (-2.0 * g.array().square() * s2.array() / (1.0 + mu * s2.array()).cube()).sum();
        };
        double mu;
        if (target <= 0) {
            mu = kInf;
        } else {
            double lo = 0.0, hi = 1.0;
            while (f(hi) > 0 && hi < 1e300) {
                lo = hi;
                hi *= 4.0;
            }
            mu = hi;
            for (int it = 0; it < 200; ++it) {
                const double fm = f(mu);
                if (fm > 0) {
                    lo = mu;
                } else {
                    hi = mu;
                }
                if (std::abs(fm) <= 1e-15 * eta_ * eta_ || hi - lo <= 1e-15 * hi) break;
                double next = mu - fm / df(mu);
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                mu = next;
            }
        }
        Vector zv(w.size());
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            zv[i] = std::isinf(mu) ? beta_[i] / sigma_[i]
                                   : (w[i] + mu * sigma_[i] * beta_[i]) / (1.0 + mu * s2[i]);
        }
        return z0 + V_ * (zv - w);
    }

private:
    const Matrix& A_;
    const Vector& b_;
    double eta_;
    Matrix V_;
    Vector sigma_;
    Vector beta_;
    double perp2_ = 0.0;
};

// min ||Ax - b||_2 over the box by accelerated projected gradient.
double box_least_squares(const Matrix& A, const Vector& b, const Box& box, int iters) {
    const double L = std::max(1e-300, Eigen::BDCSVD<Matrix>(A).singularValues()[0]);
    const double step = 1.0 / (L * L);
    auto clip = [&](const Vector& v) { return v.cwiseMax(box.lower).cwiseMin(box.upper); };
    Vector x = clip(Vector::Zero(A.cols()));
    Vector y = x;
    double t = 1.0;
    for (int k = 0; k < iters; ++k) {
        const Vector xn = clip(y - step * (A.transpose() * (A * y - b)));
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = xn + ((t - 1.0) / tn) * (xn - x);
        x = xn;
        t = tn;
    }
    return (A * x - b).norm();
}

}  // namespace

const char* to_string(ProgramKind k) {
    switch (k) {
        case ProgramKind::P1: return "P1";
        case ProgramKind::Pplus: return "Pplus";
        case ProgramKind::BoxEq: return "BoxEq";
        case ProgramKind::BoxDenoise: return "BoxDenoise";
        case ProgramKind::MirroredBinary: return "MirroredBinary";
    }
    return "?";
}

Vector BoxLp::to_x(const Vector& v) const {
    Vector x(static_cast<Eigen::Index>(pos.size()));
    for (std::size_t j = 0; j < pos.size(); ++j) {
        x[static_cast<Eigen::Index>(j)] = v[pos[j]] - (neg[j] >= 0 ? v[neg[j]] : 0.0);
    }
    return x;
}

Vector BoxLp::coordinate(Eigen::Index j) const {
    Vector f = Vector::Zero(problem.num_vars());
    const auto uj = static_cast<std::size_t>(j);
    f[pos[uj]] = 1.0;
    if (neg[uj] >= 0) f[neg[uj]] = -1.0;
    return f;
}

BoxLp box_bp_lp(const Matrix& A, const Vector& b, const Box& box) {
    check_dims(A, b, box);
    const Eigen::Index n = A.cols();
    BoxLp out;
    out.pos.assign(static_cast<std::size_t>(n), -1);
    out.neg.assign(static_cast<std::size_t>(n), -1);
    std::vector<double> cost, lo, hi;
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        const double l = box.lower[j], u = box.upper[j];
        out.pos[uj] = static_cast<Eigen::Index>(cost.size());
        if (l >= 0) {
            cost.push_back(1.0);
            lo.push_back(l);
            hi.push_back(u);
        } else if (u <= 0) {
            cost.push_back(-1.0);
            lo.push_back(l);
            hi.push_back(u);
        } else {
            cost.push_back(1.0);
            lo.push_back(0.0);
            hi.push_back(u);
            out.neg[uj] = static_cast<Eigen::Index>(cost.size());
            cost.push_back(1.0);
            lo.push_back(0.0);
            hi.push_back(-l);
        }
    }
    const auto nv = static_cast<Eigen::Index>(cost.size());
    lp::LpProblem& p = out.problem;
    p = lp::LpProblem::with_bounds(nv, 0.0, 0.0);
    p.c = Eigen::Map<const Vector>(cost.data(), nv);
    p.lower = Eigen::Map<const Vector>(lo.data(), nv);
    p.upper = Eigen::Map<const Vector>(hi.data(), nv);
    p.A_eq = Matrix::Zero(A.rows(), nv);
    p.b_eq = b;
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto uj = static_cast<std::size_t>(j);
        p.A_eq.col(out.pos[uj]) = A.col(j);
        if (out.neg[uj] >= 0) p.A_eq.col(out.neg[uj]) = -A.col(j);
    }
    return out;
}

SolveResult solve_box_bp(const Matrix& A, const Vector& b, const Box& box, bool certify_uniqueness) {
    const BoxLp blp = box_bp_lp(A, b, box);
    const lp::LpResult r = lp::lp_solve(blp.problem);
    if (r.status == lp::LpStatus::Infeasible) return finish(A, b, Vector(), SolveStatus::Infeasible);
    if (r.status != lp::LpStatus::Optimal) {
        return finish(A, b, Vector(), SolveStatus::ToleranceNotMet);
    }
    SolveResult res = finish(A, b, blp.to_x(r.x), SolveStatus::Optimal);
    if (certify_uniqueness) res.unique = check_unique(A, b, box, res.x);
    return res;
}

SolveResult solve_l1(const Matrix& A, const Vector& b, bool certify_uniqueness) {
    return solve_box_bp(A, b, Box::unbounded(A.cols()), certify_uniqueness);
}

SolveResult solve_positive_l1(const Matrix& A, const Vector& b, bool certify_uniqueness) {
    return solve_box_bp(A, b, Box::nonnegative(A.cols()), certify_uniqueness);
}

SolveResult solve_alphabet(const Matrix& A, const Vector& b, const Alphabet& alphabet,
                           bool certify_uniqueness) {
    if (alphabet.is_negative_unipolar()) {
        SolveResult r = solve_box_bp(A, -b, box_for(alphabet.reflected(), A.cols()), certify_uniqueness);
        if (r.x.size()) r.x = -r.x;
        return r;
    }
    return solve_box_bp(A, b, box_for(alphabet, A.cols()), certify_uniqueness);
}

SolveResult solve_box_bp_denoise(const Matrix& A, const Vector& b, double eta, const Box& box,
                                 const DenoiseOptions& opts) {
    check_dims(A, b, box);
    if (!(eta >= 0)) throw std::invalid_argument("eta must be nonnegative");
    if (eta == 0.0) return solve_box_bp(A, b, box);

    const BallProjector ball(A, b, eta);
    if (ball.empty()) return finish(A, b, Vector(), SolveStatus::Infeasible);

    const Eigen::Index n = A.cols();
    auto prox = [&](const Vector& v, double t) {
        Vector x(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            x[j] = std::clamp(soft(v[j], t), box.lower[j], box.upper[j]);
        }
        return x;
    };

    double rho = opts.rho;
    Vector x = prox(Vector::Zero(n), 0.0);
    Vector z = ball.project(x);
    Vector u = Vector::Zero(n);
    bool converged = false;
    for (int k = 0; k < opts.max_iter; ++k) {
        x = prox(z - u, 1.0 / rho);
        const Vector z_old = z;
        z = ball.project(x + u);
        u += x - z;
        const double r_norm = (x - z).norm();
        const double s_norm = rho * (z - z_old).norm();
        if (r_norm < opts.tol && s_norm < opts.tol) {
            converged = true;
            break;
        }
        if (k % 20 == 19) {
            if (r_norm > 10.0 * s_norm) {
                rho *= 2.0;
                u /= 2.0;
            } else if (s_norm > 10.0 * r_norm) {
                rho /= 2.0;
                u *= 2.0;
            }
        }
    }

    const double residual = (A * x - b).norm();
    if (converged && residual <= eta + opts.feas_tol) return finish(A, b, x, SolveStatus::Optimal);
    if (box_least_squares(A, b, box, 20000) > eta + opts.feas_tol) {
        return finish(A, b, Vector(), SolveStatus::Infeasible);
    }
    return finish(A, b, x, SolveStatus::ToleranceNotMet);
}

SolveResult solve_mirrored_binary(const Matrix& A, const Vector& b, bool certify_uniqueness) {
    const Eigen::Index n = A.cols();
    const Vector ones = Vector::Ones(n);
    const Vector b_mirror = A * ones - b;
    SolveResult y = solve_box_bp(A, b_mirror, Box::uniform(n, 0.0, 1.0), certify_uniqueness);
    if (!y.optimal()) return finish(A, b, Vector(), y.status);
    SolveResult r = finish(A, b, ones - y.x, SolveStatus::Optimal);
    r.unique = y.unique;
    return r;
}

SolveResult recover_binary_auto(const Matrix& A, const Vector& b) {
    const SolveResult direct = solve_box_bp(A, b, Box::uniform(A.cols(), 0.0, 1.0));
    const SolveResult mirrored = solve_mirrored_binary(A, b);
    if (!direct.optimal() && !mirrored.optimal()) return direct;
    if (!direct.optimal()) return mirrored;
    if (!mirrored.optimal()) return direct;
    const Alphabet bin = Alphabet::binary();
    const double d1 = (direct.x - round_to_alphabet(direct.x, bin)).lpNorm<1>();
    const double d2 = (mirrored.x - round_to_alphabet(mirrored.x, bin)).lpNorm<1>();
    return d2 < d1 ? mirrored : direct;
}

Vector round_to_alphabet(const Vector& x, const Alphabet& alphabet) {
    Vector out(x.size());
    const double lo = alphabet.lower, hi = alphabet.upper;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double c = std::clamp(x[i], lo, hi);
        const double f = std::floor(c);
        const double frac = c - f;
        if (frac < 0.5) {
            out[i] = f;
        } else if (frac > 0.5) {
            out[i] = f + 1.0;
        } else {
            out[i] = std::abs(f) <= std::abs(f + 1.0) ? f : f + 1.0;
        }
    }
    return out;
}

Uniqueness check_unique(const Matrix& A, const Vector& b, const Box& box, const Vector& x_opt) {
    const BoxLp blp = box_bp_lp(A, b, box);
    if (x_opt.size() != A.cols()) throw std::invalid_argument("x_opt has wrong length");
    const lp::LpResult r = lp::lp_solve(blp.problem);
    if (r.status != lp::LpStatus::Optimal) {
        throw std::runtime_error(std::string("check_unique: LP ") + lp::to_string(r.status));
    }
    const double v = r.objective;
    if (x_opt.lpNorm<1>() > v + 1e-6 * (1.0 + std::abs(v))) {
        throw std::invalid_argument("check_unique: x_opt is not optimal");
    }
    const double face_tol = kUniqueFaceTol * std::max(1.0, std::abs(v));
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        const Vector f = blp.coordinate(j);
        const auto [lo, hi] = lp::range_on_optimal_face(blp.problem, v, f, face_tol);
        if (hi - lo <= kUniqueWidth) continue;
        // Confirm on the exact face; a widened face of an ill-conditioned
        // unique optimum grows in proportion to the widening.
        const auto [lo0, hi0] = lp::range_on_optimal_face(blp.problem, v, f, 0.0);
        if (hi0 - lo0 > kUniqueWidth) return Uniqueness::NonUnique;
    }
    return Uniqueness::Unique;
}

double relative_error(const Vector& x, const Vector& x0) {
    if (x.size() != x0.size()) return kInf;
    return (x - x0).norm() / std::max(1.0, x0.norm());
}

}  // namespace boxbp
