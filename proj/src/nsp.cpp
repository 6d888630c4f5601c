#include "boxbp/nsp.hpp"

#include "boxbp/io.hpp"
#include "boxbp/lp.hpp"
#include "boxbp/solver.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

namespace boxbp {

Matrix kernel_basis(const Matrix& A) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (n == 0) return Matrix(0, 0);
    if (m == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    const double smax = s.size() ? s[0] : 0.0;
    const double cut = 1e-12 * static_cast<double>(std::max(m, n)) * smax;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > cut) ++rank;
    }
    return svd.matrixV().rightCols(n - rank);
}

const char* to_string(NspKind k) {
    switch (k) {
        case NspKind::BNSP: return "bnsp";
        case NspKind::NSPplus: return "nspplus";
        case NspKind::BTNSP: return "btnsp";
        case NspKind::UFNSP: return "ufnsp";
        case NspKind::FNSP: return "fnsp";
    }
    return "?";
}

NspKind parse_nsp_kind(const std::string& name) {
    for (NspKind k : {NspKind::BNSP, NspKind::NSPplus, NspKind::BTNSP, NspKind::UFNSP, NspKind::FNSP}) {
        if (name == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown NSP kind '" + name + "'");
}

namespace {

std::vector<int> parse_index_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        const std::string tok = item.substr(b, e - b + 1);
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad index '" + tok + "'");
        }
        if (used != tok.size()) throw std::invalid_argument("bad index '" + tok + "'");
        if (v < 1) throw std::invalid_argument("indices are 1-based");
        out.push_back(v - 1);
    }
    return out;
}

std::vector<std::string> split_groups(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ';') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string join_one_based(const std::vector<int>& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(s[i] + 1);
    }
    return out;
}

std::vector<char> membership(int N, const std::vector<int>& s) {
    std::vector<char> in(static_cast<std::size_t>(N), 0);
    for (int i : s) in[static_cast<std::size_t>(i)] = 1;
    return in;
}

std::vector<int> effective_K(const NspQuery& q) {
    if (q.kind != NspKind::BTNSP) return q.K;
    std::vector<int> K = q.K_pos;
    K.insert(K.end(), q.K_neg.begin(), q.K_neg.end());
    std::sort(K.begin(), K.end());
    return K;
}

// Cone of one sign pattern:
//   sign[i] = -1: w_i <= 0;  +1: w_i >= 0;  0: free
//   aux_l1: sum_{i in aux} |w_i| + coef.w <= 0, otherwise coef.w <= 0
struct ConePiece {
    std::vector<int> sign;
    Vector coef;
    bool aux_l1 = false;
    std::vector<int> aux;
};

std::vector<ConePiece> cone_pieces(const NspQuery& q, int N) {
    const std::vector<int> K = effective_K(q);
    const auto inK = membership(N, K);
    ConePiece base;
    base.sign.assign(static_cast<std::size_t>(N), 0);
    base.coef = Vector::Zero(N);
    std::vector<int> complement;
    for (int i = 0; i < N; ++i) {
        if (!inK[static_cast<std::size_t>(i)]) complement.push_back(i);
    }

    switch (q.kind) {
        case NspKind::BNSP:
            for (int i = 0; i < N; ++i) base.sign[static_cast<std::size_t>(i)] = inK[static_cast<std::size_t>(i)] ? -1 : 1;
            base.coef.setOnes();
            return {base};
        case NspKind::NSPplus:
            for (int i : complement) base.sign[static_cast<std::size_t>(i)] = 1;
            base.coef.setOnes();
            return {base};
        case NspKind::UFNSP:
            for (int i : complement) base.sign[static_cast<std::size_t>(i)] = 1;
            for (int i : q.K_top) base.sign[static_cast<std::size_t>(i)] = -1;
            base.coef.setOnes();
            return {base};
        case NspKind::BTNSP:
            base.aux_l1 = true;
            base.aux = complement;
            for (int i : q.K_pos) {
                base.sign[static_cast<std::size_t>(i)] = -1;
                base.coef[i] = 1.0;
            }
            for (int i : q.K_neg) {
                base.sign[static_cast<std::size_t>(i)] = 1;
                base.coef[i] = -1.0;
            }
            return {base};
        case NspKind::FNSP: {
            base.aux_l1 = true;
            base.aux = complement;
            const auto top = membership(N, q.K_top);
            const auto neg = membership(N, q.K_neg);
            std::vector<int> hat;
            for (int i : K) {
                if (top[static_cast<std::size_t>(i)]) {
                    base.sign[static_cast<std::size_t>(i)] = -1;
                    base.coef[i] = 1.0;
                } else if (neg[static_cast<std::size_t>(i)]) {
                    base.sign[static_cast<std::size_t>(i)] = 1;
                    base.coef[i] = -1.0;
                } else {
                    hat.push_back(i);
                }
            }
            if (hat.size() > static_cast<std::size_t>(kMaxSignEnumeration)) {
                throw ComplexityRefused("F-NSP check needs 2^" + std::to_string(hat.size()) +
                                        " sign patterns (limit 2^" +
                                        std::to_string(kMaxSignEnumeration) + ")");
            }
            std::vector<ConePiece> out;
            const std::uint64_t patterns = std::uint64_t{1} << hat.size();
            out.reserve(patterns);
            for (std::uint64_t p = 0; p < patterns; ++p) {
                ConePiece c = base;
                for (std::size_t t = 0; t < hat.size(); ++t) {
                    const int s = ((p >> t) & 1U) ? -1 : 1;
                    c.sign[static_cast<std::size_t>(hat[t])] = s;
                    c.coef[hat[t]] = -s;
                }
                out.push_back(std::move(c));
            }
            return out;
        }
    }
    return {};
}

// Feasibility of { alpha : w = V alpha in piece, normal.w = 1 }.
std::optional<Vector> find_in_piece(const Matrix& V, const ConePiece& c, const Vector& normal) {
    const Eigen::Index N = V.rows();
    const Eigen::Index d = V.cols();
    const Eigen::Index na = c.aux_l1 ? static_cast<Eigen::Index>(c.aux.size()) : 0;
    lp::LpProblem p = lp::LpProblem::with_bounds(d + na, -kInf, kInf);
    for (Eigen::Index t = 0; t < na; ++t) p.lower[d + t] = 0.0;

    Vector row(d + na);
    for (Eigen::Index i = 0; i < N; ++i) {
        const int s = c.sign[static_cast<std::size_t>(i)];
        if (s == 0) continue;
        row.setZero();
        row.head(d) = -s * V.row(i).transpose();
        p.add_inequality(row, 0.0);
    }
    for (Eigen::Index t = 0; t < na; ++t) {
        const Eigen::Index i = c.aux[static_cast<std::size_t>(t)];
        for (double s : {1.0, -1.0}) {
            row.setZero();
            row.head(d) = s * V.row(i).transpose();
            row[d + t] = -1.0;
            p.add_inequality(row, 0.0);
        }
    }
    row.setZero();
    row.head(d) = V.transpose() * c.coef;
    for (Eigen::Index t = 0; t < na; ++t) row[d + t] = 1.0;
    p.add_inequality(row, 0.0);

    row.setZero();
    row.head(d) = V.transpose() * normal;
    if (row.lpNorm<Eigen::Infinity>() == 0.0) return std::nullopt;
    p.add_equality(row, 1.0);

    const lp::LpResult r = lp::lp_solve(p);
    if (r.status == lp::LpStatus::Infeasible) return std::nullopt;
    if (r.status != lp::LpStatus::Optimal) {
        throw std::runtime_error(std::string("check_nsp: LP ") + lp::to_string(r.status));
    }
    return Vector(V * r.x.head(d));
}

}  // namespace

void NspQuery::validate(int N) const {
    auto check_range = [N](const std::vector<int>& s, const char* name) {
        std::vector<int> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw std::invalid_argument(std::string(name) + " has repeated indices");
        }
        for (int i : s) {
            if (i < 0 || i >= N) {
                throw std::invalid_argument(std::string(name) + " index " + std::to_string(i + 1) +
                                            " out of range 1.." + std::to_string(N));
            }
        }
    };
    auto check_subset = [N](const std::vector<int>& s, const std::vector<int>& K, const char* name) {
        const auto inK = membership(N, K);
        for (int i : s) {
            if (!inK[static_cast<std::size_t>(i)]) {
                throw std::invalid_argument(std::string(name) + " must be a subset of K");
            }
        }
    };
    auto check_disjoint = [N](const std::vector<int>& a, const std::vector<int>& b) {
        const auto in = membership(N, a);
        for (int i : b) {
            if (in[static_cast<std::size_t>(i)]) throw std::invalid_argument("sets must be disjoint");
        }
    };
    switch (kind) {
        case NspKind::BNSP:
        case NspKind::NSPplus:
            check_range(K, "K");
            break;
        case NspKind::BTNSP:
            check_range(K_pos, "K_1");
            check_range(K_neg, "K_-1");
            check_disjoint(K_pos, K_neg);
            break;
        case NspKind::UFNSP:
            check_range(K, "K");
            check_range(K_top, "K_L");
            check_subset(K_top, K, "K_L");
            break;
        case NspKind::FNSP:
            check_range(K, "K");
            check_range(K_top, "K_L2");
            check_range(K_neg, "K_-L1");
            check_subset(K_top, K, "K_L2");
            check_subset(K_neg, K, "K_-L1");
            check_disjoint(K_top, K_neg);
            break;
    }
}

std::string NspQuery::sets_string() const {
    switch (kind) {
        case NspKind::BNSP:
        case NspKind::NSPplus: return join_one_based(K);
        case NspKind::BTNSP: return join_one_based(K_pos) + ";" + join_one_based(K_neg);
        case NspKind::UFNSP: return join_one_based(K) + ";" + join_one_based(K_top);
        case NspKind::FNSP:
            return join_one_based(K) + ";" + join_one_based(K_top) + ";" + join_one_based(K_neg);
    }
    return {};
}

NspQuery NspQuery::parse(NspKind kind, const std::string& sets) {
    const auto groups = split_groups(sets);
    NspQuery q;
    q.kind = kind;
    auto need = [&](std::size_t n) {
        if (groups.size() != n) {
            throw std::invalid_argument(std::string(to_string(kind)) + " expects " + std::to_string(n) +
                                        " ';'-separated index set(s)");
        }
    };
    switch (kind) {
        case NspKind::BNSP:
        case NspKind::NSPplus:
            need(1);
            q.K = parse_index_list(groups[0]);
            break;
        case NspKind::BTNSP:
            need(2);
            q.K_pos = parse_index_list(groups[0]);
            q.K_neg = parse_index_list(groups[1]);
            break;
        case NspKind::UFNSP:
            need(2);
            q.K = parse_index_list(groups[0]);
            q.K_top = parse_index_list(groups[1]);
            break;
        case NspKind::FNSP:
            need(3);
            q.K = parse_index_list(groups[0]);
            q.K_top = parse_index_list(groups[1]);
            q.K_neg = parse_index_list(groups[2]);
            break;
    }
    return q;
}

NspVerdict check_nsp(const Matrix& A, const NspQuery& q) {
    const int N = static_cast<int>(A.cols());
    q.validate(N);
    const Matrix V = kernel_basis(A);
    if (V.cols() == 0) return {};
    const std::vector<int> K = effective_K(q);

    for (const ConePiece& c : cone_pieces(q, N)) {
        bool all_fixed = true;
        for (int i : K) all_fixed = all_fixed && c.sign[static_cast<std::size_t>(i)] != 0;

        std::vector<Vector> normals;
        if (all_fixed) {
            // A nonzero cone element is nonzero on K, and K carries fixed signs.
            Vector n = Vector::Zero(N);
            for (int i : K) n[i] = c.sign[static_cast<std::size_t>(i)];
            if (!K.empty()) normals.push_back(n);
        } else {
            for (int j : K) {
                const int s = c.sign[static_cast<std::size_t>(j)];
                for (int t : {1, -1}) {
                    if (s != 0 && s != t) continue;
                    Vector n = Vector::Zero(N);
                    n[j] = t;
                    normals.push_back(n);
                }
            }
        }
        for (const Vector& n : normals) {
            if (auto w = find_in_piece(V, c, n)) {
                const double scale = w->lpNorm<Eigen::Infinity>();
                return {false, Vector(*w / scale)};
            }
        }
    }
    return {};
}

bool in_nsp_cone(const NspQuery& q, const Vector& w, double tol) {
    const int N = static_cast<int>(w.size());
    if (w.lpNorm<Eigen::Infinity>() <= tol) return false;
    const std::vector<int> K = effective_K(q);
    const auto inK = membership(N, K);
    double l1_K = 0.0;
    double l1_Kc = 0.0;
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
        (inK[static_cast<std::size_t>(i)] ? l1_K : l1_Kc) += std::abs(w[i]);
        sum += w[i];
    }
    auto all = [&](const std::vector<int>& s, int sign) {
        return std::all_of(s.begin(), s.end(), [&](int i) { return sign * w[i] >= -tol; });
    };
    std::vector<int> Kc;
    for (int i = 0; i < N; ++i) {
        if (!inK[static_cast<std::size_t>(i)]) Kc.push_back(i);
    }
    switch (q.kind) {
        case NspKind::BNSP: return all(K, -1) && all(Kc, 1) && l1_K >= l1_Kc - tol;
        case NspKind::NSPplus: return all(Kc, 1) && sum <= tol;
        case NspKind::BTNSP: return all(q.K_pos, -1) && all(q.K_neg, 1) && l1_K >= l1_Kc - tol;
        case NspKind::UFNSP: return all(q.K_top, -1) && all(Kc, 1) && sum <= tol;
        case NspKind::FNSP: return all(q.K_top, -1) && all(q.K_neg, 1) && l1_K >= l1_Kc - tol;
    }
    return false;
}

std::string verdict_json(const NspVerdict& v, const NspQuery& q, Eigen::Index m, Eigen::Index N) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(q.kind);
    j["holds"] = v.holds;
    if (v.witness) {
        j["witness"] = std::vector<double>(v.witness->data(), v.witness->data() + v.witness->size());
    }
    j["sets"] = q.sets_string();
    j["m"] = m;
    j["N"] = N;
    return j.dump();
}

// ---------------------------------------------------------------------------
// Crosscheck
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kLines = {"bnsp",   "nspplus", "pplus_support",   "btnsp",
                                         "ufnsp",  "uf_interior", "fnsp", "fnsp_all_signs"};

// x0 is the unique minimizer of the box program with b = A x0.
bool uniquely_recovered(const Matrix& A, const Box& box, const Vector& x0) {
    const Vector b = A * x0;
    const SolveResult r = solve_box_bp(A, b, box);
    if (!r.optimal()) return false;
    const double v = r.objective;
    if (x0.lpNorm<1>() > v + 1e-7 * (1.0 + std::abs(v))) return false;
    return check_unique(A, b, box, x0) == Uniqueness::Unique;
}

std::vector<int> random_subset(Rng& rng, int N, int k) {
    std::vector<int> idx(static_cast<std::size_t>(N));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = N - 1; i > 0; --i) {
        const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    std::sort(idx.begin(), idx.end());
    return idx;
}

struct LineOutcome {
    bool agree = true;
    bool holds = false;
    std::string detail;
};

nlohmann::ordered_json describe_json(const Matrix& A, const NspQuery& q, const Vector& x0, bool nsp,
                                     bool rec) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(q.kind);
    j["sets"] = q.sets_string();
    j["nsp_holds"] = nsp;
    j["recovered"] = rec;
    j["x0"] = std::vector<double>(x0.data(), x0.data() + x0.size());
    j["A"] = io::format_matrix_csv(A);
    return j;
}

std::string describe(const Matrix& A, const NspQuery& q, const Vector& x0, bool nsp, bool rec) {
    return describe_json(A, q, x0, nsp, rec).dump();
}

std::vector<LineOutcome> run_trial(const Rng& rng, int trial, int m, int N, int k_fixed) {
    Rng r = rng.substream(static_cast<std::uint64_t>(trial), 0xC405CECCULL);
    const Matrix A = sample_gaussian_matrix(r, m, N);
    const int k = k_fixed > 0 ? k_fixed : (N > 1 ? 1 + static_cast<int>(r() % static_cast<std::uint64_t>(N - 1)) : 1);
    std::vector<LineOutcome> out(kLines.size());
    const Box unit = Box::uniform(N, 0.0, 1.0);

    auto indicator = [N](const std::vector<int>& s) {
        Vector x = Vector::Zero(N);
        for (int i : s) x[i] = 1.0;
        return x;
    };
    auto record = [&](std::size_t line, bool nsp, bool rec, const NspQuery& q, const Vector& x0) {
        out[line].holds = nsp;
        out[line].agree = nsp == rec;
        if (!out[line].agree) out[line].detail = describe(A, q, x0, nsp, rec);
    };

    {  // bnsp
        NspQuery q{NspKind::BNSP, random_subset(r, N, k), {}, {}, {}};
        const Vector x0 = indicator(q.K);
        record(0, check_nsp(A, q).holds, uniquely_recovered(A, unit, x0), q, x0);
    }
    {  // nspplus and pplus_support share one support
        NspQuery q{NspKind::NSPplus, random_subset(r, N, k), {}, {}, {}};
        const bool nsp = check_nsp(A, q).holds;
        bool binary_all = true;
        const std::uint64_t subsets = std::uint64_t{1} << q.K.size();
        for (std::uint64_t s = 1; s < subsets && binary_all; ++s) {
            std::vector<int> S;
            for (std::size_t t = 0; t < q.K.size(); ++t) {
                if ((s >> t) & 1U) S.push_back(q.K[t]);
            }
            binary_all = uniquely_recovered(A, unit, indicator(S));
        }
        bool probes_all = true;
        Vector probe = Vector::Zero(N);
        for (int t = 0; t < 20; ++t) {
            for (int i : q.K) probe[i] = r.uniform01();
            if (probes_all) probes_all = uniquely_recovered(A, unit, probe);
        }
        out[1].holds = nsp;
        out[1].agree = nsp == binary_all && nsp == probes_all;
        if (!out[1].agree) {
            auto j = describe_json(A, q, indicator(q.K), nsp, binary_all);
            j["probes_recovered"] = probes_all;
            out[1].detail = j.dump();
        }

        const Box nonneg = Box::nonnegative(N);
        const bool support_unique = uniquely_recovered(A, nonneg, indicator(q.K));
        bool positive_all = true;
        for (int t = 0; t < 20; ++t) {
            for (int i : q.K) probe[i] = 0.05 + 2.0 * r.uniform01();
            if (positive_all) positive_all = uniquely_recovered(A, nonneg, probe);
        }
        out[2].holds = support_unique;
        out[2].agree = support_unique == positive_all;
        if (!out[2].agree) out[2].detail = describe(A, q, indicator(q.K), support_unique, positive_all);
    }
    {  // btnsp
        const std::vector<int> K = random_subset(r, N, k);
        NspQuery q;
        q.kind = NspKind::BTNSP;
        Vector x0 = Vector::Zero(N);
        for (int i : K) {
            if (r() & 1U) {
                q.K_pos.push_back(i);
                x0[i] = 1.0;
            } else {
                q.K_neg.push_back(i);
                x0[i] = -1.0;
            }
        }
        record(3, check_nsp(A, q).holds, uniquely_recovered(A, Box::uniform(N, -1.0, 1.0), x0), q, x0);
    }
    {  // ufnsp and uf_interior
        const int L = 2 + static_cast<int>(r() % 2);
        NspQuery q{NspKind::UFNSP, random_subset(r, N, k), {}, {}, {}};
        Vector x0 = Vector::Zero(N);
        for (int i : q.K) {
            const int level = 1 + static_cast<int>(r() % static_cast<std::uint64_t>(L));
            x0[i] = level;
            if (level == L) q.K_top.push_back(i);
        }
        const Box box = Box::uniform(N, 0.0, L);
        const bool rec = uniquely_recovered(A, box, x0);
        record(4, check_nsp(A, q).holds, rec, q, x0);

        bool probes_all = true;
        Vector probe = x0;
        for (int t = 0; t < 20; ++t) {
            for (int i : q.K) {
                if (x0[i] != L) probe[i] = L * (0.02 + 0.96 * r.uniform01());
            }
            if (probes_all) probes_all = uniquely_recovered(A, box, probe);
        }
        out[5].holds = rec;
        out[5].agree = rec == probes_all;
        if (!out[5].agree) out[5].detail = describe(A, q, x0, rec, probes_all);
    }
    {  // fnsp and fnsp_all_signs
        const int L1 = 1 + static_cast<int>(r() % 2);
        const int L2 = 1 + static_cast<int>(r() % 2);
        NspQuery q{NspKind::FNSP, random_subset(r, N, k), {}, {}, {}};
        std::vector<int> levels;
        for (int l = -L1; l <= L2; ++l) {
            if (l != 0) levels.push_back(l);
        }
        Vector x0 = Vector::Zero(N);
        std::vector<int> hat;
        for (int i : q.K) {
            const int level = levels[static_cast<std::size_t>(r() % levels.size())];
            x0[i] = level;
            if (level == L2) {
                q.K_top.push_back(i);
            } else if (level == -L1) {
                q.K_neg.push_back(i);
            } else {
                hat.push_back(i);
            }
        }
        const Box box = Box::uniform(N, -L1, L2);
        const bool nsp = check_nsp(A, q).holds;
        record(6, nsp, uniquely_recovered(A, box, x0), q, x0);

        bool all_signs = true;
        const std::uint64_t patterns = std::uint64_t{1} << hat.size();
        for (std::uint64_t p = 0; p < patterns && all_signs; ++p) {
            Vector xs = x0;
            for (std::size_t t = 0; t < hat.size(); ++t) xs[hat[t]] = ((p >> t) & 1U) ? -0.5 : 0.5;
            all_signs = uniquely_recovered(A, box, xs);
        }
        out[7].holds = nsp;
        out[7].agree = nsp == all_signs;
        if (!out[7].agree) out[7].detail = describe(A, q, x0, nsp, all_signs);
    }
    return out;
}

}  // namespace

bool CrosscheckReport::all_agree() const {
    return std::all_of(lines.begin(), lines.end(), [](const CrosscheckLine& l) { return l.all_agree(); });
}

const CrosscheckLine* CrosscheckReport::find(const std::string& name) const {
    for (const auto& l : lines) {
        if (l.name == name) return &l;
    }
    return nullptr;
}

std::string CrosscheckReport::to_json() const {
    nlohmann::ordered_json j;
    j["m"] = m;
    j["N"] = N;
    j["k"] = k;
    j["lines"] = nlohmann::ordered_json::array();
    for (const auto& l : lines) {
        nlohmann::ordered_json e;
        e["name"] = l.name;
        e["trials"] = l.trials;
        e["agreements"] = l.agreements;
        e["property_holds"] = l.property_holds;
        e["counterexamples"] = nlohmann::ordered_json::array();
        for (const auto& c : l.counterexamples) e["counterexamples"].push_back(nlohmann::ordered_json::parse(c));
        j["lines"].push_back(e);
    }
    j["all_agree"] = all_agree();
    return j.dump(2);
}

CrosscheckReport nsp_recovery_crosscheck(const Rng& rng, int trials, int m, int N, int k, int threads) {
    if (m < 1 || N < 2 || N > 10) throw std::invalid_argument("crosscheck needs m >= 1 and 2 <= N <= 10");
    if (k < 0 || k > N) throw std::invalid_argument("crosscheck support size out of range");
    if (trials < 0) throw std::invalid_argument("trials must be nonnegative");

    std::vector<std::vector<LineOutcome>> results(static_cast<std::size_t>(trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < trials; t = next++) {
            results[static_cast<std::size_t>(t)] = run_trial(rng, t, m, N, k);
        }
    };
    const int n_threads = std::max(1, std::min(threads, trials));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    CrosscheckReport rep;
    rep.m = m;
    rep.N = N;
    rep.k = k;
    for (std::size_t l = 0; l < kLines.size(); ++l) {
        CrosscheckLine line;
        line.name = kLines[l];
        for (const auto& res : results) {
            ++line.trials;
            if (res[l].agree) {
                ++line.agreements;
            } else if (line.counterexamples.size() < 5) {
                line.counterexamples.push_back(res[l].detail);
            }
            if (res[l].holds) ++line.property_holds;
        }
        rep.lines.push_back(std::move(line));
    }
    return rep;
}

}  // namespace boxbp
