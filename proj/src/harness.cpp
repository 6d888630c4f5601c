#include "boxbp/harness.hpp"

#include "boxbp/io.hpp"
#include "boxbp/solver.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace boxbp {

using nlohmann::json;
using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

int Rational::of(int n) const {
    const long long p = num * n;
    // floor((2p + den) / (2 den)) for den > 0
    const long long twice = 2 * p + den;
    long long q = twice / (2 * den);
    if (twice % (2 * den) != 0 && twice < 0) --q;
    return static_cast<int>(q);
}

Rational Rational::parse(const std::string& text) {
    auto fail = [&] { throw std::invalid_argument("bad rational '" + text + "'"); };
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) fail();
    Rational r;
    const auto slash = s.find('/');
    if (slash != std::string::npos) {
        try {
            std::size_t u1 = 0, u2 = 0;
            r.num = std::stoll(s.substr(0, slash), &u1);
            r.den = std::stoll(s.substr(slash + 1), &u2);
            if (u1 != slash || u2 != s.size() - slash - 1) fail();
        } catch (const std::logic_error&) {
            fail();
        }
    } else {
        std::size_t i = 0;
        bool neg = false;
        if (s[i] == '-' || s[i] == '+') neg = s[i++] == '-';
        long long num = 0, den = 1;
        bool digits = false, dot = false;
        for (; i < s.size(); ++i) {
            const char c = s[i];
            if (c == '.' && !dot) {
                dot = true;
            } else if (c >= '0' && c <= '9') {
                digits = true;
                if (num > 1'000'000'000'000LL || den > 1'000'000'000'000LL) fail();
                num = num * 10 + (c - '0');
                if (dot) den *= 10;
            } else {
                fail();
            }
        }
        if (!digits) fail();
        r.num = neg ? -num : num;
        r.den = den;
    }
    if (r.den == 0) fail();
    if (r.den < 0) {
        r.den = -r.den;
        r.num = -r.num;
    }
    const long long g = std::gcd(r.num < 0 ? -r.num : r.num, r.den);
    if (g > 1) {
        r.num /= g;
        r.den /= g;
    }
    return r;
}

std::string Rational::to_string() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

const char* to_string(GridProgram p) {
    switch (p) {
        case GridProgram::Box: return "box";
        case GridProgram::Pplus: return "pplus";
        case GridProgram::L1: return "l1";
        case GridProgram::MirroredAuto: return "mirrored";
    }
    return "?";
}

GridProgram parse_grid_program(const std::string& name) {
    for (GridProgram p : {GridProgram::Box, GridProgram::Pplus, GridProgram::L1, GridProgram::MirroredAuto}) {
        if (name == to_string(p)) return p;
    }
    throw std::invalid_argument("unknown program '" + name + "'");
}

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

namespace {

Rational rational_from_json(const json& j) {
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    if (j.is_number_integer()) return {j.get<long long>(), 1};
    if (j.is_number()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.15g", j.get<double>());
        return Rational::parse(buf);
    }
    if (j.is_object() && j.contains("num") && j.contains("den")) {
        Rational r{j.at("num").get<long long>(), j.at("den").get<long long>()};
        return Rational::parse(r.to_string());
    }
    throw std::invalid_argument("expected a rational, got " + j.dump());
}

std::vector<Rational> fractions_from_json(const json& j, const char* name) {
    std::vector<Rational> out;
    if (j.is_array()) {
        for (const auto& e : j) out.push_back(rational_from_json(e));
        return out;
    }
    if (j.is_object() && j.contains("from")) {
        const Rational from = rational_from_json(j.at("from"));
        const Rational to = rational_from_json(j.at("to"));
        const Rational step = rational_from_json(j.at("step"));
        if (step.num <= 0) throw std::invalid_argument(std::string(name) + ": step must be positive");
        // from + i * step <= to, computed over the common denominator
        const long long den = from.den / std::gcd(from.den, step.den) * step.den;
        const long long a = from.num * (den / from.den);
        const long long s = step.num * (den / step.den);
        for (long long v = a; v * to.den <= to.num * den; v += s) {
            out.push_back(Rational::parse(std::to_string(v) + "/" + std::to_string(den)));
            if (out.size() > 100000) throw std::invalid_argument(std::string(name) + ": range too long");
        }
        return out;
    }
    throw std::invalid_argument(std::string(name) + " must be a list or a range object");
}

}  // namespace

PhaseGridConfig PhaseGridConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    static const char* known[] = {"N",   "alphabet", "k_fractions", "m_fractions", "level_ratio", "trials",
                                  "eta", "rounding", "seed",        "success_tol", "program",     "timing"};
    for (const auto& [key, _] : j.items()) {
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
            std::end(known)) {
            throw std::invalid_argument("config: unknown field '" + key + "'");
        }
    }
    PhaseGridConfig c;
    try {
        if (j.contains("N")) c.N = j.at("N").get<int>();
        if (j.contains("alphabet")) c.alphabet = Alphabet::parse(j.at("alphabet").get<std::string>());
        if (j.contains("k_fractions")) c.k_fractions = fractions_from_json(j.at("k_fractions"), "k_fractions");
        if (j.contains("m_fractions")) c.m_fractions = fractions_from_json(j.at("m_fractions"), "m_fractions");
        if (j.contains("level_ratio") && !j.at("level_ratio").is_null()) {
            c.level_ratio = j.at("level_ratio").get<double>();
        }
        if (j.contains("trials")) c.trials = j.at("trials").get<int>();
        if (j.contains("eta")) c.eta = j.at("eta").get<double>();
        if (j.contains("rounding")) c.rounding = j.at("rounding").get<bool>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("success_tol")) c.success_tol = j.at("success_tol").get<double>();
        if (j.contains("program")) c.program = parse_grid_program(j.at("program").get<std::string>());
        if (j.contains("timing")) c.timing = j.at("timing").get<bool>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

std::string PhaseGridConfig::to_json() const {
    ordered_json j;
    j["N"] = N;
    j["alphabet"] = alphabet.to_string();
    j["k_fractions"] = ordered_json::array();
    for (const auto& r : k_fractions) j["k_fractions"].push_back(r.to_string());
    j["m_fractions"] = ordered_json::array();
    for (const auto& r : m_fractions) j["m_fractions"].push_back(r.to_string());
    if (level_ratio) j["level_ratio"] = *level_ratio;
    j["trials"] = trials;
    j["eta"] = eta;
    j["rounding"] = rounding;
    j["seed"] = seed;
    j["success_tol"] = success_tol;
    j["program"] = to_string(program);
    j["timing"] = timing;
    return j.dump(2);
}

void PhaseGridConfig::validate() const {
    if (N < 1) throw std::invalid_argument("N must be positive");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (!(eta >= 0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be finite and >= 0");
    if (!(success_tol >= 0)) throw std::invalid_argument("success_tol must be >= 0");
    if (level_ratio && !(*level_ratio >= 0 && *level_ratio <= 1)) {
        throw std::invalid_argument("level_ratio must lie in [0, 1]");
    }
    for (const auto* list : {&k_fractions, &m_fractions}) {
        for (const Rational& r : *list) {
            if (!(r.num > 0 && r.num <= r.den)) {
                throw std::invalid_argument("fraction " + r.to_string() + " outside (0, 1]");
            }
        }
    }
    if (program == GridProgram::MirroredAuto) {
        if (alphabet != Alphabet::binary()) throw std::invalid_argument("mirrored program needs alphabet 0:1");
        if (eta > 0) throw std::invalid_argument("mirrored program is noiseless");
    }
    if (program == GridProgram::Pplus && alphabet.lower < 0) {
        throw std::invalid_argument("pplus program needs a nonnegative alphabet");
    }
}

std::vector<int> PhaseGridConfig::k_values() const {
    std::vector<int> out;
    for (const auto& r : k_fractions) out.push_back(r.of(N));
    return out;
}

std::vector<int> PhaseGridConfig::m_values() const {
    std::vector<int> out;
    for (const auto& r : m_fractions) out.push_back(r.of(N));
    return out;
}

std::string grid_variant(const PhaseGridConfig& cfg) {
    switch (cfg.program) {
        case GridProgram::Pplus: return "pplus";
        case GridProgram::L1: return "l1";
        case GridProgram::MirroredAuto: return "mirrored";
        case GridProgram::Box: break;
    }
    const Alphabet& a = cfg.alphabet;
    if (a == Alphabet::binary() || a == Alphabet::binary().reflected()) return "bin";
    if (a == Alphabet::ternary()) return "ter";
    return a.polarity() == Polarity::Unipolar ? "uf" : "bf";
}

// ---------------------------------------------------------------------------
// Grid runs
// ---------------------------------------------------------------------------

namespace {

struct TrialOutcome {
    bool success = false;
    bool failure = false;
    double rel_err = 0.0;
    double runtime_ms = 0.0;
};

struct LevelPlan {
    int interior = 0;  // -1: every entry uniform over the nonzero levels
    std::string detail;
};

LevelPlan level_plan(const PhaseGridConfig& cfg, int k) {
    const Alphabet& a = cfg.alphabet;
    const auto interior = a.interior_levels();
    if (interior.empty()) return {0, std::to_string(k)};
    if (!cfg.level_ratio) return {-1, "random"};
    const int k_hat = static_cast<int>(std::lround(*cfg.level_ratio * k));
    const std::string tail = a.polarity() == Polarity::Unipolar ? "k_L=" : "k_ext=";
    return {k_hat, "k_hat=" + std::to_string(k_hat) + ";" + tail + std::to_string(k - k_hat)};
}

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[static_cast<std::size_t>(rng() % v.size())];
}

Signal draw_signal(Rng& rng, const PhaseGridConfig& cfg, int k, const LevelPlan& plan) {
    const Alphabet& a = cfg.alphabet;
    std::vector<int> nonzero;
    for (int l = a.lower; l <= a.upper; ++l) {
        if (l != 0) nonzero.push_back(l);
    }
    const auto interior = a.interior_levels();
    const auto extreme = a.extreme_levels();
    std::map<int, int> counts;
    for (int t = 0; t < k; ++t) {
        int level = 0;
        if (plan.interior < 0) {
            level = pick(rng, nonzero);
        } else if (t < plan.interior) {
            level = pick(rng, interior);
        } else {
            level = extreme.size() == 1 ? extreme[0] : pick(rng, extreme);
        }
        ++counts[level];
    }
    return sample_signal(rng, a, SupportProfile(cfg.N, counts));
}

TrialOutcome run_trial(const PhaseGridConfig& cfg, int k, int m, int trial, const LevelPlan& plan,
                       bool noisy) {
    Rng rng = Rng(cfg.seed).substream((static_cast<std::uint64_t>(k) << 32) | static_cast<std::uint32_t>(m),
                                      static_cast<std::uint64_t>(trial));
    const Matrix A = sample_gaussian_matrix(rng, m, cfg.N);
    const Signal x0 = draw_signal(rng, cfg, k, plan);
    Vector b = A * x0.values;
    const bool denoise = noisy && cfg.eta > 0;
    if (denoise) b += sample_sphere(rng, m, cfg.eta);

    Box box = box_for(cfg.alphabet, cfg.N);
    if (cfg.program == GridProgram::Pplus) box = Box::nonnegative(cfg.N);
    if (cfg.program == GridProgram::L1) box = Box::unbounded(cfg.N);

    TrialOutcome out;
    SolveResult r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (cfg.program == GridProgram::MirroredAuto) {
            r = recover_binary_auto(A, b);
        } else if (denoise) {
            r = solve_box_bp_denoise(A, b, cfg.eta, box);
        } else {
            r = solve_box_bp(A, b, box);
        }
    } catch (const std::exception&) {
        out.failure = true;
    }
    if (cfg.timing) {
        out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
    if (out.failure || !r.optimal()) {
        out.failure = true;
        return out;
    }
    Vector x = r.x;
    if (cfg.rounding) {
        x = round_to_alphabet(x, cfg.alphabet);
        out.success = x == x0.values;
    }
    out.rel_err = relative_error(x, x0.values);
    if (!cfg.rounding) out.success = out.rel_err <= cfg.success_tol;
    return out;
}

PhaseTable run_impl(const PhaseGridConfig& cfg, std::vector<std::pair<int, int>> cells, int jobs,
                    bool noisy) {
    cfg.validate();
    for (const auto& [k, m] : cells) {
        if (k < 0 || k > cfg.N) throw std::invalid_argument("support size out of range");
        if (m < 1) throw std::invalid_argument("measurement count must be >= 1");
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());

    std::vector<LevelPlan> plans;
    for (const auto& [k, m] : cells) plans.push_back(level_plan(cfg, k));

    const long total = static_cast<long>(cells.size()) * cfg.trials;
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(total));
    std::atomic<long> next{0};
    auto worker = [&] {
        for (long t = next++; t < total; t = next++) {
            const auto c = static_cast<std::size_t>(t / cfg.trials);
            const int trial = static_cast<int>(t % cfg.trials);
            outcomes[static_cast<std::size_t>(t)] =
                run_trial(cfg, cells[c].first, cells[c].second, trial, plans[c], noisy);
        }
    };
    const int n_threads = static_cast<int>(std::max(1L, std::min<long>(jobs, total)));
    std::vector<std::thread> pool;
    for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    PhaseTable table;
    table.config = cfg;
    table.variant = grid_variant(cfg);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        PhaseCell cell;
        cell.k = cells[c].first;
        cell.m = cells[c].second;
        cell.k_detail = plans[c].detail;
        cell.trials = cfg.trials;
        double err = 0.0, time = 0.0;
        int solved = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            const TrialOutcome& o = outcomes[c * static_cast<std::size_t>(cfg.trials) + static_cast<std::size_t>(t)];
            time += o.runtime_ms;
            if (o.failure) {
                ++cell.failures;
                continue;
            }
            ++solved;
            err += o.rel_err;
            if (o.success) ++cell.successes;
        }
        cell.mean_rel_err = solved ? err / solved : std::nan("");
        cell.mean_runtime_ms = time / cfg.trials;
        table.cells.push_back(cell);
    }
    return table;
}

std::vector<std::pair<int, int>> grid_cells(const PhaseGridConfig& cfg) {
    std::vector<std::pair<int, int>> cells;
    for (int k : cfg.k_values()) {
        for (int m : cfg.m_values()) cells.emplace_back(k, m);
    }
    return cells;
}

}  // namespace

PhaseTable run_cells(const PhaseGridConfig& cfg, const std::vector<std::pair<int, int>>& cells, int jobs) {
    return run_impl(cfg, cells, jobs, cfg.eta > 0);
}

PhaseTable run_phase_grid(const PhaseGridConfig& cfg, int jobs) {
    return run_impl(cfg, grid_cells(cfg), jobs, false);
}

PhaseTable run_robustness_grid(const PhaseGridConfig& cfg, int jobs) {
    if (!(cfg.eta >= 0)) throw std::invalid_argument("eta must be >= 0");
    if (cfg.eta == 0) return run_phase_grid(cfg, jobs);
    return run_impl(cfg, grid_cells(cfg), jobs, true);
}

const PhaseCell* PhaseTable::find(int k, int m) const {
    for (const auto& c : cells) {
        if (c.k == k && c.m == m) return &c;
    }
    return nullptr;
}

std::string PhaseTable::to_csv() const {
    std::ostringstream os;
    int failures = 0;
    for (const auto& c : cells) failures += c.failures;
    os << "# program=" << to_string(config.program) << " alphabet=" << config.alphabet.to_string()
       << " eta=" << io::format_double(config.eta) << "\n";
    if (config.rounding) {
        os << "# success: rounded estimate equals x0\n";
    } else {
        os << "# success: ||x - x0||_2 / max(1, ||x0||_2) <= " << io::format_double(config.success_tol) << "\n";
    }
    os << "# solver_failures=" << failures << (config.timing ? "" : " timing=off") << "\n";
    os << kHeader << "\n";
    for (const auto& c : cells) {
        os << variant << ',' << config.N << ',' << c.k << ',' << c.k_detail << ',' << c.m << ','
           << io::format_double(config.eta) << ',' << c.trials << ',' << c.successes << ','
           << io::format_double(c.success_rate()) << ',' << io::format_double(c.mean_rel_err) << ','
           << io::format_double(c.mean_runtime_ms) << ',' << config.seed << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Theory overlay and transitions
// ---------------------------------------------------------------------------

CurveSpec overlay_spec(CurveVariant variant, int N, int k, double level_ratio) {
    const int k_hat = static_cast<int>(std::lround(level_ratio * k));
    switch (variant) {
        case CurveVariant::Bin: return CurveSpec::bin(N, k);
        case CurveVariant::BipolarTernary: return CurveSpec::ternary(N, k);
        case CurveVariant::PositiveL1: return CurveSpec::positive_l1(N, k);
        case CurveVariant::UnipolarFinite: return CurveSpec::unipolar_finite(N, k_hat, k - k_hat);
        case CurveVariant::BipolarFinite: {
            const int ext = k - k_hat;
            return CurveSpec::bipolar_finite(N, k_hat, ext / 2, ext - ext / 2);
        }
    }
    throw std::invalid_argument("unknown curve variant");
}

std::string emit_theory_overlay(CurveVariant variant, int N, double level_ratio) {
    if (N < 1) throw std::invalid_argument("N must be positive");
    if (!(level_ratio >= 0 && level_ratio <= 1)) throw std::invalid_argument("level_ratio must lie in [0, 1]");
    std::ostringstream os;
    os << "variant,N,level_ratio,k_over_N,delta_over_N\n";
    for (int i = 1; i <= 100; ++i) {
        const Rational f{i, 100};
        const int k = f.of(N);
        const DeltaResult d = delta_curve(overlay_spec(variant, N, k, level_ratio));
        os << to_string(variant) << ',' << N << ',' << io::format_double(level_ratio) << ','
           << io::format_double(static_cast<double>(k) / N) << ',' << io::format_double(d.delta / N) << "\n";
    }
    return os.str();
}

std::vector<TransitionPoint> empirical_transition_location(const PhaseTable& table, double level) {
    std::map<int, std::vector<const PhaseCell*>> by_k;
    for (const auto& c : table.cells) by_k[c.k].push_back(&c);
    std::vector<TransitionPoint> out;
    for (auto& [k, cells] : by_k) {
        std::sort(cells.begin(), cells.end(), [](auto* a, auto* b) { return a->m < b->m; });
        TransitionPoint p;
        p.k = k;
        if (k == 0) {
            p.m_star = 0.0;
            p.flag = "trivial";
            out.push_back(p);
            continue;
        }
        bool monotone = true;
        for (std::size_t i = 1; i < cells.size(); ++i) {
            if (cells[i]->success_rate() < cells[i - 1]->success_rate()) monotone = false;
        }
        p.m_star = std::nan("");
        p.flag = "not_reached";
        if (!cells.empty() && cells[0]->success_rate() >= level) {
            p.m_star = cells[0]->m;
            p.flag = "starts_above";
        } else {
            for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
                const double r0 = cells[i]->success_rate();
                const double r1 = cells[i + 1]->success_rate();
                if (r0 < level && r1 >= level) {
                    p.m_star = cells[i]->m + (level - r0) * (cells[i + 1]->m - cells[i]->m) / (r1 - r0);
                    p.flag = monotone ? "ok" : "nonmonotone";
                    break;
                }
            }
        }
        out.push_back(p);
    }
    return out;
}

std::string transition_csv(const std::vector<TransitionPoint>& points) {
    std::ostringstream os;
    os << "k,m_star,flag\n";
    for (const auto& p : points) {
        os << p.k << ',' << (std::isnan(p.m_star) ? std::string("nan") : io::format_double(p.m_star)) << ','
           << p.flag << "\n";
    }
    return os.str();
}

}  // namespace boxbp
