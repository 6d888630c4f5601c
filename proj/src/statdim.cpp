#include "boxbp/statdim.hpp"
#include "boxbp/io.hpp"

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace boxbp {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kInvSqrt2 = 0.70710678118654752440;

// J = a (1 + tau^2) + l ML(tau) + u MU(tau).
struct Weights {
    double a, l, u;
};

Weights weights(const CurveSpec& s) {
    switch (s.variant) {
        case CurveVariant::Bin: return {0.0, double(s.k), double(s.N - s.k)};
        case CurveVariant::BipolarTernary: return {0.0, double(s.k), 2.0 * (s.N - s.k)};
        case CurveVariant::UnipolarFinite:
            return {double(s.k_hat), double(s.k_L), double(s.N - s.k_hat - s.k_L)};
        case CurveVariant::BipolarFinite:
            return {double(s.k_hat), double(s.k_neg + s.k_pos), 2.0 * s.k_zero};
        case CurveVariant::PositiveL1: return {double(s.k), 0.0, double(s.N - s.k)};
    }
    return {0, 0, 0};
}

// Admissible subgradient values s_i of one coordinate class.
enum class SubSet { AtLeastOne, AtMostOne, AtMostMinusOne, ExactlyOne, ExactlyMinusOne, Interval };

double sq_distance(SubSet set, double g, double tau) {
    double d = 0.0;
    switch (set) {
        case SubSet::AtLeastOne: d = std::max(tau - g, 0.0); break;
        case SubSet::AtMostOne: d = std::max(g - tau, 0.0); break;
        case SubSet::AtMostMinusOne: d = std::max(g + tau, 0.0); break;
        case SubSet::ExactlyOne: d = g - tau; break;
        case SubSet::ExactlyMinusOne: d = g + tau; break;
        case SubSet::Interval: d = std::max(std::abs(g) - tau, 0.0); break;
    }
    return d * d;
}

std::vector<std::pair<int, SubSet>> classes(const CurveSpec& s) {
    using P = std::pair<int, SubSet>;
    switch (s.variant) {
        case CurveVariant::Bin:
            return {P{s.k, SubSet::AtLeastOne}, P{s.N - s.k, SubSet::AtMostOne}};
        case CurveVariant::BipolarTernary:
            return {P{s.k - s.k / 2, SubSet::AtLeastOne}, P{s.k / 2, SubSet::AtMostMinusOne},
                    P{s.N - s.k, SubSet::Interval}};
        case CurveVariant::UnipolarFinite:
            return {P{s.k_hat, SubSet::ExactlyOne}, P{s.k_L, SubSet::AtLeastOne},
                    P{s.N - s.k_hat - s.k_L, SubSet::AtMostOne}};
        case CurveVariant::BipolarFinite:
            return {P{s.k_hat - s.k_hat / 2, SubSet::ExactlyOne},
                    P{s.k_hat / 2, SubSet::ExactlyMinusOne}, P{s.k_pos, SubSet::AtLeastOne},
                    P{s.k_neg, SubSet::AtMostMinusOne}, P{s.k_zero, SubSet::Interval}};
        case CurveVariant::PositiveL1:
            return {P{s.k, SubSet::ExactlyOne}, P{s.N - s.k, SubSet::AtMostOne}};
    }
    return {};
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double gaussian_lower_moment(double tau) {
    return (1.0 + tau * tau) * normal_cdf(tau) + tau * normal_pdf(tau);
}

double gaussian_upper_moment(double tau) {
    // 1 - Phi(tau) = Phi(-tau) keeps full relative accuracy in the tail.
    return (1.0 + tau * tau) * normal_cdf(-tau) - tau * normal_pdf(tau);
}

const char* to_string(CurveVariant v) {
    switch (v) {
        case CurveVariant::Bin: return "bin";
        case CurveVariant::BipolarTernary: return "ter";
        case CurveVariant::UnipolarFinite: return "uf";
        case CurveVariant::BipolarFinite: return "bf";
        case CurveVariant::PositiveL1: return "pplus";
    }
    return "?";
}

CurveVariant parse_curve_variant(const std::string& name) {
    for (CurveVariant v : {CurveVariant::Bin, CurveVariant::BipolarTernary, CurveVariant::UnipolarFinite,
                           CurveVariant::BipolarFinite, CurveVariant::PositiveL1}) {
        if (name == to_string(v)) return v;
    }
    throw std::invalid_argument("unknown curve variant '" + name + "' (expected bin|ter|uf|bf|pplus)");
}

CurveSpec CurveSpec::bin(int N, int k) {
    CurveSpec s;
    s.variant = CurveVariant::Bin;
    s.N = N;
    s.k = k;
    s.validate();
    return s;
}

CurveSpec CurveSpec::ternary(int N, int k) {
    CurveSpec s = bin(N, k);
    s.variant = CurveVariant::BipolarTernary;
    return s;
}

CurveSpec CurveSpec::positive_l1(int N, int k) {
    CurveSpec s = bin(N, k);
    s.variant = CurveVariant::PositiveL1;
    return s;
}

CurveSpec CurveSpec::unipolar_finite(int N, int k_hat, int k_L) {
    CurveSpec s;
    s.variant = CurveVariant::UnipolarFinite;
    s.N = N;
    s.k_hat = k_hat;
    s.k_L = k_L;
    s.k = k_hat + k_L;
    s.validate();
    return s;
}

CurveSpec CurveSpec::bipolar_finite(int N, int k_hat, int k_neg, int k_pos) {
    CurveSpec s;
    s.variant = CurveVariant::BipolarFinite;
    s.N = N;
    s.k_hat = k_hat;
    s.k_neg = k_neg;
    s.k_pos = k_pos;
    s.k = k_hat + k_neg + k_pos;
    s.k_zero = N - s.k;
    s.validate();
    return s;
}

CurveSpec CurveSpec::from_counts(CurveVariant v, int N, const std::vector<int>& c) {
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (c.size() < lo || c.size() > hi) {
            throw std::invalid_argument(std::string("variant ") + to_string(v) + " expects " +
                                        std::to_string(lo) + (hi != lo ? "-" + std::to_string(hi) : "") +
                                        " counts, got " + std::to_string(c.size()));
        }
    };
    switch (v) {
        case CurveVariant::Bin: need(1, 1); return bin(N, c[0]);
        case CurveVariant::BipolarTernary: need(1, 1); return ternary(N, c[0]);
        case CurveVariant::PositiveL1: need(1, 1); return positive_l1(N, c[0]);
        case CurveVariant::UnipolarFinite: need(2, 2); return unipolar_finite(N, c[0], c[1]);
        case CurveVariant::BipolarFinite: {
            need(3, 4);
            CurveSpec s = bipolar_finite(N, c[0], c[1], c[2]);
            if (c.size() == 4 && c[3] != s.k_zero) {
                throw std::invalid_argument("bf counts must sum to N: k_hat + k_neg + k_pos + k_zero = " +
                                            std::to_string(c[0] + c[1] + c[2] + c[3]) +
                                            ", N = " + std::to_string(N));
            }
            return s;
        }
    }
    throw std::invalid_argument("unknown variant");
}

int CurveSpec::support() const { return k; }

void CurveSpec::validate() const {
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument(std::string("curve spec (") + to_string(variant) + "): " + what);
    };
    if (N < 1) fail("N must be positive");
    for (int c : {k, k_hat, k_L, k_neg, k_pos, k_zero}) {
        if (c < 0) fail("counts must be nonnegative");
        if (c > N) fail("counts must not exceed N");
    }
    switch (variant) {
        case CurveVariant::UnipolarFinite:
            if (k_hat + k_L > N) fail("k_hat + k_L exceeds N");
            break;
        case CurveVariant::BipolarFinite:
            if (k_hat + k_neg + k_pos + k_zero != N) fail("k_hat + k_neg + k_pos + k_zero must equal N");
            break;
        default: break;
    }
}

std::string CurveSpec::counts_string() const {
    switch (variant) {
        case CurveVariant::UnipolarFinite: return std::to_string(k_hat) + ";" + std::to_string(k_L);
        case CurveVariant::BipolarFinite:
            return std::to_string(k_hat) + ";" + std::to_string(k_neg) + ";" + std::to_string(k_pos) +
                   ";" + std::to_string(k_zero);
        default: return std::to_string(k);
    }
}

double j_curve(const CurveSpec& spec, double tau) {
    if (!(tau >= 0)) throw std::invalid_argument("j_curve: tau must be nonnegative");
    const Weights w = weights(spec);
    return w.a * (1.0 + tau * tau) + w.l * gaussian_lower_moment(tau) +
           w.u * gaussian_upper_moment(tau);
}

double j_curve_derivative(const CurveSpec& spec, double tau) {
    const Weights w = weights(spec);
    const double dl = 2.0 * tau * normal_cdf(tau) + 2.0 * normal_pdf(tau);
    const double du = 2.0 * tau * normal_cdf(-tau) - 2.0 * normal_pdf(tau);
    return w.a * 2.0 * tau + w.l * dl + w.u * du;
}

double j_curve_second_derivative(const CurveSpec& spec, double tau) {
    const Weights w = weights(spec);
    return 2.0 * w.a + 2.0 * w.l * normal_cdf(tau) + 2.0 * w.u * normal_cdf(-tau);
}

DeltaResult delta_curve(const CurveSpec& spec) {
    spec.validate();
    if (j_curve_derivative(spec, 0.0) >= 0.0) return {j_curve(spec, 0.0), 0.0};

    const double tau_max = std::max(8.0, std::sqrt(2.0 * std::log(static_cast<double>(spec.N))));
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = 0.0, b = tau_max;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = j_curve(spec, c), fd = j_curve(spec, d);
    while (b - a > 1e-8) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = j_curve(spec, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = j_curve(spec, d);
        }
    }
    double tau = 0.5 * (a + b);
    double best = j_curve(spec, tau);
    const double h = j_curve_second_derivative(spec, tau);
    if (h > 0) {
        const double t2 = tau - j_curve_derivative(spec, tau) / h;
        if (t2 >= 0 && t2 <= tau_max) {
            const double f2 = j_curve(spec, t2);
            if (f2 <= best) {
                best = f2;
                tau = t2;
            }
        }
    }
    return {best, tau};
}

double measurement_bound(double delta, int N, double eps) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("measurement_bound: eps must lie in (0, 1)");
    if (N < 1) throw std::invalid_argument("measurement_bound: N must be positive");
    return delta + std::sqrt(8.0 * std::log(4.0 / eps) * N);
}

long noisy_measurement_bound(double delta, double eps, double tau) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("noisy_measurement_bound: eps must lie in (0, 1)");
    if (!(tau > 0)) throw std::invalid_argument("noisy_measurement_bound: tau must be positive");
    if (!(delta >= 0)) throw std::invalid_argument("noisy_measurement_bound: delta must be nonnegative");
    const double c = std::sqrt(std::log(1.0 / eps)) + std::sqrt(delta) + tau;
    const double c2 = c * c;
    long m = static_cast<long>(std::ceil(0.5 * (c2 + std::sqrt(c2 * c2 + 4.0 * c2))));
    m = std::max(m, 1L);
    auto ok = [&](long v) { return double(v) * double(v) / double(v + 1) >= c2; };
    while (!ok(m)) ++m;
    while (m > 1 && ok(m - 1)) --m;
    return m;
}

McEstimate mc_statdim_oracle(const Rng& rng, const CurveSpec& spec, double tau, long samples,
                             int threads) {
    spec.validate();
    if (samples < 1) throw std::invalid_argument("mc_statdim_oracle: samples must be positive");
    if (!(tau >= 0)) throw std::invalid_argument("mc_statdim_oracle: tau must be nonnegative");
    const auto cls = classes(spec);
    constexpr long kBlock = 4096;
    const long blocks = (samples + kBlock - 1) / kBlock;
    std::vector<double> sum(static_cast<std::size_t>(blocks)), sumsq(static_cast<std::size_t>(blocks));
    std::atomic<long> next{0};
    auto work = [&] {
        for (long blk = next++; blk < blocks; blk = next++) {
            Rng r = rng.substream(static_cast<std::uint64_t>(blk), 0x57A7D1ULL);
            std::normal_distribution<double> normal;
            const long n = std::min(kBlock, samples - blk * kBlock);
            double s = 0.0, s2 = 0.0;
            for (long t = 0; t < n; ++t) {
                double dist2 = 0.0;
                for (const auto& [count, set] : cls) {
                    for (int i = 0; i < count; ++i) dist2 += sq_distance(set, normal(r), tau);
                }
                s += dist2;
                s2 += dist2 * dist2;
            }
            sum[static_cast<std::size_t>(blk)] = s;
            sumsq[static_cast<std::size_t>(blk)] = s2;
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(blocks)));
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    double s = 0.0, s2 = 0.0;
    for (long blk = 0; blk < blocks; ++blk) {
        s += sum[static_cast<std::size_t>(blk)];
        s2 += sumsq[static_cast<std::size_t>(blk)];
    }
    const double n = static_cast<double>(samples);
    const double mean = s / n;
    const double var = samples > 1 ? std::max(0.0, (s2 - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n)};
}

std::string curve_csv(const std::vector<CurveSpec>& specs) {
    std::string out = std::string(kCurveCsvHeader) + "\n";
    for (const CurveSpec& s : specs) {
        const DeltaResult d = delta_curve(s);
        out += std::string(to_string(s.variant)) + "," + std::to_string(s.N) + "," + s.counts_string() +
               "," + io::format_double(d.tau_star) + "," + io::format_double(d.delta) + "," +
               io::format_double(d.delta / s.N) + "\n";
    }
    return out;
}

}  // namespace boxbp
