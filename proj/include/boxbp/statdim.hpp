#pragma once

#include "boxbp/core.hpp"

#include <string>
#include <vector>

namespace boxbp {

double normal_pdf(double x);
/// Standard normal CDF through std::erfc.
double normal_cdf(double x);

/// ML(tau) = int_{-inf}^{tau} (u - tau)^2 phi(u) du = (1 + tau^2) Phi(tau) + tau phi(tau).
double gaussian_lower_moment(double tau);
/// MU(tau) = int_{tau}^{inf} (u - tau)^2 phi(u) du = (1 + tau^2)(1 - Phi(tau)) - tau phi(tau).
double gaussian_upper_moment(double tau);

enum class CurveVariant { Bin, BipolarTernary, UnipolarFinite, BipolarFinite, PositiveL1 };

/// Short names used on the command line and in CSV output: bin, ter, uf, bf, pplus.
const char* to_string(CurveVariant v);
CurveVariant parse_curve_variant(const std::string& name);

/// Partition sizes that determine a curve.
///   Bin, BipolarTernary, PositiveL1: k
///   UnipolarFinite: k_hat (interior levels), k_L (top level)
///   BipolarFinite:  k_hat, k_neg (level -L1), k_pos (level L2), k_zero
struct CurveSpec {
    CurveVariant variant = CurveVariant::Bin;
    int N = 0;
    int k = 0;
    int k_hat = 0;
    int k_L = 0;
    int k_neg = 0;
    int k_pos = 0;
    int k_zero = 0;

    static CurveSpec bin(int N, int k);
    static CurveSpec ternary(int N, int k);
    static CurveSpec positive_l1(int N, int k);
    static CurveSpec unipolar_finite(int N, int k_hat, int k_L);
    /// k_zero is what remains of N.
    static CurveSpec bipolar_finite(int N, int k_hat, int k_neg, int k_pos);

    /// Builds the spec from a count list in the order documented above
    /// (BipolarFinite accepts 3 or 4 entries).
    static CurveSpec from_counts(CurveVariant v, int N, const std::vector<int>& counts);

    int support() const;
    void validate() const;
    /// Counts joined by ';' for CSV output.
    std::string counts_string() const;
};

/// The tau-parametrized upper bound J(tau) on the statistical dimension.
double j_curve(const CurveSpec& spec, double tau);
double j_curve_derivative(const CurveSpec& spec, double tau);
double j_curve_second_derivative(const CurveSpec& spec, double tau);

struct DeltaResult {
    double delta = 0.0;
    double tau_star = 0.0;
};

/// inf over tau >= 0 of j_curve, by golden section on [0, max(8, sqrt(2 ln N))]
/// followed by a Newton polish.
DeltaResult delta_curve(const CurveSpec& spec);

/// delta + sqrt(8 ln(4 / eps) N); eps must lie in (0, 1).
double measurement_bound(double delta, int N, double eps);

/// Smallest integer m with m^2 / (m + 1) >= c^2, c = sqrt(ln(1/eps)) + sqrt(delta) + tau.
long noisy_measurement_bound(double delta, double eps, double tau);

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte Carlo estimate of E dist(g, tau * subdifferential)^2 using the
/// coordinatewise projections of each support class.  Samples are drawn in
/// fixed blocks with per-block substreams, so the result does not depend on
/// `threads`.
McEstimate mc_statdim_oracle(const Rng& rng, const CurveSpec& spec, double tau, long samples,
                             int threads = 1);

/// One row per spec: variant,N,k_or_counts,tau_star,delta,delta_over_N.
std::string curve_csv(const std::vector<CurveSpec>& specs);
inline constexpr const char* kCurveCsvHeader = "variant,N,k_or_counts,tau_star,delta,delta_over_N";

}  // namespace boxbp
