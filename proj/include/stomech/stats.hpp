#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace stomech::stats {

double normal_cdf(double z);

// Inverse standard normal CDF (Acklam's rational approximation, |err| < 1e-8).
double normal_quantile(double p);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// P[chi^2_df >= x]
double chi_square_tail(int df, double x);

// Two-sample Kolmogorov-Smirnov statistic (sup |F1 - F2|). Sorts copies.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

// One-sample KS statistic of a sample against an analytic CDF.
double ks_vs_cdf(std::vector<double> sample,
                 const std::function<double(double)>& cdf);

// In-place radix-2 FFT (size must be a power of two); inverse = conjugate
// trick handled by caller when needed.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

bool is_pow2(size_t n);

}  // namespace stomech::stats
