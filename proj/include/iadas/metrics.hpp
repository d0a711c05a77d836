#pragma once

#include <functional>
#include <span>
#include <vector>

#include "iadas/alignment.hpp"

namespace iadas {

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

struct RateSample {
    std::vector<double> per_user_rate;  // bits/s/Hz
    double sum_rate = 0.0;
};

/// Receiver-optimal rate with Gaussian signalling and interference treated as
/// noise:
///   R_k = log2 det(I + (sigma^2 I + sum_{l != k} H_kl F_l F_l* H_kl*)^{-1} H_kk F_k F_k* H_kk*).
[[nodiscard]] RateSample sum_rate(const ChannelSet& channels, std::span<const Precoder> precoders, double noise_power);

/// Rate after projecting through the zero-forcing combiners:
///   R_k = log2 det((sigma^2 I + J_k)^{-1} (sigma^2 I + J_k + S_k)),
/// with J_k, S_k the post-combining interference and signal covariances.
[[nodiscard]] RateSample zf_rate(const ChannelSet& channels, std::span<const Precoder> precoders,
                                 std::span<const Combiner> combiners, double noise_power);

/// Which power the chi-squared CDF product is raised to.
enum class ExponentVariant { tx_antennas, rrus };

/// How "chi-squared with r degrees of freedom" is read: `complex` is the CDF
/// of the squared norm of r standard complex Gaussians (Gamma(r, 1)); `real`
/// is the textbook real chi-squared (Gamma(r/2, 2)).
enum class ChiSquareConvention { complex, real };

/// Analytical model of the back-off factor beta^2 of Haar precoders:
///   P{beta^2 <= x} ~= Q(Nt x; Ns Nt / N_RRU)^e,  e in {Nt, N_RRU},
/// with x on the orthonormal-precoder scale (||F||_F^2 = Ns).
struct BackoffModel {
    int tx_antennas = 1;
    int streams = 1;
    int rrus = 1;
    ExponentVariant exponent = ExponentVariant::tx_antennas;
    ChiSquareConvention convention = ChiSquareConvention::complex;

    void validate() const;
    [[nodiscard]] static BackoffModel for_shape(const SystemShape& shape,
                                                ExponentVariant exponent = ExponentVariant::tx_antennas,
                                                ChiSquareConvention convention = ChiSquareConvention::complex);
};

[[nodiscard]] const char* to_string(ExponentVariant v);
[[nodiscard]] const char* to_string(ChiSquareConvention c);

/// CDF of beta^2 for precoders of total power P. The argument is mapped to the
/// orthonormal scale as x * Ns / P before evaluating the model.
[[nodiscard]] double beta2_cdf(const BackoffModel& model, double x, double total_power);

/// Monte Carlo back-off factor: sorted samples of max_r ||F^(r)||_F^2 for
/// Haar frames scaled to ||F||_F^2 = P.
class EmpiricalBeta2 {
public:
    EmpiricalBeta2(std::vector<double> samples, double total_power, int rrus);

    [[nodiscard]] const std::vector<double>& samples() const { return samples_; }
    [[nodiscard]] double cdf(double x) const;
    /// Sample mean of log2(N_RRU beta^2 / P), the per-stream back-off loss.
    [[nodiscard]] double mean_log_loss() const;
    /// Index of the RRU that attained the max, per sample (draw order).
    std::vector<int> argmax_block;

private:
    std::vector<double> samples_;
    double total_power_;
    int rrus_;
};

[[nodiscard]] EmpiricalBeta2 empirical_beta2(const SystemShape& shape, int n_draws, const RandomSeed& seed,
                                             double total_power = 1.0);

/// Kolmogorov-Smirnov sup distance between the sample CDF and `cdf`.
[[nodiscard]] double ks_distance(std::span<const double> sorted_samples, const std::function<double(double)>& cdf);

/// Adaptive Simpson quadrature to absolute tolerance `tol`; throws
/// QuadratureFailure if the recursion budget runs out first.
[[nodiscard]] double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                                      int max_depth = 50);

/// Per-stream mean high-SNR back-off loss E[log2(N_RRU beta^2 / P)] under the
/// model, computed from the CDF by integration by parts over [P/N_RRU, P]
/// (model mass outside that interval is clamped to its ends).
[[nodiscard]] double expected_stream_loss(const BackoffModel& model, double tol = 1e-6);

/// Mean sum-rate loss of power back-off at high SNR: K Ns E[log2(N_RRU beta^2 / P)].
/// Non-negative; independent of P and of noise_power (accepted for symmetry).
[[nodiscard]] double expected_rate_loss(const BackoffModel& model, int users, double total_power, double noise_power);

}  // namespace iadas
