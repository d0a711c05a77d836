#include "iadas/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace iadas {

namespace {

double log2det_hpd(const ComplexMatrix& a) {
    Eigen::LLT<ComplexMatrix> llt(a);
    if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
    double acc = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) acc += std::log2(l(i, i).real());
    return 2.0 * acc;
}

void check_precoders(const ChannelSet& channels, std::span<const Precoder> precoders) {
    const SystemShape& s = channels.shape;
    if (static_cast<int>(precoders.size()) != s.users) throw DimensionMismatch("expected one precoder per user");
    for (const auto& p : precoders)
        if (p.F.rows() != s.tx_antennas) throw DimensionMismatch("precoder row count must equal Nt");
}

double simpson_panel(const std::function<double(double)>& f, double a, double fa, double b, double fb, double m,
                     double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw QuadratureFailure("adaptive Simpson: recursion budget exhausted before tolerance met");
    return simpson_panel(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           simpson_panel(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

RateSample sum_rate(const ChannelSet& channels, std::span<const Precoder> precoders, double noise_power) {
    check_precoders(channels, precoders);
    if (!(noise_power > 0.0)) throw DomainError("noise power must be positive");
    const SystemShape& s = channels.shape;
    RateSample out;
    for (int k = 0; k < s.users; ++k) {
        ComplexMatrix cov = noise_power * ComplexMatrix::Identity(s.rx_antennas, s.rx_antennas);
        for (int l = 0; l < s.users; ++l) {
            if (l == k) continue;
            const ComplexMatrix b = channels.at(k, l) * precoders[static_cast<std::size_t>(l)].F;
            cov.noalias() += b * b.adjoint();
        }
        const ComplexMatrix sig = channels.at(k, k) * precoders[static_cast<std::size_t>(k)].F;
        ComplexMatrix total = cov;
        total.noalias() += sig * sig.adjoint();
        const double rate = std::max(0.0, log2det_hpd(total) - log2det_hpd(cov));
        out.per_user_rate.push_back(rate);
        out.sum_rate += rate;
    }
    return out;
}

RateSample zf_rate(const ChannelSet& channels, std::span<const Precoder> precoders,
                   std::span<const Combiner> combiners, double noise_power) {
    check_precoders(channels, precoders);
    const SystemShape& s = channels.shape;
    if (static_cast<int>(combiners.size()) != s.users) throw DimensionMismatch("expected one combiner per user");
    if (!(noise_power > 0.0)) throw DomainError("noise power must be positive");
    RateSample out;
    for (int k = 0; k < s.users; ++k) {
        const ComplexMatrix& w = combiners[static_cast<std::size_t>(k)].W;
        if (w.rows() != s.rx_antennas) throw DimensionMismatch("combiner row count must equal Nr");
        const ComplexMatrix wh = w.adjoint();
        ComplexMatrix cov = noise_power * ComplexMatrix::Identity(w.cols(), w.cols());
        for (int l = 0; l < s.users; ++l) {
            if (l == k) continue;
            const ComplexMatrix b = wh * channels.at(k, l) * precoders[static_cast<std::size_t>(l)].F;
            cov.noalias() += b * b.adjoint();
        }
        const ComplexMatrix sig = wh * channels.at(k, k) * precoders[static_cast<std::size_t>(k)].F;
        ComplexMatrix total = cov;
        total.noalias() += sig * sig.adjoint();
        const double rate = std::max(0.0, log2det_hpd(total) - log2det_hpd(cov));
        out.per_user_rate.push_back(rate);
        out.sum_rate += rate;
    }
    return out;
}

void BackoffModel::validate() const {
    if (tx_antennas < 1 || streams < 1 || rrus < 1) throw DomainError("backoff model fields must be >= 1");
    if (tx_antennas % rrus != 0) throw DomainError("backoff model: N_RRU must divide Nt");
}

BackoffModel BackoffModel::for_shape(const SystemShape& shape, ExponentVariant exponent, ChiSquareConvention convention) {
    shape.validate();
    return BackoffModel{shape.tx_antennas, shape.streams, shape.rrus, exponent, convention};
}

const char* to_string(ExponentVariant v) { return v == ExponentVariant::tx_antennas ? "nt" : "n_rru"; }
const char* to_string(ChiSquareConvention c) { return c == ChiSquareConvention::complex ? "complex" : "real"; }

double beta2_cdf(const BackoffModel& model, double x, double total_power) {
    model.validate();
    if (!(x >= 0.0)) throw DomainError("beta2_cdf: argument must be non-negative");
    if (!(total_power > 0.0)) throw DomainError("beta2_cdf: total power must be positive");
    if (std::isinf(x)) return 1.0;
    const double unit_x = x * model.streams / total_power;
    const double dof = static_cast<double>(model.streams) * model.tx_antennas / model.rrus;
    const double arg = model.tx_antennas * unit_x;
    const double q = model.convention == ChiSquareConvention::complex ? chisq_cdf(arg, dof) : chisq_cdf(0.5 * arg, 0.5 * dof);
    const int e = model.exponent == ExponentVariant::tx_antennas ? model.tx_antennas : model.rrus;
    return std::pow(q, e);
}

EmpiricalBeta2::EmpiricalBeta2(std::vector<double> samples, double total_power, int rrus)
    : samples_(std::move(samples)), total_power_(total_power), rrus_(rrus) {
    std::sort(samples_.begin(), samples_.end());
}

double EmpiricalBeta2::cdf(double x) const {
    if (samples_.empty()) return 0.0;
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double EmpiricalBeta2::mean_log_loss() const {
    double acc = 0.0;
    for (double b : samples_) acc += std::log2(rrus_ * b / total_power_);
    return samples_.empty() ? 0.0 : acc / static_cast<double>(samples_.size());
}

EmpiricalBeta2 empirical_beta2(const SystemShape& shape, int n_draws, const RandomSeed& seed, double total_power) {
    shape.validate();
    if (n_draws < 1) throw DomainError("empirical_beta2: need at least one draw");
    Rng rng = make_rng(seed);
    const double amplitude_sq = total_power / shape.streams;
    std::vector<double> samples;
    std::vector<int> argmax;
    samples.reserve(static_cast<std::size_t>(n_draws));
    argmax.reserve(static_cast<std::size_t>(n_draws));
    Precoder p{0, ComplexMatrix(), shape.rrus};
    for (int i = 0; i < n_draws; ++i) {
        p.F = haar_frame(shape.tx_antennas, shape.streams, rng);
        double best = -1.0;
        int at = 0;
        for (int r = 0; r < shape.rrus; ++r) {
            const double bp = p.block_power(r);
            if (bp > best) {
                best = bp;
                at = r;
            }
        }
        samples.push_back(std::min(amplitude_sq * best, total_power));
        argmax.push_back(at);
    }
    EmpiricalBeta2 out(std::move(samples), total_power, shape.rrus);
    out.argmax_block = std::move(argmax);
    return out;
}

double ks_distance(std::span<const double> sorted_samples, const std::function<double(double)>& cdf) {
    const double n = static_cast<double>(sorted_samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < sorted_samples.size(); ++i) {
        const double f = cdf(sorted_samples[i]);
        worst = std::max({worst, std::abs(f - static_cast<double>(i + 1) / n), std::abs(f - static_cast<double>(i) / n)});
    }
    return worst;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
    if (!(b > a)) return 0.0;
    // fixed initial panels so narrow features between coarse nodes are not missed
    constexpr int kPanels = 32;
    const double h = (b - a) / kPanels;
    double total = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        const double lo = a + i * h;
        const double hi = (i + 1 == kPanels) ? b : lo + h;
        const double mid = 0.5 * (lo + hi);
        const double flo = f(lo);
        const double fhi = f(hi);
        const double fmid = f(mid);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_panel(f, lo, flo, hi, fhi, mid, fmid, whole, tol / kPanels, max_depth);
    }
    return total;
}

double expected_stream_loss(const BackoffModel& model, double tol) {
    model.validate();
    if (model.rrus == 1) return 0.0;
    // unit total power: the loss does not depend on P
    const double lo = 1.0 / model.rrus;
    const double hi = 1.0;
    const auto integrand = [&](double x) { return beta2_cdf(model, x, 1.0) / (x * std::numbers::ln2); };
    const double integral = adaptive_simpson(integrand, lo, hi, tol);
    return std::max(0.0, std::log2(static_cast<double>(model.rrus)) - integral);
}

double expected_rate_loss(const BackoffModel& model, int users, double total_power, double /*noise_power*/) {
    if (users < 1) throw DomainError("expected_rate_loss: need at least one user");
    if (!(total_power > 0.0)) throw DomainError("expected_rate_loss: total power must be positive");
    return users * model.streams * expected_stream_loss(model);
}

}  // namespace iadas
