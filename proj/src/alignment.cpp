#include "iadas/alignment.hpp"

#include <cmath>
#include <string>

namespace iadas {

namespace {

constexpr std::uint64_t kZeroBlockSalt = 0x2e50;
constexpr double kZeroBlockNorm = 1e-300;
// eigenvalues this far (per unit precoder power) above the Ns-th smallest
// still count as part of the near-null space
constexpr double kNullSpaceFraction = 1e-2;

void check_dimensions(const ChannelSet& channels, std::span<const Precoder> precoders) {
    const SystemShape& s = channels.shape;
    if (static_cast<int>(precoders.size()) != s.users) throw DimensionMismatch("expected one precoder per user");
    for (const auto& p : precoders)
        if (p.F.rows() != s.tx_antennas || p.F.cols() != s.streams)
            throw DimensionMismatch("precoder must be Nt x Ns");
}

void check_dimensions(const ChannelSet& channels, std::span<const Combiner> combiners) {
    const SystemShape& s = channels.shape;
    if (static_cast<int>(combiners.size()) != s.users) throw DimensionMismatch("expected one combiner per user");
    for (const auto& c : combiners)
        if (c.W.rows() != s.rx_antennas || c.W.cols() != s.streams)
            throw DimensionMismatch("combiner must be Nr x Ns");
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace

double leakage(const ChannelSet& channels, std::span<const Precoder> precoders, std::span<const Combiner> combiners) {
    check_dimensions(channels, precoders);
    check_dimensions(channels, combiners);
    const int k_users = channels.shape.users;
    double total = 0.0;
    for (int k = 0; k < k_users; ++k) {
        const ComplexMatrix wh = combiners[static_cast<std::size_t>(k)].W.adjoint();
        for (int l = 0; l < k_users; ++l) {
            if (l == k) continue;
            total += (wh * channels.at(k, l) * precoders[static_cast<std::size_t>(l)].F).squaredNorm();
        }
    }
    return total;
}

std::vector<Combiner> update_combiners(const ChannelSet& channels, std::span<const Precoder> precoders) {
    check_dimensions(channels, precoders);
    const SystemShape& s = channels.shape;
    std::vector<Combiner> out;
    out.reserve(static_cast<std::size_t>(s.users));
    for (int k = 0; k < s.users; ++k) {
        ComplexMatrix cov = ComplexMatrix::Zero(s.rx_antennas, s.rx_antennas);
        for (int l = 0; l < s.users; ++l) {
            if (l == k) continue;
            const ComplexMatrix b = channels.at(k, l) * precoders[static_cast<std::size_t>(l)].F;
            cov.noalias() += b * b.adjoint();
        }
        out.push_back(Combiner{k, smallest_eigvecs(hermitian_part(cov), s.streams)});
    }
    return out;
}

std::vector<Precoder> update_precoders(const ChannelSet& channels, std::span<const Combiner> combiners,
                                       double total_power) {
    check_dimensions(channels, combiners);
    const SystemShape& s = channels.shape;
    const double amplitude = std::sqrt(total_power / s.streams);
    std::vector<Precoder> out;
    out.reserve(static_cast<std::size_t>(s.users));
    for (int k = 0; k < s.users; ++k) {
        ComplexMatrix cov = ComplexMatrix::Zero(s.tx_antennas, s.tx_antennas);
        for (int l = 0; l < s.users; ++l) {
            if (l == k) continue;
            const ComplexMatrix b = channels.at(l, k).adjoint() * combiners[static_cast<std::size_t>(l)].W;
            cov.noalias() += b * b.adjoint();
        }
        out.push_back(Precoder{k, amplitude * smallest_eigvecs(hermitian_part(cov), s.streams), s.rrus});
    }
    return out;
}

std::vector<Precoder> update_precoders_tracking(const ChannelSet& channels, std::span<const Combiner> combiners,
                                               double total_power, std::span<const Precoder> previous,
                                               double null_threshold) {
    check_dimensions(channels, combiners);
    check_dimensions(channels, previous);
    const SystemShape& s = channels.shape;
    const double amplitude = std::sqrt(total_power / s.streams);
    std::vector<Precoder> out;
    out.reserve(static_cast<std::size_t>(s.users));
    for (int k = 0; k < s.users; ++k) {
        ComplexMatrix cov = ComplexMatrix::Zero(s.tx_antennas, s.tx_antennas);
        for (int l = 0; l < s.users; ++l) {
            if (l == k) continue;
            const ComplexMatrix b = channels.at(l, k).adjoint() * combiners[static_cast<std::size_t>(l)].W;
            cov.noalias() += b * b.adjoint();
        }
        const auto [vecs, vals] = smallest_eigenpairs(hermitian_part(cov), s.tx_antennas);
        const double cut = std::max(vals(s.streams - 1), 0.0) + null_threshold + 1e-12 * std::max(vals.maxCoeff(), 0.0);
        Eigen::Index dim = s.streams;
        while (dim < vals.size() && vals(dim) <= cut) ++dim;

        ComplexMatrix f;
        if (dim > s.streams) {
            const auto basis = vecs.leftCols(dim);
            f = basis * (basis.adjoint() * previous[static_cast<std::size_t>(k)].F);
            const Eigen::JacobiSVD<ComplexMatrix> svd(f);
            const auto& sv = svd.singularValues();
            if (!(sv(sv.size() - 1) > 1e-6 * sv(0))) f.resize(0, 0);
        }
        if (f.size() == 0) f = amplitude * vecs.leftCols(s.streams);
        out.push_back(Precoder{k, std::move(f), s.rrus});
    }
    return out;
}

std::vector<Precoder> initial_precoders(const SystemShape& shape, double total_power, const RandomSeed& seed) {
    shape.validate();
    Rng rng = make_rng(seed);
    const double amplitude = std::sqrt(total_power / shape.streams);
    std::vector<Precoder> out;
    for (int k = 0; k < shape.users; ++k)
        out.push_back(Precoder{k, amplitude * haar_frame(shape.tx_antennas, shape.streams, rng), shape.rrus});
    return out;
}

IASolution solve_unconstrained(const ChannelSet& channels, double total_power, const SolverOptions& opts) {
    channels.shape.validate();
    if (!(total_power > 0.0)) throw DomainError("total power must be positive");

    IASolution sol;
    sol.precoders = initial_precoders(channels.shape, total_power, opts.init_seed);
    sol.combiners = update_combiners(channels, sol.precoders);
    sol.leakage_trace.push_back(leakage(channels, sol.precoders, sol.combiners));
    sol.converged = sol.leakage_trace.back() <= opts.tol * total_power;

    while (!sol.converged && sol.iterations < opts.max_iters) {
        sol.precoders = update_precoders(channels, sol.combiners, total_power);
        sol.combiners = update_combiners(channels, sol.precoders);
        sol.leakage_trace.push_back(leakage(channels, sol.precoders, sol.combiners));
        ++sol.iterations;
        sol.converged = sol.leakage_trace.back() <= opts.tol * total_power;
    }
    return sol;
}

std::pair<IASolution, BackoffResult> apply_backoff(const IASolution& solution, const SystemShape& shape,
                                                   double total_power) {
    shape.validate();
    const double cap = total_power / shape.rrus;
    IASolution out = solution;
    BackoffResult res;
    for (auto& p : out.precoders) {
        if (p.rrus != shape.rrus || p.F.rows() != shape.tx_antennas)
            throw DimensionMismatch("precoder does not match shape RRU partition");
        double beta_sq = 0.0;
        for (int r = 0; r < p.rrus; ++r) beta_sq = std::max(beta_sq, p.block_power(r));
        if (!(beta_sq > 0.0)) throw ZeroPrecoder("user " + std::to_string(p.owner) + " has an all-zero precoder");
        const double scale = std::sqrt(cap / beta_sq);
        p.F *= scale;
        res.per_user_beta_sq.push_back(beta_sq);
        res.scale_factors.push_back(scale);
    }
    return {std::move(out), std::move(res)};
}

int project_strict(std::vector<Precoder>& precoders, double total_power, Rng& rng) {
    int resets = 0;
    for (auto& p : precoders) {
        const double target = std::sqrt(total_power / p.rrus);
        for (int r = 0; r < p.rrus; ++r) {
            auto blk = p.block(r);
            double norm = blk.norm();
            if (norm < kZeroBlockNorm) {
                blk = haar_frame(blk.rows() * blk.cols(), 1, rng).reshaped(blk.rows(), blk.cols());
                norm = blk.norm();
                ++resets;
            }
            blk *= target / norm;
        }
    }
    return resets;
}

IASolution solve_strict(const ChannelSet& channels, const SystemShape& shape, double total_power,
                        const SolverOptions& opts) {
    shape.validate();
    if (!(channels.shape == shape)) throw DimensionMismatch("channel set shape differs from solver shape");
    if (!(total_power > 0.0)) throw DomainError("total power must be positive");

    Rng reset_rng = make_rng(opts.init_seed.derive(kZeroBlockSalt));
    IASolution sol;
    sol.precoders = initial_precoders(shape, total_power, opts.init_seed);
    sol.zero_block_resets += project_strict(sol.precoders, total_power, reset_rng);
    sol.combiners = update_combiners(channels, sol.precoders);
    sol.leakage_trace.push_back(leakage(channels, sol.precoders, sol.combiners));
    sol.converged = sol.leakage_trace.back() <= opts.tol * total_power;

    while (!sol.converged && sol.iterations < opts.max_iters) {
        if (sol.iterations > 0) sol.combiners = update_combiners(channels, sol.precoders);
        sol.precoders = opts.tie_break == NullSpaceTieBreak::track_iterate
                            ? update_precoders_tracking(channels, sol.combiners, total_power, sol.precoders,
                                                        kNullSpaceFraction * opts.tol)
                            : update_precoders(channels, sol.combiners, total_power);
        sol.zero_block_resets += project_strict(sol.precoders, total_power, reset_rng);
        sol.leakage_trace.push_back(leakage(channels, sol.precoders, sol.combiners));
        ++sol.iterations;
        sol.converged = sol.leakage_trace.back() <= opts.tol * total_power;
    }
    return sol;
}

}  // namespace iadas
