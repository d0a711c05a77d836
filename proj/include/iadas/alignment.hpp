#pragma once

#include <span>
#include <vector>

#include "iadas/channel.hpp"

namespace iadas {

class ZeroPrecoder : public Error {
public:
    using Error::Error;
};

/// Nt x Ns precoder of one user, viewed as N_RRU stacked row blocks of
/// Nt/N_RRU rows each.
struct Precoder {
    int owner = 0;
    ComplexMatrix F;
    int rrus = 1;

    [[nodiscard]] Eigen::Index block_rows() const { return F.rows() / rrus; }
    [[nodiscard]] auto block(int r) const { return F.middleRows(r * block_rows(), block_rows()); }
    [[nodiscard]] auto block(int r) { return F.middleRows(r * block_rows(), block_rows()); }
    [[nodiscard]] double block_power(int r) const { return block(r).squaredNorm(); }
    [[nodiscard]] double power() const { return F.squaredNorm(); }
};

/// Nr x Ns orthonormal receive combiner.
struct Combiner {
    int owner = 0;
    ComplexMatrix W;
};

struct IASolution {
    std::vector<Precoder> precoders;
    std::vector<Combiner> combiners;
    /// Leakage after every completed iteration; entry 0 is the leakage of the
    /// initial precoders against their optimal combiners.
    std::vector<double> leakage_trace;
    bool converged = false;
    int iterations = 0;
    /// Number of strict-projection blocks that had to be re-drawn because
    /// their norm vanished.
    int zero_block_resets = 0;

    [[nodiscard]] double final_leakage() const { return leakage_trace.empty() ? 0.0 : leakage_trace.back(); }
};

/// How the strict solver picks Ns directions when the least-dominant
/// eigenvalue of a precoder covariance is repeated (its near-null space has
/// more than Ns dimensions, e.g. Nt > (K-1) Ns).
enum class NullSpaceTieBreak {
    /// Plain index order from the eigensolver.
    index_order,
    /// Project the previous (block-normalized) precoder onto the near-null
    /// space, so successive iterates stay close to the power-balanced set.
    track_iterate,
};

struct SolverOptions {
    double tol = 1e-8;  // stop once leakage / P <= tol
    int max_iters = 5000;
    RandomSeed init_seed{};
    NullSpaceTieBreak tie_break = NullSpaceTieBreak::track_iterate;  // strict solver only
};

struct BackoffResult {
    std::vector<double> per_user_beta_sq;  // beta_k^2 = max_r ||F_k^(r)||_F^2
    std::vector<double> scale_factors;     // sqrt(P/N_RRU) / beta_k
};

/// J_IL = sum over ordered pairs k != l of ||W_k* H_kl F_l||_F^2.
[[nodiscard]] double leakage(const ChannelSet& channels, std::span<const Precoder> precoders,
                             std::span<const Combiner> combiners);

/// W_k = Ns least-dominant eigenvectors of sum_{l != k} H_kl F_l F_l* H_kl*.
[[nodiscard]] std::vector<Combiner> update_combiners(const ChannelSet& channels, std::span<const Precoder> precoders);

/// F_k = sqrt(P/Ns) * (Ns least-dominant eigenvectors of
/// sum_{l != k} H_lk* W_l W_l* H_lk), so ||F_k||_F^2 = P.
[[nodiscard]] std::vector<Precoder> update_precoders(const ChannelSet& channels, std::span<const Combiner> combiners,
                                                     double total_power);

/// Precoder update for the strict solver. Identical to update_precoders when
/// the near-null space of user k's covariance (eigenvalues within
/// `null_threshold` of the Ns-th smallest, plus a 1e-12 relative floor) has
/// exactly Ns dimensions. When it is larger, returns V V* F_prev, the
/// projection of the previous precoder onto that space, falling back to the
/// Ns smallest eigenvectors if the projection is rank deficient.
[[nodiscard]] std::vector<Precoder> update_precoders_tracking(const ChannelSet& channels,
                                                              std::span<const Combiner> combiners, double total_power,
                                                              std::span<const Precoder> previous,
                                                              double null_threshold);

/// Haar-random initial precoders with ||F_k||_F^2 = P.
[[nodiscard]] std::vector<Precoder> initial_precoders(const SystemShape& shape, double total_power,
                                                      const RandomSeed& seed);

/// Alternating leakage minimization under a total power constraint only.
[[nodiscard]] IASolution solve_unconstrained(const ChannelSet& channels, double total_power,
                                             const SolverOptions& opts = {});

/// Scales each precoder by sqrt(P/N_RRU)/beta_k so that its hottest RRU sits
/// exactly at P/N_RRU. Throws ZeroPrecoder when some beta_k is zero.
[[nodiscard]] std::pair<IASolution, BackoffResult> apply_backoff(const IASolution& solution, const SystemShape& shape,
                                                                 double total_power);

/// Rescales every RRU block to power P/N_RRU in place; a block whose norm is
/// below 1e-300 is re-drawn from a Haar frame. Returns the number of re-drawn
/// blocks.
int project_strict(std::vector<Precoder>& precoders, double total_power, Rng& rng);

/// Alternating minimization with a per-RRU equal-power projection after every
/// precoder update. Convergence is not guaranteed; the last iterate is
/// returned either way.
[[nodiscard]] IASolution solve_strict(const ChannelSet& channels, const SystemShape& shape, double total_power,
                                      const SolverOptions& opts = {});

}  // namespace iadas
