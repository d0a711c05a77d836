#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace iadas {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NonHermitianInput : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Identifies one independent random stream.
///
/// Equal (master, stream) pairs reproduce identical draws bit-exactly; any two
/// distinct pairs seed unrelated generators. Trials use (master, trial_index);
/// sub-streams inside a trial come from derive().
struct RandomSeed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;

    /// Child seed for a named sub-stream (channel draw, solver init, ...).
    [[nodiscard]] RandomSeed derive(std::uint64_t salt) const;

    friend bool operator==(const RandomSeed&, const RandomSeed&) = default;
};

using Rng = std::mt19937_64;

[[nodiscard]] Rng make_rng(const RandomSeed& seed);

/// One CN(0,1) draw: real and imaginary parts i.i.d. N(0, 1/2).
[[nodiscard]] Complex standard_complex_gaussian(Rng& rng);

/// rows x cols matrix of i.i.d. CN(0,1) entries.
[[nodiscard]] ComplexMatrix complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kOrthonormalTolerance = 1e-9;

/// Eigenvectors of the m smallest eigenvalues of a Hermitian matrix.
///
/// Columns come out in ascending eigenvalue order (ties keep the solver's
/// index order) and each column is phase-rotated so that its largest-magnitude
/// entry is real and non-negative. The Hermitian check is relative to the
/// largest entry magnitude when that exceeds one.
[[nodiscard]] ComplexMatrix smallest_eigvecs(const ComplexMatrix& a, Eigen::Index m);

/// Same as smallest_eigvecs but also returns the m ascending eigenvalues.
[[nodiscard]] std::pair<ComplexMatrix, RealVector> smallest_eigenpairs(const ComplexMatrix& a, Eigen::Index m);

/// Haar-distributed n x m orthonormal frame (Gaussian draw + QR with positive
/// real diagonal of R).
[[nodiscard]] ComplexMatrix haar_frame(Eigen::Index n, Eigen::Index m, const RandomSeed& seed);
[[nodiscard]] ComplexMatrix haar_frame(Eigen::Index n, Eigen::Index m, Rng& rng);

/// CDF of the squared norm of r standard complex Gaussians, i.e. the
/// regularized lower incomplete gamma function P(r, x).
[[nodiscard]] double chisq_cdf(double x, double r);

/// ‖V*V − I‖_F.
[[nodiscard]] double orthonormality_error(const ComplexMatrix& v);

/// Largest entrywise |A − A*|.
[[nodiscard]] double hermitian_defect(const ComplexMatrix& a);

}  // namespace iadas
