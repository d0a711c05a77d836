#include "iadas/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

namespace iadas {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void fix_column_phases(ComplexMatrix& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            // first index wins ties in magnitude
            const double mag = std::abs(v(r, c));
            if (mag > best * (1.0 + 1e-12)) {
                best = mag;
                pivot = r;
            }
        }
        if (best > 0.0) {
            const Complex phase = std::conj(v(pivot, c)) / best;
            v.col(c) *= phase;
            v(pivot, c) = Complex(std::abs(v(pivot, c)), 0.0);
        }
    }
}

}  // namespace

RandomSeed RandomSeed::derive(std::uint64_t salt) const {
    return RandomSeed{master, splitmix64(stream ^ splitmix64(salt + 0x5851f42d4c957f2dULL))};
}

Rng make_rng(const RandomSeed& seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed.master), static_cast<std::uint32_t>(seed.master >> 32),
                      static_cast<std::uint32_t>(seed.stream), static_cast<std::uint32_t>(seed.stream >> 32)};
    return Rng(seq);
}

Complex standard_complex_gaussian(Rng& rng) {
    std::normal_distribution<double> normal(0.0, M_SQRT1_2);
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

ComplexMatrix complex_gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    ComplexMatrix m(rows, cols);
    // column-major fill order is part of the reproducibility contract
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = standard_complex_gaussian(rng);
    return m;
}

double hermitian_defect(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("hermitian_defect: matrix is not square");
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double orthonormality_error(const ComplexMatrix& v) {
    return (v.adjoint() * v - ComplexMatrix::Identity(v.cols(), v.cols())).norm();
}

std::pair<ComplexMatrix, RealVector> smallest_eigenpairs(const ComplexMatrix& a, Eigen::Index m) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw DimensionMismatch("smallest_eigvecs: input must be a non-empty square matrix");
    if (m < 1 || m > a.rows()) throw DimensionMismatch("smallest_eigvecs: requested eigenvector count out of range");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (hermitian_defect(a) > kHermitianTolerance * scale)
        throw NonHermitianInput("smallest_eigvecs: input is not Hermitian within tolerance");

    const ComplexMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw DomainError("smallest_eigvecs: eigensolver failed");

    const RealVector& values = solver.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return values(x) < values(y); });

    ComplexMatrix vecs(a.rows(), m);
    RealVector vals(m);
    for (Eigen::Index c = 0; c < m; ++c) {
        vecs.col(c) = solver.eigenvectors().col(order[static_cast<std::size_t>(c)]);
        vals(c) = values(order[static_cast<std::size_t>(c)]);
    }
    fix_column_phases(vecs);
    return {std::move(vecs), std::move(vals)};
}

ComplexMatrix smallest_eigvecs(const ComplexMatrix& a, Eigen::Index m) {
    return smallest_eigenpairs(a, m).first;
}

ComplexMatrix haar_frame(Eigen::Index n, Eigen::Index m, Rng& rng) {
    if (n < 1 || m < 1 || m > n) throw DimensionMismatch("haar_frame: need 1 <= m <= n");
    const ComplexMatrix g = complex_gaussian_matrix(n, m, rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, m);
    const ComplexMatrix& r = qr.matrixQR();
    for (Eigen::Index c = 0; c < m; ++c) {
        const Complex d = r(c, c);
        const double mag = std::abs(d);
        if (mag > 0.0) q.col(c) *= d / mag;
    }
    return q;
}

ComplexMatrix haar_frame(Eigen::Index n, Eigen::Index m, const RandomSeed& seed) {
    Rng rng = make_rng(seed);
    return haar_frame(n, m, rng);
}

double chisq_cdf(double x, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("chisq_cdf: degrees of freedom must be positive");
    if (!(x >= 0.0)) throw DomainError("chisq_cdf: argument must be non-negative");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(r, x);
}

}  // namespace iadas
