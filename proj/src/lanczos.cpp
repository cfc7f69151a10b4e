#include "efimov/errors.hpp"
#include "efimov/spectra.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace efimov {

namespace {

// Orthogonalize the columns of block against basis.leftCols(k) (two passes of
// classical Gram-Schmidt), then orthonormalize the block itself. Columns that
// collapse (an invariant subspace was found) are replaced by fresh random
// directions, so the result has block.cols() columns unless the space is full.
Eigen::MatrixXd extend_orthonormal(const Eigen::MatrixXd& basis, Eigen::Index k, Eigen::MatrixXd block,
                                   std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const Eigen::Index n = block.rows();
    const Eigen::Index b = block.cols();
    Eigen::MatrixXd out(n, b);
    Eigen::Index filled = 0;
    int refills = 0;
    Eigen::Index next = 0;
    while (filled < b) {
        Eigen::VectorXd v;
        if (next < b) {
            v = block.col(next++);
        } else {
            if (++refills > 16 * b) {
                break;
            }
            v.resize(n);
            for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
        }
        const double original = v.norm();
        if (!(original > 0.0)) {
            continue;
        }
        for (int pass = 0; pass < 2; ++pass) {
            if (k > 0) {
                v -= basis.leftCols(k) * (basis.leftCols(k).transpose() * v);
            }
            if (filled > 0) {
                v -= out.leftCols(filled) * (out.leftCols(filled).transpose() * v);
            }
        }
        const double nv = v.norm();
        if (nv > 1e-10 * original) {
            out.col(filled++) = v / nv;
        }
    }
    return out.leftCols(filled);
}

}  // namespace

PartialEigenSystem lowest_eigenpairs(const LinearOperator& op, int m, const LanczosOptions& options) {
    const Eigen::Index n = op.dim();
    if (m < 1 || m > n) {
        throw std::invalid_argument("lowest_eigenpairs: need 1 <= m <= dimension");
    }
    const Eigen::Index block =
        std::min<Eigen::Index>(n, options.block_size > 0 ? options.block_size : std::max<Eigen::Index>(4, m));
    const Eigen::Index max_basis =
        std::min<Eigen::Index>(n, options.max_basis > 0 ? options.max_basis : std::max<Eigen::Index>(600, 8 * m));
    if (max_basis < m) {
        throw std::invalid_argument("lowest_eigenpairs: basis limit below m");
    }

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Eigen::MatrixXd basis(n, max_basis);
    Eigen::MatrixXd image(n, max_basis);
    Eigen::MatrixXd projected = Eigen::MatrixXd::Zero(max_basis, max_basis);
    Eigen::Index k = 0;

    Eigen::MatrixXd start(n, block);
    for (Eigen::Index j = 0; j < block; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) start(i, j) = normal(rng);
    }
    Eigen::MatrixXd next = extend_orthonormal(basis, 0, std::move(start), rng);

    PartialEigenSystem best;
    Eigen::Index next_check = m;

    while (true) {
        const Eigen::Index add = std::min<Eigen::Index>(next.cols(), max_basis - k);
        if (add > 0) {
            basis.middleCols(k, add) = next.leftCols(add);
            Eigen::MatrixXd applied(n, add);
            op.apply(basis.middleCols(k, add), applied);
            image.middleCols(k, add) = applied;
            // New rows/columns of V^T A V.
            const Eigen::MatrixXd cross = basis.leftCols(k + add).transpose() * applied;
            projected.block(0, k, k + add, add) = cross;
            projected.block(k, 0, add, k + add) = cross.transpose();
            k += add;
        }

        const bool exhausted = (k >= max_basis) || add == 0;
        if (k >= m && (k >= next_check || exhausted)) {
            const Eigen::MatrixXd t = projected.topLeftCorner(k, k);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t + t.transpose()));
            const Eigen::MatrixXd s = es.eigenvectors().leftCols(m);
            const Eigen::VectorXd theta = es.eigenvalues().head(m);
            const Eigen::MatrixXd ritz = basis.leftCols(k) * s;
            const Eigen::MatrixXd resid = image.leftCols(k) * s - ritz * theta.asDiagonal();
            std::vector<double> res(static_cast<std::size_t>(m));
            bool converged = true;
            for (int i = 0; i < m; ++i) {
                res[static_cast<std::size_t>(i)] = resid.col(i).norm();
                converged = converged && res[static_cast<std::size_t>(i)] <= options.tol;
            }
            best.values = theta;
            best.vectors = ritz;
            best.residuals = res;
            best.basis_size = k;
            // A full basis spans the space: the Ritz pairs are exact up to rounding.
            if (converged || k == n) {
                return best;
            }
            if (exhausted) {
                std::ostringstream os;
                os << "lowest_eigenpairs: no convergence with basis " << k << " (tol " << options.tol
                   << ", worst residual " << *std::max_element(res.begin(), res.end()) << ")";
                throw ConvergenceError(os.str(), res);
            }
            next_check = std::max<Eigen::Index>(k + block, static_cast<Eigen::Index>(1.25 * static_cast<double>(k)));
        }

        // Next block: last images, orthogonalized against the whole basis.
        Eigen::MatrixXd candidate = image.middleCols(k - add, add);
        next = extend_orthonormal(basis, k, std::move(candidate), rng);
        if (k < m && next.cols() == 0) {
            throw ConvergenceError("lowest_eigenpairs: could not extend the Krylov basis", {});
        }
    }
}

}  // namespace efimov
