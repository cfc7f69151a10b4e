#pragma once

#include <Eigen/Dense>

#include <random>

namespace oracle {

inline Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
    return 0.5 * (a + a.transpose());
}

inline Eigen::MatrixXd random_psd(int n, int rank, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd g(n, rank);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = normal(rng);
    Eigen::MatrixXd p = g * g.transpose();
    return 0.5 * (p + p.transpose());
}

}  // namespace oracle
