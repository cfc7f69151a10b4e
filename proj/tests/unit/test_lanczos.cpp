#include "doctest.h"

#include "efimov/errors.hpp"
#include "efimov/hubbard_example.hpp"
#include "efimov/spectra.hpp"
#include "oracles/random_matrices.hpp"

#include <cmath>
#include <random>

using namespace efimov;

namespace {

SymmetricOperator generic(const Eigen::MatrixXd& m) { return SymmetricOperator(m, OperatorRole::Generic); }

}  // namespace

TEST_CASE("lowest three of diag(1..100)") {
    Eigen::VectorXd d(100);
    for (int i = 0; i < 100; ++i) d(i) = i + 1.0;
    const SymmetricOperator op = generic(d.asDiagonal().toDenseMatrix());
    const PartialEigenSystem r = lowest_eigenpairs(op, 3);
    REQUIRE(r.values.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(r.values(i) - (i + 1.0)) <= 1e-10);
    for (double res : r.residuals) CHECK(res <= 1e-10);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(std::abs(r.vectors(i, i)) - 1.0) <= 1e-9);
}

TEST_CASE("requesting every pair reproduces the full solve") {
    std::mt19937_64 rng(21);
    const Eigen::MatrixXd a = oracle::random_symmetric(25, rng);
    const auto full = eigenvalues_symmetric(generic(a));
    const PartialEigenSystem r = lowest_eigenpairs(generic(a), 25);
    CHECK((r.values - full).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("matrix-free model operator agrees with the dense solve") {
    hubbard::Example5Params p;
    p.M = 4;
    p.N = 4;
    p.order = 4;
    const ModelSpec spec = hubbard::example_model(p);
    auto parts = std::make_shared<const ModelDiscretization>(discretize_model(spec));
    const ModelOperator h(parts, OperatorRole::H);
    const auto dense = eigenvalues_symmetric(h.to_dense(kDefaultDenseCap));
    const PartialEigenSystem r = lowest_eigenpairs(h, 5);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(r.values(i) - dense(i)) <= 1e-8);
    // Ritz vectors are eigenvectors of H.
    Eigen::MatrixXd hv(r.vectors.rows(), r.vectors.cols());
    h.apply(r.vectors, hv);
    CHECK((hv - r.vectors * r.values.asDiagonal()).colwise().norm().maxCoeff() <= 1e-9);
}

TEST_CASE("fixed seed gives identical output") {
    std::mt19937_64 rng(8);
    const Eigen::MatrixXd a = oracle::random_symmetric(120, rng);
    LanczosOptions o;
    o.seed = 42;
    const PartialEigenSystem x = lowest_eigenpairs(generic(a), 6, o);
    const PartialEigenSystem y = lowest_eigenpairs(generic(a), 6, o);
    CHECK(x.values == y.values);
    CHECK(x.vectors == y.vectors);
    CHECK(x.basis_size == y.basis_size);
}

TEST_CASE("insufficient basis raises ConvergenceError") {
    std::mt19937_64 rng(9);
    const Eigen::MatrixXd a = oracle::random_symmetric(200, rng);
    LanczosOptions o;
    o.max_basis = 8;
    o.block_size = 4;
    try {
        (void)lowest_eigenpairs(generic(a), 4, o);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.best_residuals().size() == 4);
        CHECK(*std::max_element(e.best_residuals().begin(), e.best_residuals().end()) > o.tol);
    }
    CHECK_THROWS_AS(lowest_eigenpairs(generic(a), 0), std::invalid_argument);
    CHECK_THROWS_AS(lowest_eigenpairs(generic(a), 201), std::invalid_argument);
}
