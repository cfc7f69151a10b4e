#include "doctest.h"

#include "efimov/errors.hpp"
#include "efimov/spectra.hpp"
#include "oracles/random_matrices.hpp"
#include "oracles/sturm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

using namespace efimov;

namespace {

SymmetricOperator generic(const Eigen::MatrixXd& m) { return SymmetricOperator(m, OperatorRole::Generic); }

SymmetricOperator diagonal(std::initializer_list<double> d) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
    Eigen::Index i = 0;
    for (double x : d) v(i++) = x;
    return generic(v.asDiagonal().toDenseMatrix());
}

// Brute-force reference for the tensor-spectrum sets.
struct BruteSets {
    std::set<long long> essential;
    std::set<long long> discrete;
};

BruteSets brute_sets(const std::vector<int>& a, const std::vector<int>& b) {
    BruteSets s;
    s.essential.insert(0);
    for (int x : a) s.essential.insert(x);
    for (int y : b) s.essential.insert(y);
    for (int x : a)
        for (int y : b)
            if (!s.essential.count(x + y)) s.discrete.insert(x + y);
    return s;
}

}  // namespace

TEST_CASE("dense eigensolver agrees with Householder-Sturm bisection") {
    std::mt19937_64 rng(3);
    for (int n : {1, 2, 7, 30}) {
        const Eigen::MatrixXd a = oracle::random_symmetric(n, rng);
        const auto ref = oracle::eigenvalues(a);
        const EigenSystem sys = eig_symmetric(generic(a));
        for (int i = 0; i < n; ++i) CHECK(std::abs(sys.values(i) - ref[static_cast<std::size_t>(i)]) <= 1e-9);
        CHECK((sys.vectors.transpose() * sys.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((a * sys.vectors - sys.vectors * sys.values.asDiagonal()).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((eigenvalues_symmetric(generic(a)) - sys.values).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("two-by-two swap matrix") {
    Eigen::MatrixXd m(2, 2);
    m << 0, 1, 1, 0;
    const EigenSystem sys = eig_symmetric(generic(m));
    CHECK(sys.values(0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(sys.values(1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(std::abs(sys.vectors(0, 1)) - std::sqrt(0.5)) <= 1e-15);
    CHECK(std::abs(sys.vectors(0, 1) - sys.vectors(1, 1)) <= 1e-15);
    CHECK_THROWS(eig_symmetric(SymmetricOperator()));
}

TEST_CASE("SpectralSet merges close values") {
    const SpectralSet s{1.0, 1.0 + 1e-13, 2.0, 0.0};
    CHECK(s.size() == 3);
    CHECK(s.multiplicities() == std::vector<int>{1, 2, 1});
    CHECK(s.contains(2.0));
    CHECK_FALSE(s.contains(1.5));
    CHECK(*s.max() == 2.0);
    CHECK(s.nonzero().size() == 2);
    CHECK_FALSE(SpectralSet{}.max().has_value());
}

TEST_CASE("tensor spectrum of small finite-rank pairs") {
    {
        const TensorSpectrum t = tensor_spectrum(SpectralSet{1.0}, SpectralSet{2.0});
        CHECK(t.sigma.points() == std::vector<double>{0.0, 1.0, 2.0, 3.0});
        CHECK(t.essential.points() == std::vector<double>{0.0, 1.0, 2.0});
        CHECK(t.discrete.points() == std::vector<double>{3.0});
    }
    {
        const TensorSpectrum t = tensor_spectrum(SpectralSet{1.0, 2.0}, SpectralSet{1.0});
        CHECK(t.essential.points() == std::vector<double>{0.0, 1.0, 2.0});
        CHECK(t.discrete.points() == std::vector<double>{3.0});
    }
    {
        const TensorSpectrum t = tensor_spectrum(SpectralSet{}, SpectralSet{});
        CHECK(t.sigma.points() == std::vector<double>{0.0});
        CHECK(t.essential.points() == std::vector<double>{0.0});
        CHECK(t.discrete.empty());
    }
    {
        // Zeros in the input are not part of the discrete spectrum.
        const TensorSpectrum t = tensor_spectrum(SpectralSet{0.0, 1.0}, SpectralSet{-1.0});
        CHECK(t.essential.points() == std::vector<double>{-1.0, 0.0, 1.0});
        CHECK(t.discrete.empty());  // 1 + (-1) = 0 is essential
    }
}

TEST_CASE("cardinality relations on examples") {
    const CardinalityReport r = cardinality_checks(SpectralSet{1.0, 2.0}, SpectralSet{1.0});
    CHECK(r.sd_k1 == 2);
    CHECK(r.sd_k2 == 1);
    CHECK(r.sigma_k1 == 3);
    CHECK(r.sigma_k2 == 2);
    CHECK(r.sigma_e_t == 3);
    CHECK(r.sigma_d_t == 1);
    CHECK(r.all_hold());
}

TEST_CASE("cardinality relations on random integer spectra against brute force") {
    std::mt19937_64 rng(1000);
    std::uniform_int_distribution<int> count(0, 6);
    std::uniform_int_distribution<int> value(-5, 9);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<int> a, b;
        const int na = count(rng), nb = count(rng);
        for (int i = 0; i < na; ++i) a.push_back(value(rng));
        for (int i = 0; i < nb; ++i) b.push_back(value(rng));
        std::vector<double> da(a.begin(), a.end()), db(b.begin(), b.end());
        const SpectralSet s1 = SpectralSet(da).nonzero(), s2 = SpectralSet(db).nonzero();

        std::vector<int> a_nz, b_nz;
        for (double x : s1.points()) a_nz.push_back(static_cast<int>(x));
        for (double y : s2.points()) b_nz.push_back(static_cast<int>(y));
        const BruteSets ref = brute_sets(a_nz, b_nz);

        const TensorSpectrum t = tensor_spectrum(s1, s2);
        CHECK(t.essential.size() == ref.essential.size());
        CHECK(t.discrete.size() == ref.discrete.size());
        for (double v : t.discrete.points()) CHECK(ref.discrete.count(static_cast<long long>(v)) == 1);

        const CardinalityReport r = cardinality_checks(s1, s2);
        CHECK(r.all_hold());
        CHECK(r.sigma_e_t <= r.sd_k1 + r.sd_k2 + 1);
        CHECK(r.sigma_d_t <= r.sd_k1 * r.sd_k2);
    }
}

TEST_CASE("minimax sequence on a diagonal operator") {
    const SymmetricOperator d = diagonal({-2.0, -1.0, 3.0, 5.0});
    for (MinimaxMethod method : {MinimaxMethod::Literal, MinimaxMethod::Eigensolve}) {
        const MinimaxResult r4 = minimax_sequence(d, 4, 0.0, {}, method);
        CHECK(std::abs(r4.mu[0] + 2.0) <= 1e-12);
        CHECK(std::abs(r4.mu[1] + 1.0) <= 1e-12);
        CHECK(r4.mu[2] == 0.0);
        CHECK(r4.mu[3] == 0.0);
        CHECK(r4.tags == std::vector<MinimaxTag>{MinimaxTag::Eigenvalue, MinimaxTag::Eigenvalue,
                                                 MinimaxTag::EdgeSaturated, MinimaxTag::EdgeSaturated});
        CHECK(r4.n_below_edge == 2);
        CHECK(r4.raw[2] == doctest::Approx(3.0));

        const MinimaxResult r2 = minimax_sequence(d, 2, 0.0, {}, method);
        CHECK(std::abs(r2.mu[0] + 2.0) <= 1e-12);
        CHECK(std::abs(r2.mu[1] + 1.0) <= 1e-12);
        CHECK(r2.n_below_edge == 2);
    }
    CHECK(default_edge_tolerance(0.0) == 1e-6);
    CHECK(default_edge_tolerance(-4.0) == 4e-6);
}

TEST_CASE("minimax values equal sorted eigenvalues below the edge") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 12;
        const Eigen::MatrixXd a = oracle::random_symmetric(n, rng);
        const auto ref = oracle::eigenvalues(a);
        const double edge = ref[5] + 0.5 * (ref[6] - ref[5]);
        const MinimaxResult r = minimax_sequence(generic(a), 9, edge, {}, MinimaxMethod::Literal);
        CHECK(r.n_below_edge == 6);
        for (int k = 0; k < 6; ++k) CHECK(std::abs(r.mu[static_cast<std::size_t>(k)] - ref[static_cast<std::size_t>(k)]) <= 1e-9);
        for (int k = 6; k < 9; ++k) CHECK(r.mu[static_cast<std::size_t>(k)] == edge);
        for (std::size_t k = 1; k < r.mu.size(); ++k) CHECK(r.mu[k] >= r.mu[k - 1]);

        const Eigen::MatrixXd& q = r.minimizers;
        REQUIRE(q.cols() == 9);
        CHECK((q.transpose() * q - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() <= 1e-10);

        const MinimaxResult e = minimax_sequence(generic(a), 9, edge, {}, MinimaxMethod::Eigensolve);
        for (std::size_t k = 0; k < 9; ++k) CHECK(std::abs(e.mu[k] - r.mu[k]) <= 1e-9);
    }
}

TEST_CASE("order monotonicity") {
    const SymmetricOperator a = diagonal({-2.0, -1.0, 1.0});
    const SymmetricOperator b = diagonal({-1.5, -1.0, 2.0});
    const OrderReport r = check_order_monotonicity(a, b, 0.0, 3);
    CHECK(r.holds);
    CHECK(r.first_violation == -1);
    CHECK(r.min_eig_difference == doctest::Approx(0.0));
    CHECK_THROWS_AS(check_order_monotonicity(b, a, 0.0, 3), OrderViolation);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd m = oracle::random_symmetric(10, rng);
        const Eigen::MatrixXd p = oracle::random_psd(10, 3, rng);
        const OrderReport rr = check_order_monotonicity(generic(m), generic(m + p), 0.0, 10);
        CHECK(rr.holds);
        CHECK(rr.min_eig_difference >= -1e-10);
    }
}

TEST_CASE("Kronecker sums have Minkowski-sum spectra") {
    std::mt19937_64 rng(6);
    const Eigen::MatrixXd a = oracle::random_symmetric(6, rng);
    const Eigen::MatrixXd b = oracle::random_symmetric(8, rng);
    // A kron I + I kron B, row index i * 8 + j.
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(48, 48);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 8; ++j)
            for (int r = 0; r < 6; ++r)
                for (int s = 0; s < 8; ++s) {
                    double v = 0.0;
                    if (j == s) v += a(i, r);
                    if (i == r) v += b(j, s);
                    k(i * 8 + j, r * 8 + s) = v;
                }
    const auto ea = oracle::eigenvalues(a);
    const auto eb = oracle::eigenvalues(b);
    std::vector<double> sums;
    for (double x : ea)
        for (double y : eb) sums.push_back(x + y);
    std::sort(sums.begin(), sums.end());
    const Eigen::VectorXd got = eigenvalues_symmetric(generic(k));
    for (std::size_t i = 0; i < sums.size(); ++i) CHECK(std::abs(got(static_cast<Eigen::Index>(i)) - sums[i]) <= 1e-9);
}
