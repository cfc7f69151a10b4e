#pragma once

#include "efimov/quadrature.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace efimov {

// Every vector below that represents a function f on a grid stores the
// scaled samples sqrt(w) * f(node); on a product grid sqrt(w_i w_j) f(x_i, y_j).
// The Euclidean inner product of two such vectors is then the quadrature
// approximation of the L2 inner product, and Nystrom matrices are symmetric.

enum class KernelKind {
    OnOmega1,   ///< k1(x, s) on the first axis squared
    OnOmega2,   ///< k2(y, t) on the second axis squared
    Potential,  ///< k0(x, y) on the product domain
};

/// One term lambda * e(y) e(t) of a rank-structured kernel.
struct RankTerm {
    double coefficient = 0.0;
    std::function<double(double)> factor;
};

struct KernelSpec {
    KernelKind kind = KernelKind::OnOmega1;
    std::function<double(double, double)> evaluate;
    std::string name;
    /// Optional rank-structure hint. When present the factors are assumed
    /// orthonormal on the axis, so the coefficients are the nonzero eigenvalues.
    std::vector<RankTerm> rank_terms;
    /// The rank terms truncate an infinite series with nonzero coefficients.
    bool infinite_series = false;

    static KernelSpec zero(KernelKind kind);
    static KernelSpec constant(KernelKind kind, double value, Interval axis = {});
    static KernelSpec rank_sum(KernelKind kind, std::vector<RankTerm> terms, std::string name = "rank_sum");
    static KernelSpec potential(std::function<double(double, double)> k0, std::string name = "potential");
};

struct AxisSpec {
    Interval domain{0.0, 1.0};
    std::vector<double> breakpoints;
    int order = 8;
};

/// One instance of H = H0 - gamma T1 - T2.
struct ModelSpec {
    KernelSpec k0 = KernelSpec::zero(KernelKind::Potential);
    KernelSpec k1 = KernelSpec::zero(KernelKind::OnOmega1);
    KernelSpec k2 = KernelSpec::zero(KernelKind::OnOmega2);
    double gamma = 1.0;
    AxisSpec x_axis;
    AxisSpec y_axis;
};

enum class OperatorRole { H, H0, T1, T2, T, W1, W2, K1, K2, Generic };

std::string to_string(OperatorRole role);

/// Grid dimensions behind an operator; ny == 0 marks a one-axis operator.
struct GridShape {
    std::size_t nx = 0;
    std::size_t ny = 0;

    std::size_t size() const noexcept { return ny == 0 ? nx : nx * ny; }
};

/// Symmetric linear map that can act on a block of column vectors.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual Eigen::Index dim() const = 0;
    virtual void apply(const Eigen::Ref<const Eigen::MatrixXd>& in, Eigen::Ref<Eigen::MatrixXd> out) const = 0;

    Eigen::VectorXd operator*(const Eigen::VectorXd& v) const;
};

struct ModelDiscretization;

/// Dense real symmetric matrix in the scaled coordinates, with grid metadata.
class SymmetricOperator : public LinearOperator {
public:
    static constexpr double kSymmetryTol = 1e-12;

    SymmetricOperator() = default;
    /// Throws std::invalid_argument when M is not square or not symmetric to kSymmetryTol.
    SymmetricOperator(Eigen::MatrixXd matrix, OperatorRole role, GridShape shape = {});

    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    OperatorRole role() const noexcept { return role_; }
    const GridShape& shape() const noexcept { return shape_; }

    Eigen::Index dim() const override { return matrix_.rows(); }
    void apply(const Eigen::Ref<const Eigen::MatrixXd>& in, Eigen::Ref<Eigen::MatrixXd> out) const override;

    /// Component operators cached by assemble_H; null for everything else.
    const std::shared_ptr<const ModelDiscretization>& components() const noexcept { return components_; }
    void set_components(std::shared_ptr<const ModelDiscretization> parts) { components_ = std::move(parts); }

    /// Returns M + c I with the same metadata.
    SymmetricOperator shifted(double c) const;

private:
    Eigen::MatrixXd matrix_;
    OperatorRole role_ = OperatorRole::Generic;
    GridShape shape_{};
    std::shared_ptr<const ModelDiscretization> components_;
};

/// Everything needed to apply any of H, H0, T1, T2, T, W1, W2 without forming
/// the (nx ny)^2 matrix.
struct ModelDiscretization {
    Grid2D grid;
    Eigen::VectorXd potential;  ///< k0 at nodes, flattened i * ny + j
    SymmetricOperator k1;       ///< Nystrom matrix of k1 on gx (no gamma)
    SymmetricOperator k2;       ///< Nystrom matrix of k2 on gy
    double gamma = 1.0;

    GridShape shape() const { return {grid.nx(), grid.ny()}; }
};

ModelDiscretization discretize_model(const ModelSpec& spec);

/// c0 H0 + c1 gamma T1 + c2 T2 applied matrix-free via the Kronecker structure.
class ModelOperator : public LinearOperator {
public:
    ModelOperator(std::shared_ptr<const ModelDiscretization> parts, OperatorRole role);
    ModelOperator(std::shared_ptr<const ModelDiscretization> parts, double c_h0, double c_t1, double c_t2,
                  double shift = 0.0);

    Eigen::Index dim() const override;
    void apply(const Eigen::Ref<const Eigen::MatrixXd>& in, Eigen::Ref<Eigen::MatrixXd> out) const override;

    OperatorRole role() const noexcept { return role_; }
    const ModelDiscretization& parts() const noexcept { return *parts_; }
    const std::shared_ptr<const ModelDiscretization>& shared_parts() const noexcept { return parts_; }

    /// Throws DenseCapExceeded when dim() > cap.
    SymmetricOperator to_dense(std::size_t cap) const;

private:
    std::shared_ptr<const ModelDiscretization> parts_;
    OperatorRole role_ = OperatorRole::Generic;
    double c_h0_ = 0.0;
    double c_t1_ = 0.0;
    double c_t2_ = 0.0;
    double shift_ = 0.0;
};

inline constexpr std::size_t kDefaultDenseCap = 6400;

/// M[i][j] = sqrt(w_i) k(x_i, x_j) sqrt(w_j).
SymmetricOperator discretize_kernel(const KernelSpec& k, const Grid1D& grid);

SymmetricOperator assemble_H0(const KernelSpec& k0, const Grid2D& grid);
/// gamma (M1 kron I_y).
SymmetricOperator assemble_T1(const KernelSpec& k1, const Grid2D& grid, double gamma = 1.0);
/// I_x kron M2.
SymmetricOperator assemble_T2(const KernelSpec& k2, const Grid2D& grid);
/// Dense H = H0 - gamma T1 - T2. Components are cached on the result.
SymmetricOperator assemble_H(const ModelSpec& spec, std::size_t dense_cap = kDefaultDenseCap);

/// Matrix-free (gamma M1 kron I) v for v laid out i * ny + j.
void apply_T1(const Eigen::MatrixXd& m1, GridShape shape, double gamma, const Eigen::Ref<const Eigen::VectorXd>& in,
              Eigen::Ref<Eigen::VectorXd> out);
/// Matrix-free (I kron M2) v.
void apply_T2(const Eigen::MatrixXd& m2, GridShape shape, const Eigen::Ref<const Eigen::VectorXd>& in,
              Eigen::Ref<Eigen::VectorXd> out);

/// Rayleigh quotient v^T M v / v^T v. Throws on a zero vector or size mismatch.
double quadratic_form(const LinearOperator& op, const Eigen::VectorXd& v);

/// sqrt(w_i) f(x_i).
Eigen::VectorXd sample(const Grid1D& grid, const std::function<double(double)>& f);
/// sqrt(w_i w_j) f(x_i, y_j).
Eigen::VectorXd sample(const Grid2D& grid, const std::function<double(double, double)>& f);
/// sqrt(w_i w_j) a(x_i) b(y_j).
Eigen::VectorXd sample_separable(const Grid2D& grid, const std::function<double(double)>& a,
                                 const std::function<double(double)>& b);

/// Largest |k(x_i, x_j) - k(x_j, x_i)| over all node pairs of a one-axis kernel.
double kernel_asymmetry(const KernelSpec& k, const Grid1D& grid);
/// Largest |evaluator - rank sum| over node pairs; 0 when no hint is present.
double rank_hint_deviation(const KernelSpec& k, const Grid1D& grid);

struct ModelValidation {
    double min_k0 = 0.0;
    double min_eig_k1 = 0.0;
    double min_eig_k2 = 0.0;
    bool k0_nonnegative = false;
    bool k0_vanishes_at_node = false;
    bool k1_psd = false;
    bool k2_psd = false;
    bool kernels_symmetric = false;

    bool ok() const noexcept {
        return k0_nonnegative && k0_vanishes_at_node && k1_psd && k2_psd && kernels_symmetric;
    }
    std::string describe() const;
};

/// Checks the standing assumptions on k0, K1, K2 at the grid nodes.
ModelValidation validate_model(const ModelSpec& spec);

Grid2D model_grid(const ModelSpec& spec);

}  // namespace efimov
