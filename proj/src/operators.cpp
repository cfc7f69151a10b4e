#include "efimov/operators.hpp"

#include "efimov/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace efimov {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> sqrt_weights(const Grid1D& grid) {
    std::vector<double> s(grid.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::sqrt(grid.weights()[i]);
    }
    return s;
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::domain_error(std::string(what) + ": non-finite kernel value");
    }
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) {
        return 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace

std::string to_string(OperatorRole role) {
    switch (role) {
        case OperatorRole::H: return "H";
        case OperatorRole::H0: return "H0";
        case OperatorRole::T1: return "T1";
        case OperatorRole::T2: return "T2";
        case OperatorRole::T: return "T";
        case OperatorRole::W1: return "W1";
        case OperatorRole::W2: return "W2";
        case OperatorRole::K1: return "K1";
        case OperatorRole::K2: return "K2";
        case OperatorRole::Generic: return "generic";
    }
    return "unknown";
}

KernelSpec KernelSpec::zero(KernelKind kind) {
    KernelSpec k;
    k.kind = kind;
    k.name = "zero";
    k.evaluate = [](double, double) { return 0.0; };
    return k;
}

KernelSpec KernelSpec::constant(KernelKind kind, double value, Interval axis) {
    KernelSpec k;
    k.kind = kind;
    k.name = "constant";
    k.evaluate = [value](double, double) { return value; };
    if (kind != KernelKind::Potential && value != 0.0) {
        // c = (c |axis|) e0 e0 with e0 = 1 / sqrt(|axis|).
        const double len = axis.length();
        const double e0 = 1.0 / std::sqrt(len);
        k.rank_terms.push_back({value * len, [e0](double) { return e0; }});
    }
    return k;
}

KernelSpec KernelSpec::rank_sum(KernelKind kind, std::vector<RankTerm> terms, std::string name) {
    if (kind == KernelKind::Potential) {
        throw std::invalid_argument("rank_sum: potentials have no rank structure");
    }
    KernelSpec k;
    k.kind = kind;
    k.name = std::move(name);
    k.rank_terms = std::move(terms);
    k.evaluate = [terms = k.rank_terms](double y, double t) {
        double sum = 0.0;
        for (const auto& term : terms) {
            sum += term.coefficient * term.factor(y) * term.factor(t);
        }
        return sum;
    };
    return k;
}

KernelSpec KernelSpec::potential(std::function<double(double, double)> k0, std::string name) {
    KernelSpec k;
    k.kind = KernelKind::Potential;
    k.name = std::move(name);
    k.evaluate = std::move(k0);
    return k;
}

Eigen::VectorXd LinearOperator::operator*(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(dim());
    apply(v, out);
    return out;
}

SymmetricOperator::SymmetricOperator(Eigen::MatrixXd matrix, OperatorRole role, GridShape shape)
    : matrix_(std::move(matrix)), role_(role), shape_(shape) {
    if (matrix_.rows() != matrix_.cols()) {
        throw std::invalid_argument("SymmetricOperator: matrix is not square");
    }
    if (matrix_.size() > 0) {
        const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
        if (!(asym <= kSymmetryTol)) {
            throw std::invalid_argument("SymmetricOperator: asymmetry " + std::to_string(asym) + " exceeds 1e-12");
        }
    }
    if (shape_.nx == 0) {
        shape_.nx = static_cast<std::size_t>(matrix_.rows());
    }
    if (shape_.size() != static_cast<std::size_t>(matrix_.rows())) {
        throw std::invalid_argument("SymmetricOperator: grid shape does not match matrix dimension");
    }
}

void SymmetricOperator::apply(const Eigen::Ref<const Eigen::MatrixXd>& in, Eigen::Ref<Eigen::MatrixXd> out) const {
    out.noalias() = matrix_ * in;
}

SymmetricOperator SymmetricOperator::shifted(double c) const {
    Eigen::MatrixXd m = matrix_;
    m.diagonal().array() += c;
    SymmetricOperator result(std::move(m), role_, shape_);
    result.components_ = components_;
    return result;
}

SymmetricOperator discretize_kernel(const KernelSpec& k, const Grid1D& grid) {
    if (k.kind == KernelKind::Potential) {
        throw std::invalid_argument("discretize_kernel: expected a one-axis kernel, got a potential");
    }
    const auto n = static_cast<Eigen::Index>(grid.size());
    const auto s = sqrt_weights(grid);
    const auto& x = grid.nodes();
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double kv = k.evaluate(x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
            require_finite(kv, "discretize_kernel");
            m(i, j) = kv * (s[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(j)]);
        }
    }
    SymmetricOperator checked(m, k.kind == KernelKind::OnOmega1 ? OperatorRole::K1 : OperatorRole::K2);
    // Within tolerance; make it exact so downstream solvers see a symmetric matrix.
    Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    return SymmetricOperator(std::move(sym), checked.role());
}

Grid2D model_grid(const ModelSpec& spec) {
    return product_grid(build_grid(spec.x_axis.domain, spec.x_axis.breakpoints, spec.x_axis.order),
                        build_grid(spec.y_axis.domain, spec.y_axis.breakpoints, spec.y_axis.order));
}

namespace {

Eigen::VectorXd potential_at_nodes(const KernelSpec& k0, const Grid2D& grid) {
    if (k0.kind != KernelKind::Potential) {
        throw std::invalid_argument("assemble_H0: expected a potential k0(x, y)");
    }
    Eigen::VectorXd d(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.nx(); ++i) {
        for (std::size_t j = 0; j < grid.ny(); ++j) {
            const double v = k0.evaluate(grid.gx.nodes()[i], grid.gy.nodes()[j]);
            require_finite(v, "assemble_H0");
            d(static_cast<Eigen::Index>(grid.flatten(i, j))) = v;
        }
    }
    return d;
}

Eigen::MatrixXd kron_left(const Eigen::MatrixXd& m1, std::size_t ny, double scale) {
    const auto nyi = static_cast<Eigen::Index>(ny);
    const Eigen::Index n = m1.rows() * nyi;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < m1.rows(); ++i) {
        for (Eigen::Index s = 0; s < m1.cols(); ++s) {
            const double v = scale * m1(i, s);
            for (Eigen::Index j = 0; j < nyi; ++j) {
                out(i * nyi + j, s * nyi + j) = v;
            }
        }
    }
    return out;
}

Eigen::MatrixXd kron_right(std::size_t nx, const Eigen::MatrixXd& m2) {
    const Eigen::Index ny = m2.rows();
    const Eigen::Index n = static_cast<Eigen::Index>(nx) * ny;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(nx); ++i) {
        out.block(i * ny, i * ny, ny, ny) = m2;
    }
    return out;
}

}  // namespace

ModelDiscretization discretize_model(const ModelSpec& spec) {
    if (spec.k1.kind != KernelKind::OnOmega1 || spec.k2.kind != KernelKind::OnOmega2) {
        throw std::invalid_argument("discretize_model: k1 must act on the first axis and k2 on the second");
    }
    ModelDiscretization parts;
    parts.grid = model_grid(spec);
    parts.potential = potential_at_nodes(spec.k0, parts.grid);
    parts.k1 = discretize_kernel(spec.k1, parts.grid.gx);
    parts.k2 = discretize_kernel(spec.k2, parts.grid.gy);
    parts.gamma = spec.gamma;
    return parts;
}

SymmetricOperator assemble_H0(const KernelSpec& k0, const Grid2D& grid) {
    Eigen::VectorXd d = potential_at_nodes(k0, grid);
    return SymmetricOperator(d.asDiagonal().toDenseMatrix(), OperatorRole::H0, {grid.nx(), grid.ny()});
}

SymmetricOperator assemble_T1(const KernelSpec& k1, const Grid2D& grid, double gamma) {
    if (k1.kind != KernelKind::OnOmega1) {
        throw std::invalid_argument("assemble_T1: kernel does not act on the first axis");
    }
    const auto m1 = discretize_kernel(k1, grid.gx);
    return SymmetricOperator(kron_left(m1.matrix(), grid.ny(), gamma), OperatorRole::T1, {grid.nx(), grid.ny()});
}

SymmetricOperator assemble_T2(const KernelSpec& k2, const Grid2D& grid) {
    if (k2.kind != KernelKind::OnOmega2) {
        throw std::invalid_argument("assemble_T2: kernel does not act on the second axis");
    }
    const auto m2 = discretize_kernel(k2, grid.gy);
    return SymmetricOperator(kron_right(grid.nx(), m2.matrix()), OperatorRole::T2, {grid.nx(), grid.ny()});
}

SymmetricOperator assemble_H(const ModelSpec& spec, std::size_t dense_cap) {
    const Grid2D grid = model_grid(spec);
    if (grid.size() > dense_cap) {
        throw DenseCapExceeded(grid.size(), dense_cap);
    }
    auto parts = std::make_shared<const ModelDiscretization>(discretize_model(spec));
    ModelOperator h(parts, OperatorRole::H);
    return h.to_dense(dense_cap);
}

void apply_T1(const Eigen::MatrixXd& m1, GridShape shape, double gamma, const Eigen::Ref<const Eigen::VectorXd>& in,
              Eigen::Ref<Eigen::VectorXd> out) {
    const auto nx = static_cast<Eigen::Index>(shape.nx);
    const auto ny = static_cast<Eigen::Index>(shape.ny);
    if (m1.rows() != nx || in.size() != nx * ny || out.size() != nx * ny) {
        throw std::invalid_argument("apply_T1: dimension mismatch");
    }
    Eigen::Map<const RowMajorMatrix> v(in.data(), nx, ny);
    Eigen::Map<RowMajorMatrix> r(out.data(), nx, ny);
    r.noalias() = gamma * (m1 * v);
}

void apply_T2(const Eigen::MatrixXd& m2, GridShape shape, const Eigen::Ref<const Eigen::VectorXd>& in,
              Eigen::Ref<Eigen::VectorXd> out) {
    const auto nx = static_cast<Eigen::Index>(shape.nx);
    const auto ny = static_cast<Eigen::Index>(shape.ny);
    if (m2.rows() != ny || in.size() != nx * ny || out.size() != nx * ny) {
        throw std::invalid_argument("apply_T2: dimension mismatch");
    }
    Eigen::Map<const RowMajorMatrix> v(in.data(), nx, ny);
    Eigen::Map<RowMajorMatrix> r(out.data(), nx, ny);
    // M2 is symmetric, so V M2^T = V M2.
    r.noalias() = v * m2;
}

ModelOperator::ModelOperator(std::shared_ptr<const ModelDiscretization> parts, OperatorRole role)
    : parts_(std::move(parts)), role_(role) {
    switch (role) {
        case OperatorRole::H: c_h0_ = 1.0; c_t1_ = -1.0; c_t2_ = -1.0; break;
        case OperatorRole::H0: c_h0_ = 1.0; break;
        case OperatorRole::T1: c_t1_ = 1.0; break;
        case OperatorRole::T2: c_t2_ = 1.0; break;
        case OperatorRole::T: c_t1_ = 1.0; c_t2_ = 1.0; break;
        case OperatorRole::W1: c_h0_ = 1.0; c_t1_ = -1.0; break;
        case OperatorRole::W2: c_h0_ = 1.0; c_t2_ = -1.0; break;
        default: throw std::invalid_argument("ModelOperator: role " + to_string(role) + " is not a product-grid operator");
    }
}

ModelOperator::ModelOperator(std::shared_ptr<const ModelDiscretization> parts, double c_h0, double c_t1, double c_t2,
                             double shift)
    : parts_(std::move(parts)), role_(OperatorRole::Generic), c_h0_(c_h0), c_t1_(c_t1), c_t2_(c_t2), shift_(shift) {}

Eigen::Index ModelOperator::dim() const { return static_cast<Eigen::Index>(parts_->grid.size()); }

void ModelOperator::apply(const Eigen::Ref<const Eigen::MatrixXd>& in, Eigen::Ref<Eigen::MatrixXd> out) const {
    const auto n = dim();
    if (in.rows() != n || out.rows() != n || in.cols() != out.cols()) {
        throw std::invalid_argument("ModelOperator::apply: dimension mismatch");
    }
    const GridShape shape = parts_->shape();
    Eigen::VectorXd column(n);
    Eigen::VectorXd tmp(n);
    for (Eigen::Index c = 0; c < in.cols(); ++c) {
        column = in.col(c);
        Eigen::VectorXd acc = (c_h0_ * parts_->potential.array() + shift_) * column.array();
        if (c_t1_ != 0.0) {
            apply_T1(parts_->k1.matrix(), shape, parts_->gamma, column, tmp);
            acc += c_t1_ * tmp;
        }
        if (c_t2_ != 0.0) {
            apply_T2(parts_->k2.matrix(), shape, column, tmp);
            acc += c_t2_ * tmp;
        }
        out.col(c) = acc;
    }
}

SymmetricOperator ModelOperator::to_dense(std::size_t cap) const {
    const auto n = static_cast<std::size_t>(dim());
    if (n > cap) {
        throw DenseCapExceeded(n, cap);
    }
    const GridShape shape = parts_->shape();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
    if (c_t1_ != 0.0) {
        m += kron_left(parts_->k1.matrix(), shape.ny, c_t1_ * parts_->gamma);
    }
    if (c_t2_ != 0.0) {
        m += c_t2_ * kron_right(shape.nx, parts_->k2.matrix());
    }
    m.diagonal().array() += c_h0_ * parts_->potential.array() + shift_;
    SymmetricOperator op(std::move(m), role_, shape);
    op.set_components(parts_);
    return op;
}

double quadratic_form(const LinearOperator& op, const Eigen::VectorXd& v) {
    if (v.size() != op.dim()) {
        throw std::invalid_argument("quadratic_form: dimension mismatch");
    }
    const double nn = v.squaredNorm();
    if (!(nn > 0.0)) {
        throw std::invalid_argument("quadratic_form: zero vector");
    }
    return v.dot(op * v) / nn;
}

Eigen::VectorXd sample(const Grid1D& grid, const std::function<double(double)>& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = std::sqrt(grid.weights()[i]) * f(grid.nodes()[i]);
    }
    return v;
}

Eigen::VectorXd sample(const Grid2D& grid, const std::function<double(double, double)>& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.nx(); ++i) {
        for (std::size_t j = 0; j < grid.ny(); ++j) {
            v(static_cast<Eigen::Index>(grid.flatten(i, j))) =
                std::sqrt(grid.weight(i, j)) * f(grid.gx.nodes()[i], grid.gy.nodes()[j]);
        }
    }
    return v;
}

Eigen::VectorXd sample_separable(const Grid2D& grid, const std::function<double(double)>& a,
                                 const std::function<double(double)>& b) {
    const Eigen::VectorXd va = sample(grid.gx, a);
    const Eigen::VectorXd vb = sample(grid.gy, b);
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.nx(); ++i) {
        for (std::size_t j = 0; j < grid.ny(); ++j) {
            v(static_cast<Eigen::Index>(grid.flatten(i, j))) =
                va(static_cast<Eigen::Index>(i)) * vb(static_cast<Eigen::Index>(j));
        }
    }
    return v;
}

double kernel_asymmetry(const KernelSpec& k, const Grid1D& grid) {
    double worst = 0.0;
    const auto& x = grid.nodes();
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            worst = std::max(worst, std::abs(k.evaluate(x[i], x[j]) - k.evaluate(x[j], x[i])));
        }
    }
    return worst;
}

double rank_hint_deviation(const KernelSpec& k, const Grid1D& grid) {
    if (k.rank_terms.empty()) {
        return 0.0;
    }
    double worst = 0.0;
    for (double x : grid.nodes()) {
        for (double s : grid.nodes()) {
            double sum = 0.0;
            for (const auto& term : k.rank_terms) {
                sum += term.coefficient * term.factor(x) * term.factor(s);
            }
            worst = std::max(worst, std::abs(sum - k.evaluate(x, s)));
        }
    }
    return worst;
}

ModelValidation validate_model(const ModelSpec& spec) {
    const ModelDiscretization parts = discretize_model(spec);
    ModelValidation r;
    r.min_k0 = parts.potential.size() > 0 ? parts.potential.minCoeff() : 0.0;
    r.k0_nonnegative = r.min_k0 >= 0.0;
    r.k0_vanishes_at_node = r.min_k0 <= 1e-8;
    r.min_eig_k1 = min_eigenvalue(parts.k1.matrix());
    r.min_eig_k2 = min_eigenvalue(parts.k2.matrix());
    r.k1_psd = r.min_eig_k1 >= -1e-10;
    r.k2_psd = r.min_eig_k2 >= -1e-10;
    r.kernels_symmetric = kernel_asymmetry(spec.k1, parts.grid.gx) <= 1e-12 &&
                          kernel_asymmetry(spec.k2, parts.grid.gy) <= 1e-12;
    return r;
}

std::string ModelValidation::describe() const {
    std::ostringstream os;
    if (!k0_nonnegative) os << "k0 takes negative value " << min_k0 << " at a node; ";
    if (!k0_vanishes_at_node) os << "k0 has no zero at the grid nodes (min " << min_k0 << "); ";
    if (!k1_psd) os << "K1 is not positive semidefinite (min eigenvalue " << min_eig_k1 << "); ";
    if (!k2_psd) os << "K2 is not positive semidefinite (min eigenvalue " << min_eig_k2 << "); ";
    if (!kernels_symmetric) os << "k1 or k2 is not symmetric; ";
    std::string s = os.str();
    if (s.empty()) return "ok";
    s.resize(s.size() - 2);
    return s;
}

}  // namespace efimov
