#ifndef REGCB_RIDGE_HPP
#define REGCB_RIDGE_HPP

#include <cmath>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "regcb/core.hpp"

namespace regcb {

/// Value at the probe and objective on the base history for one probe-augmented fit.
template <typename Scalar>
struct ProbeFit {
    Scalar prediction;
    Scalar objective;
};

/// Sufficient statistics of a weighted ridge problem
///
///   J(theta) = sum_i w_i (theta' phi_i - y_i)^2 + lambda |theta|^2
///            = theta' A theta - 2 b' theta + yy,
///
/// with A = Phi' W Phi + lambda I and b = Phi' W y. Examples are folded in by rank-one
/// updates; nothing about individual examples is stored.
template <typename Scalar>
class RidgeState {
public:
    using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    RidgeState() = default;
    RidgeState(Eigen::Index dim, Scalar lambda)
        : a_(MatrixType::Identity(dim, dim) * lambda), b_(VectorType::Zero(dim)), lambda_(lambda)
    {
        if (!(lambda >= Scalar(0))) throw std::invalid_argument("ridge lambda must be >= 0");
    }

    template <typename Derived>
    void add(const Eigen::MatrixBase<Derived>& phi, Scalar weight, Scalar target)
    {
        if (!(weight >= Scalar(0))) throw std::invalid_argument("example weight must be >= 0");
        if (weight == Scalar(0)) return;
        a_.noalias() += weight * phi * phi.transpose();
        b_.noalias() += (weight * target) * phi;
        yy_ += weight * target * target;
        total_weight_ += weight;
    }

    Eigen::Index dim() const { return b_.size(); }
    Scalar lambda() const { return lambda_; }
    Scalar total_weight() const { return total_weight_; }
    const MatrixType& gram() const { return a_; }
    const VectorType& moment() const { return b_; }
    Scalar target_energy() const { return yy_; }

    template <typename Derived>
    Scalar objective(const Eigen::MatrixBase<Derived>& theta) const
    {
        return theta.dot(a_ * theta) - Scalar(2) * b_.dot(theta) + yy_;
    }

private:
    MatrixType a_;
    VectorType b_;
    Scalar yy_ = Scalar(0);
    Scalar lambda_ = Scalar(1);
    Scalar total_weight_ = Scalar(0);
};

/// Frozen minimizer of a RidgeState. Positive-definite systems use a Cholesky factor;
/// otherwise the minimum-norm solution is taken.
template <typename Scalar>
class RidgeSolution {
public:
    using VectorType = typename RidgeState<Scalar>::VectorType;
    using MatrixType = typename RidgeState<Scalar>::MatrixType;

    RidgeSolution() = default;
    explicit RidgeSolution(RidgeState<Scalar> state) : state_(std::move(state))
    {
        llt_.compute(state_.gram());
        if (llt_.info() == Eigen::Success && state_.dim() > 0) {
            const auto diag = llt_.matrixLLT().diagonal().cwiseAbs();
            // pivots below ~1e-7 of the largest mean a condition number past ~1e14
            positive_definite_ = diag.minCoeff() > Scalar(1e-7) * diag.maxCoeff();
        }
        if (positive_definite_) {
            theta_ = llt_.solve(state_.moment());
        } else {
            theta_ = state_.gram().completeOrthogonalDecomposition().solve(state_.moment());
        }
        objective_min_ = state_.objective(theta_);
    }

    const RidgeState<Scalar>& state() const { return state_; }
    const VectorType& weights() const { return theta_; }
    bool positive_definite() const { return positive_definite_; }
    Scalar objective_min() const { return objective_min_; }

    template <typename Derived>
    Scalar predict(const Eigen::MatrixBase<Derived>& phi) const
    {
        return theta_.dot(phi);
    }

    /// phi' A^{-1} phi. Requires a positive-definite system.
    template <typename Derived>
    Scalar inverse_quadratic(const Eigen::MatrixBase<Derived>& phi) const
    {
        require_pd();
        return phi.dot(llt_.solve(phi));
    }

    /// Minimizer of J(theta) + (w/2)(theta' phi - target)^2, reported as its prediction at
    /// phi and its objective J on the base statistics. The positive-definite path is a
    /// Sherman-Morrison step from the frozen minimizer; the singular path re-solves.
    template <typename Derived>
    ProbeFit<Scalar> probe(const Eigen::MatrixBase<Derived>& phi, Scalar w, Scalar target) const
    {
        if (!(w >= Scalar(0))) throw std::invalid_argument("probe weight must be >= 0");
        const Scalar c = w / Scalar(2);
        const Scalar z0 = predict(phi);
        if (positive_definite_) {
            const VectorType u = llt_.solve(phi);
            const Scalar s = phi.dot(u);
            const Scalar k = c * (target - z0) / (Scalar(1) + c * s);
            return {z0 + k * s, objective_min_ + k * k * s};
        }
        MatrixType a = state_.gram();
        a.noalias() += c * phi * phi.transpose();
        const VectorType b = state_.moment() + (c * target) * phi;
        const VectorType theta = a.completeOrthogonalDecomposition().solve(b);
        return {theta.dot(phi), state_.objective(theta)};
    }

private:
    void require_pd() const
    {
        if (!positive_definite_) throw InvalidState("ridge system is singular");
    }

    RidgeState<Scalar> state_;
    Eigen::LLT<MatrixType> llt_;
    VectorType theta_;
    Scalar objective_min_ = Scalar(0);
    bool positive_definite_ = false;
};

using RidgeStated = RidgeState<double>;
using RidgeSolutiond = RidgeSolution<double>;

}  // namespace regcb

#endif  // REGCB_RIDGE_HPP
