#ifndef REGCB_TESTS_SUPPORT_HPP
#define REGCB_TESTS_SUPPORT_HPP

// Generators and independent reference computations shared by the test binaries.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "regcb/core.hpp"
#include "regcb/random.hpp"

namespace regcb::testing {

inline Vector gaussian_vector(Rng& rng, Eigen::Index n)
{
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = standard_normal(rng);
    return v;
}

inline double uniform(Rng& rng, double lo, double hi)
{
    return lo + (hi - lo) * uniform01(rng);
}

inline Context plain_context(Vector x)
{
    return Context{std::move(x), std::nullopt, std::nullopt};
}

inline Context id_context(std::size_t id, std::size_t n)
{
    Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
    e[static_cast<Eigen::Index>(id)] = 1.0;
    return Context{std::move(e), std::nullopt, id};
}

/// Random weighted regression problem in design-matrix form.
struct DenseProblem {
    Matrix phi;      ///< n x d
    Vector weights;  ///< n
    Vector targets;  ///< n
    double lambda = 1.0;
};

inline DenseProblem random_problem(Rng& rng, Eigen::Index n, Eigen::Index d, double lambda)
{
    DenseProblem p;
    p.phi.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i) p.phi.row(i) = gaussian_vector(rng, d).transpose() / std::sqrt(double(d));
    p.weights.resize(n);
    p.targets.resize(n);
    const Vector truth = gaussian_vector(rng, d) * 0.3;
    for (Eigen::Index i = 0; i < n; ++i) {
        p.weights[i] = uniform(rng, 0.5, 2.0);
        p.targets[i] = std::clamp(0.5 + p.phi.row(i).dot(truth) + 0.1 * standard_normal(rng), 0.0, 1.0);
    }
    p.lambda = lambda;
    return p;
}

/// Minimizer of sum w (theta'phi - y)^2 + lambda |theta|^2 from the dense normal equations,
/// solved with a full-pivot LU rather than a Cholesky factor.
inline Vector dense_ridge(const DenseProblem& p)
{
    const Eigen::Index d = p.phi.cols();
    const Matrix a = p.phi.transpose() * p.weights.asDiagonal() * p.phi + p.lambda * Matrix::Identity(d, d);
    const Vector b = p.phi.transpose() * p.weights.cwiseProduct(p.targets);
    return a.fullPivLu().solve(b);
}

inline double dense_objective(const DenseProblem& p, const Vector& theta)
{
    const Vector r = p.phi * theta - p.targets;
    return r.dot(p.weights.cwiseProduct(r)) + p.lambda * theta.squaredNorm();
}

/// Extreme of theta'phi over {theta : J(theta) <= J_min + c} found by maximizing over
/// sampled directions on the ellipsoid boundary, refined by coordinate search. Only used to
/// cross-check the analytic bound from below.
inline double sampled_ellipsoid_max(const DenseProblem& p, const Vector& probe, double c, Rng& rng, int samples)
{
    const Eigen::Index d = p.phi.cols();
    const Matrix a = p.phi.transpose() * p.weights.asDiagonal() * p.phi + p.lambda * Matrix::Identity(d, d);
    const Vector center = dense_ridge(p);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    // theta = center + sqrt(c) * V diag(1/sqrt(ev)) u, |u| = 1
    const Matrix map = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal();
    double best = -1e300;
    for (int s = 0; s < samples; ++s) {
        Vector u = gaussian_vector(rng, d);
        u.normalize();
        best = std::max(best, probe.dot(center + std::sqrt(c) * map * u));
    }
    return best;
}

}  // namespace regcb::testing

#endif  // REGCB_TESTS_SUPPORT_HPP
