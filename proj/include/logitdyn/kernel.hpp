#pragma once

// Logit update rule, the full transition matrix over the profile space,
// stationary distributions and single-chain simulation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "logitdyn/error.hpp"
#include "logitdyn/game.hpp"
#include "logitdyn/random.hpp"

namespace logitdyn {

inline constexpr std::size_t kDenseStateCap = 4096;

/// Inverse noise. Finite and nonnegative.
class Beta {
public:
    explicit Beta(double value) : value_(value) {
        if (!std::isfinite(value) || value < 0.0)
            throw invalid_parameters("beta must be finite and >= 0, got " + std::to_string(value));
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

/// A probability vector. Entries nonnegative, summing to 1 within 1e-12.
class Distribution {
public:
    Distribution() = default;

    explicit Distribution(Eigen::VectorXd probs, double tol = 1e-12) : p_(std::move(probs)) {
        if (p_.size() == 0) throw invalid_parameters("empty distribution");
        for (Eigen::Index k = 0; k < p_.size(); ++k)
            if (!(p_[k] >= 0.0)) throw invalid_parameters("distribution entry is negative or NaN");
        // Summation error grows with length, so the tolerance does too.
        const double slack = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(p_.size()));
        if (std::abs(p_.sum() - 1.0) > slack) throw invalid_parameters("distribution does not sum to 1");
    }

    explicit Distribution(const std::vector<double>& probs, double tol = 1e-12)
        : Distribution(Eigen::Map<const Eigen::VectorXd>(probs.data(), static_cast<Eigen::Index>(probs.size())),
                       tol) {}

    /// Clamps rounding-level negatives to 0 and rescales to unit mass.
    static Distribution normalized(Eigen::VectorXd v) {
        for (Eigen::Index k = 0; k < v.size(); ++k)
            if (v[k] < 0.0) v[k] = 0.0;
        const double s = v.sum();
        if (!(s > 0.0) || !std::isfinite(s)) throw numerical_error("cannot normalize a zero or non-finite vector");
        return Distribution(v / s);
    }

    static Distribution uniform(std::size_t size) {
        return Distribution(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(size), 1.0 / static_cast<double>(size)));
    }

    static Distribution point_mass(std::size_t size, std::size_t at) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size));
        v[static_cast<Eigen::Index>(at)] = 1.0;
        return Distribution(std::move(v));
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(p_.size()); }
    double operator[](std::size_t k) const { return p_[static_cast<Eigen::Index>(k)]; }
    const Eigen::VectorXd& vector() const noexcept { return p_; }
    double min() const { return p_.minCoeff(); }

private:
    Eigen::VectorXd p_;
};

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Row-stochastic kernel over the profile space. Stored sparse (a logit chain has at
/// most 1 + sum_i (|S_i| - 1) nonzeros per row); dense() gives the full matrix.
class TransitionMatrix {
public:
    TransitionMatrix() = default;

    explicit TransitionMatrix(SparseRowMatrix p, double tol = 1e-12) : p_(std::move(p)) {
        p_.makeCompressed();
        if (p_.rows() != p_.cols()) throw dimension_error("transition matrix must be square");
        for (Eigen::Index r = 0; r < p_.rows(); ++r) {
            double s = 0.0;
            for (SparseRowMatrix::InnerIterator it(p_, r); it; ++it) {
                if (!(it.value() >= 0.0)) throw invalid_parameters("transition matrix has a negative entry");
                s += it.value();
            }
            if (std::abs(s - 1.0) > tol)
                throw invalid_parameters("row " + std::to_string(r) + " of transition matrix sums to " +
                                         std::to_string(s));
        }
    }

    static TransitionMatrix from_dense(const Eigen::MatrixXd& m, double tol = 1e-12) {
        return TransitionMatrix(m.sparseView(0.0, 0.0), tol);
    }

    std::size_t size() const noexcept { return static_cast<std::size_t>(p_.rows()); }
    double operator()(std::size_t x, std::size_t y) const {
        return p_.coeff(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
    const SparseRowMatrix& sparse() const noexcept { return p_; }
    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(p_); }

    /// Largest |row sum - 1|.
    double stochasticity_error() const {
        double worst = 0.0;
        for (Eigen::Index r = 0; r < p_.rows(); ++r) worst = std::max(worst, std::abs(p_.row(r).sum() - 1.0));
        return worst;
    }

    /// Full matrix as CSV, one row per line, 17 significant digits.
    void write_csv(std::ostream& os) const {
        const Eigen::MatrixXd d = dense();
        const auto old = os.precision(17);
        for (Eigen::Index r = 0; r < d.rows(); ++r) {
            for (Eigen::Index c = 0; c < d.cols(); ++c) os << (c ? "," : "") << d(r, c);
            os << '\n';
        }
        os.precision(old);
    }

private:
    SparseRowMatrix p_;
};

namespace detail {

// sigma over S_i into `out`, using `scratch` (a copy of x) to evaluate deviations.
inline void logit_weights(const GameSpec& game, Profile& scratch, std::size_t i, double beta,
                          std::vector<double>& out) {
    const std::size_t m = game.strategies(i);
    const Strategy own = scratch[i];
    out.resize(m);
    double top = -std::numeric_limits<double>::infinity();
    for (Strategy s = 0; s < m; ++s) {
        scratch[i] = s;
        out[s] = beta * game.utility(i, scratch);
        if (!std::isfinite(out[s])) throw numerical_error("non-finite utility in logit update");
        top = std::max(top, out[s]);
    }
    scratch[i] = own;
    double total = 0.0;
    for (double& w : out) {
        w = std::exp(w - top);
        total += w;
    }
    for (double& w : out) w /= total;
}

}  // namespace detail

/// sigma_i(. | x): the logit choice probabilities of player i at profile x.
inline Distribution update_distribution(const GameSpec& game, const Profile& x, std::size_t i, Beta beta) {
    game.validate(x);
    game.validate_player(i);
    Profile scratch = x;
    std::vector<double> w;
    detail::logit_weights(game, scratch, i, beta.value(), w);
    return Distribution(w);
}

inline TransitionMatrix transition_matrix(const GameSpec& game, Beta beta, std::size_t cap = kDenseStateCap) {
    const ProfileSpace space(game, cap);
    const std::size_t n = game.players();
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<Eigen::Triplet<double>> entries;
    std::size_t per_row = 1;
    for (std::size_t i = 0; i < n; ++i) per_row += game.strategies(i) - 1;
    entries.reserve(space.size() * per_row);
    std::vector<double> sigma;
    for (std::size_t k = 0; k < space.size(); ++k) {
        Profile x = space.decode(k);
        double stay = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            detail::logit_weights(game, x, i, beta.value(), sigma);
            for (Strategy s = 0; s < sigma.size(); ++s) {
                if (s == x[i])
                    stay += inv_n * sigma[s];
                else
                    entries.emplace_back(static_cast<int>(k), static_cast<int>(space.with(k, i, s)), inv_n * sigma[s]);
            }
        }
        entries.emplace_back(static_cast<int>(k), static_cast<int>(k), stay);
    }
    const auto size = static_cast<Eigen::Index>(space.size());
    SparseRowMatrix p(size, size);
    p.setFromTriplets(entries.begin(), entries.end());
    return TransitionMatrix(std::move(p));
}

/// pi(x) proportional to e^{beta Phi(x)}.
inline Distribution gibbs_stationary(const GameSpec& game, Beta beta, std::size_t cap = kDefaultEnumerationCap) {
    if (!game.has_potential()) throw missing_potential("game '" + game.name() + "' has no potential attached");
    const ProfileSpace space(game, cap);
    Eigen::VectorXd v(static_cast<Eigen::Index>(space.size()));
    for (std::size_t k = 0; k < space.size(); ++k)
        v[static_cast<Eigen::Index>(k)] = beta.value() * game.potential(space.decode(k));
    v.array() = (v.array() - v.maxCoeff()).exp();
    return Distribution(v / v.sum());
}

/// Log of the partition function sum_x e^{beta Phi(x)}.
inline double log_partition(const GameSpec& game, Beta beta, std::size_t cap = kDefaultEnumerationCap) {
    if (!game.has_potential()) throw missing_potential("game '" + game.name() + "' has no potential attached");
    const ProfileSpace space(game, cap);
    std::vector<double> e(space.size());
    for (std::size_t k = 0; k < space.size(); ++k) e[k] = beta.value() * game.potential(space.decode(k));
    const double top = *std::max_element(e.begin(), e.end());
    double s = 0.0;
    for (double v : e) s += std::exp(v - top);
    return top + std::log(s);
}

/// || pi P - pi ||_1.
inline double stationarity_residual(const TransitionMatrix& p, const Eigen::VectorXd& pi) {
    const Eigen::VectorXd next = (pi.transpose() * p.sparse()).transpose();
    return (next - pi).lpNorm<1>();
}

inline constexpr std::uint64_t kPowerIterationCap = 10'000'000;
inline constexpr std::size_t kGthStateCap = 1024;

namespace detail {

// pi G with G = P - I and the diagonal rebuilt as minus the off-diagonal row sum,
// so holding probabilities close to 1 do not lose the small escape rates.
inline Eigen::VectorXd generator_apply(const TransitionMatrix& p, const Eigen::VectorXd& pi) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(pi.size());
    const auto& m = p.sparse();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (SparseRowMatrix::InnerIterator it(m, r); it; ++it)
            if (it.col() != r) {
                const double f = pi[r] * it.value();
                out[it.col()] += f;
                out[r] -= f;
            }
    return out;
}

// Grassmann-Taksar-Heyman elimination: subtraction free, accurate entrywise
// even when the chain is nearly decomposable.
inline Eigen::VectorXd gth_solve(const TransitionMatrix& p) {
    const auto size = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd a = p.dense();
    for (Eigen::Index k = size - 1; k > 0; --k) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < k; ++j) s += a(k, j);
        if (!(s > 0.0)) throw numerical_error("stationary_solve: chain is reducible");
        for (Eigen::Index i = 0; i < k; ++i) a(i, k) /= s;
        for (Eigen::Index j = 0; j < k; ++j) {
            const double akj = a(k, j);
            if (akj == 0.0) continue;
            for (Eigen::Index i = 0; i < k; ++i) a(i, j) += a(i, k) * akj;
        }
    }
    Eigen::VectorXd pi(size);
    pi[0] = 1.0;
    for (Eigen::Index k = 1; k < size; ++k) {
        double v = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) v += pi[i] * a(i, k);
        pi[k] = v;
    }
    return pi / pi.sum();
}

inline Eigen::VectorXd sparse_generator_solve(const TransitionMatrix& p) {
    const auto size = static_cast<Eigen::Index>(p.size());
    // G^T pi = 0 with the last equation replaced by sum(pi) = 1.
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(p.sparse().nonZeros() + 2 * size));
    std::vector<double> leave(static_cast<std::size_t>(size), 0.0);
    for (Eigen::Index r = 0; r < size; ++r)
        for (SparseRowMatrix::InnerIterator it(p.sparse(), r); it; ++it)
            if (it.col() != r) {
                leave[static_cast<std::size_t>(r)] += it.value();
                if (it.col() != size - 1) entries.emplace_back(it.col(), r, it.value());
            }
    for (Eigen::Index k = 0; k < size - 1; ++k) entries.emplace_back(k, k, -leave[static_cast<std::size_t>(k)]);
    for (Eigen::Index k = 0; k < size; ++k) entries.emplace_back(size - 1, k, 1.0);
    Eigen::SparseMatrix<double> a(size, size);
    a.setFromTriplets(entries.begin(), entries.end());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    rhs[size - 1] = 1.0;
    Eigen::VectorXd pi;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() == Eigen::Success) pi = lu.solve(rhs);
    if (pi.size() != size || !pi.allFinite()) pi = Eigen::VectorXd::Constant(size, 1.0 / static_cast<double>(size));
    pi = pi.cwiseMax(0.0);
    return pi / pi.sum();
}

}  // namespace detail

/// The unique pi with pi P = pi. GTH elimination for small chains, sparse LU
/// above kGthStateCap, then power-iteration polish until the residual is below
/// `residual`.
inline Distribution stationary_solve(const TransitionMatrix& p, double residual = 1e-12,
                                     std::uint64_t max_iterations = kPowerIterationCap) {
    if (p.size() == 1) return Distribution::uniform(1);
    Eigen::VectorXd pi = p.size() <= kGthStateCap ? detail::gth_solve(p) : detail::sparse_generator_solve(p);
    for (std::uint64_t it = 0; detail::generator_apply(p, pi).lpNorm<1>() >= residual; ++it) {
        if (it >= max_iterations)
            throw numerical_error("stationary_solve: power iteration did not reach residual " +
                                  std::to_string(residual));
        Eigen::VectorXd next = pi + detail::generator_apply(p, pi);
        pi = next.cwiseMax(0.0) / next.cwiseMax(0.0).sum();
    }
    return Distribution(pi);
}

/// max |pi(x) P(x,y) - pi(y) P(y,x)| over all pairs.
inline double detailed_balance_violation(const TransitionMatrix& p, const Distribution& pi) {
    if (pi.size() != p.size()) throw dimension_error("distribution and matrix sizes differ");
    double worst = 0.0;
    const auto& m = p.sparse();
    for (Eigen::Index x = 0; x < m.rows(); ++x)
        for (SparseRowMatrix::InnerIterator it(m, x); it; ++it) {
            const auto y = it.col();
            const double flow = pi[static_cast<std::size_t>(x)] * it.value() - pi[static_cast<std::size_t>(y)] * m.coeff(y, x);
            worst = std::max(worst, std::abs(flow));
        }
    return worst;
}

inline bool detailed_balance_check(const TransitionMatrix& p, const Distribution& pi, double tol = 1e-12) {
    return detailed_balance_violation(p, pi) < tol;
}

/// Sample an index from probabilities `w` with a single uniform draw.
inline std::size_t sample_index(const std::vector<double>& w, Rng& rng) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
        acc += w[k];
        if (u < acc) return k;
    }
    return w.size() - 1;
}

/// Runs `steps` logit updates from x0, calling visit(t, x) for t = 0..steps.
template <class Visitor>
void simulate(const GameSpec& game, const Profile& x0, Beta beta, std::uint64_t steps, Rng& rng, Visitor&& visit) {
    game.validate(x0);
    Profile x = x0;
    std::vector<double> sigma;
    visit(std::uint64_t{0}, static_cast<const Profile&>(x));
    for (std::uint64_t t = 1; t <= steps; ++t) {
        const auto i = static_cast<std::size_t>(rng.uniform_index(game.players()));
        detail::logit_weights(game, x, i, beta.value(), sigma);
        x[i] = static_cast<Strategy>(sample_index(sigma, rng));
        visit(t, static_cast<const Profile&>(x));
    }
}

/// Trajectory x_0..x_steps under the named generator seeded with `seed`.
inline std::vector<Profile> simulate_trajectory(const GameSpec& game, const Profile& x0, Beta beta,
                                                std::uint64_t steps, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Profile> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    simulate(game, x0, beta, steps, rng, [&](std::uint64_t, const Profile& x) { out.push_back(x); });
    return out;
}

}  // namespace logitdyn
