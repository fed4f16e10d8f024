#pragma once

// Lower estimates of p->p operator norms for truncated convolution operators:
// power iteration at p = 2 and the nonlinear power method for general
// p in (1, oo), restricted to entrywise nonnegative matrices.

#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sphavg/ball.hpp"
#include "sphavg/errors.hpp"
#include "sphavg/function.hpp"
#include "sphavg/operator.hpp"

namespace sphavg {

struct SolverOptions {
    double tol = 1e-8;
    int max_iters = 5000;
    int restarts = 3;
    std::uint64_t seed = 42;
    int threads = 1;
};

struct NormEstimate {
    double value = 0.0;     // ||M w||_p / ||w||_p for the stored witness
    double p = 2.0;
    std::vector<double> witness;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline double lp_norm(std::span<const double> v, double p) {
    double s = 0.0;
    for (double x : v) s += std::pow(std::abs(x), p);
    return std::pow(s, 1.0 / p);
}

inline void check_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) throw numerical_error("non-finite value in iteration");
}

// psi_q(t) = |t|^(q-1) sign(t)
inline void apply_psi(std::vector<double>& v, double q) {
    for (double& x : v) {
        double m = std::pow(std::abs(x), q - 1.0);
        x = x < 0 ? -m : m;
    }
}

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Estimates the remaining error of a linearly converging value sequence from
// the last two successive differences (err ~ diff * rho / (1 - rho)), so the
// caller's tolerance bounds the actual error rather than the step size.
class ConvergenceGauge {
public:
    // returns true once the estimated relative error drops below tol
    bool update(double value, double tol) {
        if (have_prev_) {
            double diff = std::abs(value - prev_);
            double err = diff;
            if (have_diff_ && prev_diff_ > 0.0 && diff < prev_diff_) {
                double rho = diff / prev_diff_;
                err = diff * rho / (1.0 - rho);
            } else if (diff > 0.0) {
                err = std::max(diff, value); // no contraction seen yet
            }
            prev_diff_ = diff;
            have_diff_ = true;
            if (err <= tol * std::max(value, 1e-300)) return true;
        }
        prev_ = value;
        have_prev_ = true;
        return false;
    }

private:
    double prev_ = 0.0;
    double prev_diff_ = 0.0;
    bool have_prev_ = false;
    bool have_diff_ = false;
};

} // namespace detail

// Power iteration on M^T M started from the normalized all-ones vector.  The
// returned value is a Rayleigh-quotient lower bound for the largest singular
// value, recomputed from the witness on exit.
inline NormEstimate norm2_estimate(const TruncatedOperator& op, SolverOptions opt = {}) {
    if (op.domain_size() == 0) throw input_error("empty domain");
    NormEstimate est;
    est.p = 2.0;
    std::vector<double> x(op.domain_size(), 1.0);
    std::vector<double> y(op.codomain_size());
    std::vector<double> z(op.domain_size());
    double nx = detail::lp_norm(x, 2.0);
    for (double& v : x) v /= nx;

    detail::ConvergenceGauge gauge;
    for (int it = 0; it < opt.max_iters; ++it) {
        op.apply(x, y, opt.threads);
        detail::check_finite(y);
        double value = detail::lp_norm(y, 2.0);
        est.iterations = it + 1;
        if (gauge.update(value, opt.tol)) {
            est.converged = true;
            break;
        }
        if (value == 0.0) break;
        op.apply_transpose(y, z, opt.threads);
        double nz = detail::lp_norm(z, 2.0);
        if (nz == 0.0) break;
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] / nz;
    }
    est.witness = x;
    op.apply(x, y, opt.threads);
    est.value = detail::lp_norm(y, 2.0) / detail::lp_norm(x, 2.0);
    return est;
}

// Nonlinear power method x <- psi_{p'}(M^T psi_p(M x)), normalized in l^p.
// Restart vectors: the normalized all-ones vector, the basis vector at the
// identity, then seeded random positive vectors; the best ratio wins.
inline NormEstimate normp_estimate(const TruncatedOperator& op, double p,
                                   SolverOptions opt = {}) {
    if (!(p > 1.0) || !std::isfinite(p)) throw input_error("exponent p must lie in (1, oo)");
    if (op.matrix().min_value() < 0.0)
        throw input_error("p-norm estimation requires nonnegative coefficients");
    if (op.domain_size() == 0) throw input_error("empty domain");
    const double pc = p / (p - 1.0);

    NormEstimate best;
    best.p = p;
    int total_iters = 0;
    std::mt19937_64 rng(opt.seed);

    int restarts = std::max(1, opt.restarts);
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> x(op.domain_size());
        if (r == 0) {
            std::fill(x.begin(), x.end(), 1.0);
        } else if (r == 1) {
            x[0] = 1.0; // index 0 is the identity element
        } else {
            for (double& v : x) v = detail::uniform01(rng) + 1e-3;
        }
        double nx = detail::lp_norm(x, p);
        for (double& v : x) v /= nx;

        std::vector<double> y(op.codomain_size());
        std::vector<double> z(op.domain_size());
        detail::ConvergenceGauge gauge;
        bool converged = false;
        bool dead = false;
        int iters = 0;
        std::vector<double> best_x = x;
        double best_val = -1.0;
        for (int it = 0; it < opt.max_iters; ++it) {
            op.apply(x, y, opt.threads);
            detail::check_finite(y);
            double value = detail::lp_norm(y, p);
            ++iters;
            if (value > best_val) {
                best_val = value;
                best_x = x;
            }
            if (gauge.update(value, opt.tol)) {
                converged = true;
                break;
            }
            if (value == 0.0) { dead = true; break; }
            detail::apply_psi(y, p);
            op.apply_transpose(y, z, opt.threads);
            detail::check_finite(z);
            detail::apply_psi(z, pc);
            double nz = detail::lp_norm(z, p);
            if (nz == 0.0) { dead = true; break; }
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] / nz;
        }
        total_iters += iters;
        if (dead && best_val <= 0.0) continue; // restart never left the kernel
        if (best_val > best.value) {
            best.value = best_val;
            best.witness = std::move(best_x);
            best.converged = converged;
        }
    }
    best.iterations = total_iters;
    if (best.witness.empty()) throw numerical_error("all restarts degenerated");

    std::vector<double> y(op.codomain_size());
    op.apply(best.witness, y, opt.threads);
    best.value = detail::lp_norm(y, p) / detail::lp_norm(best.witness, p);
    return best;
}

struct DualityReport {
    double lhs = 0.0; // estimate of the operator at exponent p
    double rhs = 0.0; // estimate of the transpose at the conjugate exponent
    double gap = 0.0;
};

// ||M||_{p->p} = ||M^T||_{p'->p'} holds exactly for fixed matrices; both sides
// are estimated independently and the gap reported.
inline DualityReport duality_check(const BallIndex& ball, const SupportedFunction& a,
                                   double p, int R, SolverOptions opt = {}) {
    if (!(p > 1.0) || !std::isfinite(p)) throw input_error("exponent p must lie in (1, oo)");
    auto op = TruncatedOperator::build(ball, a, R);
    double pc = p / (p - 1.0);
    DualityReport rep;
    rep.lhs = normp_estimate(op, p, opt).value;
    rep.rhs = normp_estimate(op.transposed(), pc, opt).value;
    rep.gap = std::abs(rep.lhs - rep.rhs);
    return rep;
}

// Norm of the averaging operator over a set S: lambda(1_S)/|S| truncated at R.
inline NormEstimate averaging_norm(const BallIndex& ball, std::span<const Element> set,
                                   double p, int R, SolverOptions opt = {}) {
    if (set.empty()) throw input_error("averaging set is empty");
    auto a = SupportedFunction::indicator(set, 1.0 / static_cast<double>(set.size()));
    auto op = TruncatedOperator::build(ball, a, R);
    return normp_estimate(op, p, opt);
}

inline NormEstimate averaging_norm(const BallIndex& ball, const SphereView& view, double p,
                                   int R, SolverOptions opt = {}) {
    return averaging_norm(ball, view.members(), p, R, opt);
}

inline NormEstimate averaging_norm(const BallIndex& ball, const AnnulusView& view, double p,
                                   int R, SolverOptions opt = {}) {
    return averaging_norm(ball, view.members(), p, R, opt);
}

struct RadialNormReport {
    NormEstimate estimate;   // lower estimate of ||lambda(a)||_{p->p}
    double a_norm_p = 0.0;   // (sum_k |a_k|^p |S(k)|)^(1/p)
    double bound_rhs = 0.0;  // (n+1)^(1/p') * ||a||_p
    double ratio = 0.0;      // estimate / bound_rhs
};

inline RadialNormReport radial_norm_report(const BallIndex& ball,
                                           std::span<const double> coeffs, double p, int R,
                                           SolverOptions opt = {}) {
    if (!(p > 1.0 && p <= 2.0)) throw input_error("radial report requires p in (1, 2]");
    for (double c : coeffs)
        if (c < 0) throw input_error("unsupported input: radial coefficients must be >= 0");
    auto a = SupportedFunction::radial(ball, coeffs);
    if (a.support_size() == 0) throw input_error("radial function is zero");
    int n = a.support_radius();
    auto op = TruncatedOperator::build(ball, a, R);
    RadialNormReport rep;
    rep.estimate = normp_estimate(op, p, opt);
    rep.a_norm_p = a.lp_norm(p);
    rep.bound_rhs = std::pow(n + 1.0, (p - 1.0) / p) * rep.a_norm_p;
    rep.ratio = rep.estimate.value / rep.bound_rhs;
    return rep;
}

// Extrapolates truncated estimates to the infinite-ball limit.  The boundary
// layer of the extremizer decays like R^(-3/2) with an R^(-5/2) correction, so
// the model is est(R) = L - c1 R^(-3/2) - c2 R^(-5/2), fit by least squares.
inline double extrapolate_truncation_limit(std::span<const std::pair<int, double>> points) {
    if (points.empty()) throw input_error("no points to extrapolate");
    if (points.size() == 1) return points[0].second;
    if (points.size() == 2) {
        double x0 = std::pow(points[0].first, -1.5), x1 = std::pow(points[1].first, -1.5);
        return (points[1].second * x0 - points[0].second * x1) / (x0 - x1);
    }
    // normal equations for [1, -R^(-3/2), -R^(-5/2)]
    double A[3][3] = {};
    double b[3] = {};
    for (const auto& [R, v] : points) {
        double c[3] = {1.0, -std::pow(R, -1.5), -std::pow(R, -2.5)};
        for (int i = 0; i < 3; ++i) {
            b[i] += c[i] * v;
            for (int j = 0; j < 3; ++j) A[i][j] += c[i] * c[j];
        }
    }
    // Gaussian elimination with partial pivoting
    int piv[3] = {0, 1, 2};
    for (int k = 0; k < 3; ++k) {
        int arg = k;
        for (int i = k + 1; i < 3; ++i)
            if (std::abs(A[piv[i]][k]) > std::abs(A[piv[arg]][k])) arg = i;
        std::swap(piv[k], piv[arg]);
        if (A[piv[k]][k] == 0.0) throw numerical_error("singular extrapolation system");
        for (int i = k + 1; i < 3; ++i) {
            double f = A[piv[i]][k] / A[piv[k]][k];
            for (int j = k; j < 3; ++j) A[piv[i]][j] -= f * A[piv[k]][j];
            b[piv[i]] -= f * b[piv[k]];
        }
    }
    double sol[3];
    for (int k = 2; k >= 0; --k) {
        double s = b[piv[k]];
        for (int j = k + 1; j < 3; ++j) s -= A[piv[k]][j] * sol[j];
        sol[k] = s / A[piv[k]][k];
    }
    return sol[0];
}

} // namespace sphavg
