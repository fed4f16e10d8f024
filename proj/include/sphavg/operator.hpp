#pragma once

// Truncations of the convolution operator lambda(a) to finite balls: the
// matrix maps functions on B(R) to functions on B(R + n_a), so images are
// never clipped and estimated norms are certified lower bounds, monotone in R.

#include <cstdint>
#include <span>
#include <vector>

#include "sphavg/ball.hpp"
#include "sphavg/errors.hpp"
#include "sphavg/function.hpp"
#include "sphavg/sparse.hpp"

namespace sphavg {

class TruncatedOperator {
public:
    // (M phi)(h) = sum_g a(g) phi(g^-1 h) for phi supported on B(R).
    static TruncatedOperator build(const BallIndex& ball, const SupportedFunction& a,
                                   int R) {
        return build_impl(ball, a, R, /*right_action=*/false);
    }

    // Right averaging variant: (N phi)(h) = sum_g a(g) phi(h g).
    static TruncatedOperator build_right(const BallIndex& ball, const SupportedFunction& a,
                                         int R) {
        return build_impl(ball, a, R, /*right_action=*/true);
    }

    std::uint32_t domain_size() const { return fwd_.cols(); }
    std::uint32_t codomain_size() const { return fwd_.rows(); }
    int domain_radius() const { return R_; }
    int codomain_radius() const { return R_ + n_a_; }
    int support_radius() const { return n_a_; }

    const CsrMatrix& matrix() const { return fwd_; }
    const CsrMatrix& transpose_matrix() const { return bwd_; }

    // Formal transpose, realizing the dual operator with swapped spaces.
    TruncatedOperator transposed() const {
        TruncatedOperator t;
        t.fwd_ = bwd_;
        t.bwd_ = fwd_;
        t.R_ = R_;
        t.n_a_ = n_a_;
        return t;
    }

    void apply(std::span<const double> x, std::span<double> y, int threads = 1) const {
        fwd_.matvec(x, y, threads);
    }

    void apply_transpose(std::span<const double> x, std::span<double> y,
                         int threads = 1) const {
        bwd_.matvec(x, y, threads);
    }

private:
    TruncatedOperator() = default;

    static TruncatedOperator build_impl(const BallIndex& ball, const SupportedFunction& a,
                                        int R, bool right_action) {
        if (R < 0) throw input_error("truncation radius must be >= 0");
        if (a.support_size() == 0) throw input_error("empty support");
        const int n_a = a.support_radius();
        if (R + n_a > ball.radius())
            throw input_error("ball must be enumerated to radius R + support radius");
        const auto& rs = ball.system();

        std::uint32_t dom = static_cast<std::uint32_t>(ball.ball_size(R));
        std::uint32_t cod = static_cast<std::uint32_t>(ball.ball_size(R + n_a));

        std::vector<std::pair<Element, double>> action;
        for (const auto& [g, c] : a.entries())
            action.push_back({right_action ? rs.inverse(g) : g, c});

        std::vector<Triplet> trip;
        trip.reserve(static_cast<std::size_t>(dom) * action.size());
        for (std::uint32_t x = 0; x < dom; ++x) {
            for (const auto& [g, c] : action) {
                Element h = right_action ? rs.multiply(ball[x], g) : rs.multiply(g, ball[x]);
                auto row = ball.index_of(h);
                if (!row || *row >= cod)
                    throw input_error("product escaped the codomain ball");
                trip.push_back(Triplet{*row, x, c});
            }
        }

        TruncatedOperator op;
        op.fwd_ = CsrMatrix::from_triplets(cod, dom, trip);
        op.bwd_ = op.fwd_.transposed();
        op.R_ = R;
        op.n_a_ = n_a;
        return op;
    }

    CsrMatrix fwd_; // codomain x domain
    CsrMatrix bwd_; // transpose
    int R_ = 0;
    int n_a_ = 0;
};

} // namespace sphavg
