#pragma once

// The Busemann cocycle beta(g)(h) = |h| - |g^-1 h|, the twisted l^1 norm it
// induces on finitely supported functions, and the resulting upper bounds for
// averaging-operator norms, with horosphere decompositions.

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sphavg/ball.hpp"
#include "sphavg/errors.hpp"
#include "sphavg/function.hpp"
#include "sphavg/group.hpp"

namespace sphavg {

namespace detail {

inline int common_prefix_len(const Word& a, const Word& b) {
    std::size_t n = std::min(a.size(), b.size());
    std::size_t c = 0;
    while (c < n && a[c] == b[c]) ++c;
    return static_cast<int>(c);
}

} // namespace detail

// beta(g)(h) = |h| - |g^-1 h|.  In tree-like systems this only depends on the
// common prefix of the two reduced words: beta = 2 cp(g, h) - |g|.
inline int busemann(const RewritingSystem& rs, const Element& g, const Element& h) {
    if (rs.tree_like())
        return 2 * detail::common_prefix_len(g.word, h.word) - g.length();
    return h.length() - rs.multiply(rs.inverse(g), h).length();
}

// Cached beta(g)(h) for g in a fixed support and h in B(H).
class CocycleTable {
public:
    static CocycleTable build(const BallIndex& ball, std::span<const Element> support,
                              int horizon, int threads = 1) {
        if (horizon > ball.radius())
            throw input_error("horizon exceeds the enumerated ball");
        CocycleTable t;
        t.ball_ = &ball;
        t.horizon_ = horizon;
        t.h_count_ = static_cast<std::uint32_t>(ball.ball_size(horizon));
        t.support_.assign(support.begin(), support.end());
        t.beta_.resize(static_cast<std::size_t>(t.support_.size()) * t.h_count_);
        const auto& rs = ball.system();

        std::vector<Element> inverses;
        inverses.reserve(t.support_.size());
        for (const auto& g : t.support_) inverses.push_back(rs.inverse(g));

        auto fill = [&](std::uint32_t h0, std::uint32_t h1) {
            for (std::uint32_t ih = h0; ih < h1; ++ih) {
                const Element& h = ball[ih];
                for (std::size_t ig = 0; ig < t.support_.size(); ++ig) {
                    int b;
                    if (rs.tree_like())
                        b = 2 * detail::common_prefix_len(t.support_[ig].word, h.word) -
                            t.support_[ig].length();
                    else
                        b = h.length() - rs.multiply(inverses[ig], h).length();
                    t.beta_[ig * t.h_count_ + ih] = static_cast<std::int16_t>(b);
                }
            }
        };
        if (threads <= 1 || t.h_count_ < 4096) {
            fill(0, t.h_count_);
        } else {
            std::vector<std::thread> pool;
            std::uint32_t chunk = (t.h_count_ + threads - 1) / threads;
            for (int k = 0; k < threads; ++k) {
                std::uint32_t a = static_cast<std::uint32_t>(k) * chunk;
                std::uint32_t b = std::min(t.h_count_, a + chunk);
                if (a >= b) break;
                pool.emplace_back(fill, a, b);
            }
            for (auto& th : pool) th.join();
        }
        return t;
    }

    int horizon() const { return horizon_; }
    std::uint32_t horizon_count() const { return h_count_; }
    const std::vector<Element>& support() const { return support_; }
    const BallIndex& ball() const { return *ball_; }

    std::int16_t beta(std::size_t i_g, std::uint32_t i_h) const {
        return beta_[i_g * h_count_ + i_h];
    }

private:
    const BallIndex* ball_ = nullptr;
    int horizon_ = 0;
    std::uint32_t h_count_ = 0;
    std::vector<Element> support_;
    std::vector<std::int16_t> beta_;
};

struct KappaResult {
    double value = 0.0;
    // max over B(H) agrees with max over B(H-2)
    bool stabilized = false;
};

// Evaluates N_{eps beta}(a) = max_{h in B(H)} sum_g |a(g)| e^{eps beta(g)(h)}
// for varying eps against one cached table.
class KappaEvaluator {
public:
    KappaEvaluator(const BallIndex& ball, const SupportedFunction& a, int horizon,
                   int threads = 1) {
        if (horizon < a.support_radius())
            throw input_error("horizon must be at least the support radius");
        std::vector<Element> supp;
        supp.reserve(a.support_size());
        for (const auto& [g, c] : a.entries()) {
            supp.push_back(g);
            weights_.push_back(std::abs(c));
            max_len_ = std::max(max_len_, g.length());
        }
        if (supp.empty()) throw input_error("empty support");
        table_ = CocycleTable::build(ball, supp, horizon, threads);
        inner_count_ = static_cast<std::uint32_t>(
            ball.ball_size(std::max(horizon - 2, 0)));
    }

    const CocycleTable& table() const { return table_; }

    KappaResult value(double eps) const {
        if (eps < 0) throw input_error("cocycle scale must be >= 0");
        const std::uint32_t H = table_.horizon_count();
        const std::size_t n_g = weights_.size();
        double inner_max = 0.0, full_max = 0.0;
        if (eps * max_len_ <= 30.0) {
            // direct summation with a small exp table over beta in [-L, L]
            std::vector<double> etab(2 * max_len_ + 1);
            for (int j = -max_len_; j <= max_len_; ++j)
                etab[j + max_len_] = std::exp(eps * j);
            for (std::uint32_t ih = 0; ih < H; ++ih) {
                double s = 0.0;
                for (std::size_t ig = 0; ig < n_g; ++ig)
                    s += weights_[ig] * etab[table_.beta(ig, ih) + max_len_];
                if (s > full_max) full_max = s;
                if (ih < inner_count_ && s > inner_max) inner_max = s;
            }
        } else {
            // log-sum-exp rearrangement to dodge overflow
            double inner_log = -1e308, full_log = -1e308;
            for (std::uint32_t ih = 0; ih < H; ++ih) {
                double m = -1e308;
                for (std::size_t ig = 0; ig < n_g; ++ig) {
                    if (weights_[ig] == 0.0) continue;
                    m = std::max(m, std::log(weights_[ig]) + eps * table_.beta(ig, ih));
                }
                double s = 0.0;
                for (std::size_t ig = 0; ig < n_g; ++ig) {
                    if (weights_[ig] == 0.0) continue;
                    s += std::exp(std::log(weights_[ig]) + eps * table_.beta(ig, ih) - m);
                }
                double lv = m + std::log(s);
                if (lv > full_log) full_log = lv;
                if (ih < inner_count_ && lv > inner_log) inner_log = lv;
            }
            full_max = std::exp(full_log);
            inner_max = std::exp(inner_log);
        }
        return KappaResult{full_max, full_max <= inner_max};
    }

private:
    CocycleTable table_;
    std::vector<double> weights_;
    std::uint32_t inner_count_ = 0;
    int max_len_ = 0;
};

inline KappaResult kappa_norm(const BallIndex& ball, const SupportedFunction& a, double eps,
                              int horizon, int threads = 1) {
    return KappaEvaluator(ball, a, horizon, threads).value(eps);
}

enum class Exactness { exact_tree, stabilized, horizon_limited };

inline const char* to_string(Exactness e) {
    switch (e) {
        case Exactness::exact_tree: return "exact-tree";
        case Exactness::stabilized: return "stabilized";
        default: return "horizon-limited";
    }
}

struct BoundReport {
    std::string set_descriptor;
    std::size_t set_size = 0;
    double p = 2.0;
    double eps = 0.0;
    double factor_minus = 0.0; // kappa norm of the inverted set at scale p*eps
    double factor_plus = 0.0;  // kappa norm of the set at scale p'*eps
    double bound = 0.0;        // factor_minus^(1/p) factor_plus^(1/p') / |S|
    Exactness exactness = Exactness::horizon_limited;
};

namespace detail {

// Shared evaluators so epsilon sweeps reuse the cocycle tables.  Symmetric
// sets need only one.
class BoundEvaluator {
public:
    BoundEvaluator(const BallIndex& ball, std::span<const Element> set, int horizon,
                   int threads)
        : size_(set.size()) {
        const auto& rs = ball.system();
        auto a = SupportedFunction::indicator(set);
        auto a_star = a.star(rs);
        plus_ = std::make_unique<KappaEvaluator>(ball, a, horizon, threads);
        symmetric_ = a_star == a;
        if (!symmetric_)
            minus_ = std::make_unique<KappaEvaluator>(ball, a_star, horizon, threads);
        tree_exact_ = rs.tree_like();
    }

    BoundReport report(double p, double eps) const {
        if (!(p > 1.0) || !std::isfinite(p)) throw input_error("exponent p must lie in (1, oo)");
        if (!(eps > 0)) throw input_error("cocycle scale must be > 0");
        double pc = p / (p - 1.0);
        KappaResult fm = (symmetric_ ? *plus_ : *minus_).value(p * eps);
        KappaResult fp = plus_->value(pc * eps);
        BoundReport rep;
        rep.set_size = size_;
        rep.p = p;
        rep.eps = eps;
        rep.factor_minus = fm.value;
        rep.factor_plus = fp.value;
        rep.bound = std::exp(std::log(fm.value) / p + std::log(fp.value) / pc -
                             std::log(static_cast<double>(size_)));
        if (tree_exact_) rep.exactness = Exactness::exact_tree;
        else if (fm.stabilized && fp.stabilized) rep.exactness = Exactness::stabilized;
        else rep.exactness = Exactness::horizon_limited;
        return rep;
    }

private:
    std::size_t size_;
    std::unique_ptr<KappaEvaluator> plus_;
    std::unique_ptr<KappaEvaluator> minus_;
    bool symmetric_ = false;
    bool tree_exact_ = false;
};

} // namespace detail

// Upper bound ||lambda_S||_{p->p} <= N(1_{S^-1}; p eps)^(1/p) N(1_S; p' eps)^(1/p') / |S|.
// A true bound when exactness is exact-tree, otherwise empirical and labeled.
inline BoundReport cocycle_upper_bound(const BallIndex& ball, std::span<const Element> set,
                                       double p, double eps, int horizon, int threads = 1,
                                       std::string descriptor = {}) {
    if (set.empty()) throw input_error("empty set");
    detail::BoundEvaluator ev(ball, set, horizon, threads);
    auto rep = ev.report(p, eps);
    rep.set_descriptor = std::move(descriptor);
    return rep;
}

inline BoundReport cocycle_upper_bound(const BallIndex& ball, const SphereView& view,
                                       double p, double eps, int horizon, int threads = 1) {
    return cocycle_upper_bound(ball, view.members(), p, eps, horizon, threads,
                               "sphere:" + std::to_string(view.n));
}

// Starts from eps = delta/(p p') and refines by golden-section search over
// [delta/(4p'), delta]; never worse than the starting prescription.
inline std::pair<double, BoundReport> optimize_epsilon(const BallIndex& ball,
                                                       std::span<const Element> set,
                                                       double p, double delta, int horizon,
                                                       int threads = 1,
                                                       std::string descriptor = {}) {
    if (!(delta > 0)) throw input_error("growth exponent delta must be > 0");
    if (set.empty()) throw input_error("empty set");
    detail::BoundEvaluator ev(ball, set, horizon, threads);
    double pc = p / (p - 1.0);
    double eps_start = delta / (p * pc);
    double lo = delta / (4.0 * pc), hi = delta;

    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = ev.report(p, c).bound, fd = ev.report(p, d).bound;
    for (int it = 0; it < 40; ++it) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = ev.report(p, c).bound;
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = ev.report(p, d).bound;
        }
    }
    double eps_best = (a + b) / 2.0;
    auto rep_best = ev.report(p, eps_best);
    auto rep_start = ev.report(p, eps_start);
    if (rep_start.bound <= rep_best.bound) {
        eps_best = eps_start;
        rep_best = rep_start;
    }
    rep_best.set_descriptor = std::move(descriptor);
    return {eps_best, rep_best};
}

inline std::pair<double, BoundReport> optimize_epsilon(const BallIndex& ball,
                                                       const SphereView& view, double p,
                                                       double delta, int horizon,
                                                       int threads = 1) {
    return optimize_epsilon(ball, view.members(), p, delta, horizon, threads,
                            "sphere:" + std::to_string(view.n));
}

// Exact horosphere counts |S(n) cap {g : beta(g)(h) = j}| keyed by j.
inline std::map<int, std::size_t> horosphere_counts(const SphereView& view,
                                                    const Element& h) {
    const auto& rs = view.ball->system();
    std::map<int, std::size_t> counts;
    for (const auto& g : view.members()) ++counts[busemann(rs, g, h)];
    return counts;
}

namespace detail {

inline double int_pow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

} // namespace detail

// Evaluates C * the matching case of the horospherical sum bound:
//   (n+1)^d e^{p eps n}       if p eps > delta/2
//   (n+1)^(d+1) e^{p eps n}   if p eps = delta/2   (exact tie)
//   e^{(delta - p eps) n}     if p eps < delta/2
inline double case_bound(int n, int d, double delta, double p, double eps, double c_scale) {
    if (n < 0 || d < 0 || !(delta > 0) || !(p > 0) || !(eps > 0) || !(c_scale > 0))
        throw input_error("case bound requires positive parameters and d, n >= 0");
    double t = p * eps;
    if (t > delta / 2.0) return c_scale * detail::int_pow(n + 1.0, d) * std::exp(t * n);
    if (t == delta / 2.0) return c_scale * detail::int_pow(n + 1.0, d + 1) * std::exp(t * n);
    return c_scale * std::exp((delta - t) * n);
}

// sum_{j=0}^{N} (j+1)^d e^{tau j}
inline double poly_exp_sum(int N, int d, double tau) {
    if (N < 0 || d < 0) throw input_error("poly_exp_sum requires N, d >= 0");
    double s = 0.0;
    for (int j = 0; j <= N; ++j) s += detail::int_pow(j + 1.0, d) * std::exp(tau * j);
    return s;
}

} // namespace sphavg
