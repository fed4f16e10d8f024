#pragma once

// Combinatorial expansion e(S) = inf |SX|/|X|: exact minimum over bounded
// subsets at tiny scale, structured witness upper bounds, and the norm-fed
// lower bound e(S) >= U^(-p') for a true upper bound U on ||lambda_S||_{p->p}.

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sphavg/ball.hpp"
#include "sphavg/errors.hpp"
#include "sphavg/group.hpp"

namespace sphavg {

// SX = {s x} as sorted unique normal forms.
inline std::vector<Element> product_set(const RewritingSystem& rs,
                                        std::span<const Element> s_set,
                                        std::span<const Element> x_set) {
    std::vector<Element> out;
    out.reserve(s_set.size() * x_set.size());
    for (const auto& s : s_set)
        for (const auto& x : x_set) out.push_back(rs.multiply(s, x));
    std::sort(out.begin(), out.end(),
              [](const Element& a, const Element& b) { return shortlex_less(a, b); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace detail {

// Bitset rows over the product universe: row i = indicator of S * ground[i],
// so |SX| is the popcount of an OR of rows.
class ProductRows {
public:
    ProductRows(const RewritingSystem& rs, std::span<const Element> s_set,
                std::span<const Element> ground) {
        std::vector<Element> universe = product_set(rs, s_set, ground);
        words_ = static_cast<std::uint32_t>((universe.size() + 63) / 64);
        rows_.assign(ground.size() * words_, 0);
        auto index_of = [&](const Element& e) {
            auto it = std::lower_bound(universe.begin(), universe.end(), e,
                                       [](const Element& a, const Element& b) {
                                           return shortlex_less(a, b);
                                       });
            return static_cast<std::size_t>(it - universe.begin());
        };
        for (std::size_t i = 0; i < ground.size(); ++i) {
            for (const auto& s : s_set) {
                std::size_t u = index_of(rs.multiply(s, ground[i]));
                rows_[i * words_ + u / 64] |= std::uint64_t(1) << (u % 64);
            }
        }
        acc_.resize(words_);
    }

    void clear_acc() { std::fill(acc_.begin(), acc_.end(), 0); }
    void or_into_acc(std::size_t i) {
        for (std::uint32_t w = 0; w < words_; ++w) acc_[w] |= rows_[i * words_ + w];
    }
    std::size_t acc_popcount() const {
        std::size_t c = 0;
        for (auto w : acc_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    std::size_t union_count(std::span<const std::size_t> indices) {
        clear_acc();
        for (auto i : indices) or_into_acc(i);
        return acc_popcount();
    }

private:
    std::uint32_t words_ = 0;
    std::vector<std::uint64_t> rows_;
    std::vector<std::uint64_t> acc_;
};

inline std::uint64_t subset_budget(std::size_t n, int max_size, std::uint64_t cap) {
    std::uint64_t total = 0, binom = 1;
    for (int k = 1; k <= max_size; ++k) {
        binom = binom * (n - static_cast<std::size_t>(k) + 1) / static_cast<std::uint64_t>(k);
        total += binom;
        if (total > cap) return cap + 1;
    }
    return total;
}

} // namespace detail

struct ExactExpansion {
    double min_ratio = 0.0;
    std::vector<Element> argmin; // lexicographically first minimizer
    std::uint64_t subsets_scanned = 0;
};

// Exact min of |SX|/|X| over non-empty X in the ground ball with |X| <= max_size.
// This is an upper bound on the true expansion (the infimum ranges over all
// finite X).  Ratios are compared by integer cross-multiplication.
inline ExactExpansion expansion_exact(const RewritingSystem& rs,
                                      std::span<const Element> s_set,
                                      const BallIndex& ground, int max_size,
                                      std::uint64_t budget = 1'000'000) {
    if (max_size < 1) throw input_error("max subset size must be >= 1");
    if (s_set.empty()) throw input_error("empty set");
    const std::size_t n = ground.size();
    max_size = std::min<int>(max_size, static_cast<int>(n));
    if (detail::subset_budget(n, max_size, budget) > budget)
        throw resource_error(
            "subset enumeration exceeds the budget; use witness mode instead");

    detail::ProductRows rows(rs, s_set, ground.elements());
    ExactExpansion best;
    std::uint64_t best_sx = 0, best_x = 0; // best ratio = best_sx / best_x

    std::vector<std::size_t> comb;
    for (int k = 1; k <= max_size; ++k) {
        comb.assign(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < comb.size(); ++i) comb[i] = i;
        for (;;) {
            std::uint64_t sx = rows.union_count(comb);
            ++best.subsets_scanned;
            if (best_x == 0 || sx * best_x < best_sx * static_cast<std::uint64_t>(k)) {
                best_sx = sx;
                best_x = static_cast<std::uint64_t>(k);
                best.argmin.clear();
                for (auto i : comb) best.argmin.push_back(ground[i]);
            }
            // next lexicographic k-combination of [0, n)
            int pos = k - 1;
            while (pos >= 0 && comb[static_cast<std::size_t>(pos)] ==
                                   n - static_cast<std::size_t>(k - pos)) --pos;
            if (pos < 0) break;
            ++comb[static_cast<std::size_t>(pos)];
            for (int j = pos + 1; j < k; ++j)
                comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    best.min_ratio = static_cast<double>(best_sx) / static_cast<double>(best_x);
    return best;
}

struct WitnessFamily {
    bool balls = false;
    bool spheres = false;
    int random_count = 0;
    std::uint64_t seed = 42;
};

struct WitnessRow {
    std::string kind;
    int param = 0;
    std::size_t x_size = 0;
    std::size_t sx_size = 0;
    double ratio = 0.0;
};

struct WitnessReport {
    double min_ratio = 0.0;
    std::string best_descriptor;
    std::vector<WitnessRow> rows;
};

// Upper-bound probes of the expansion infimum over structured subsets of the
// ground ball: balls, spheres, and seeded random subsets.
inline WitnessReport expansion_witnesses(const RewritingSystem& rs,
                                         std::span<const Element> s_set,
                                         const BallIndex& ground,
                                         const WitnessFamily& family) {
    if (s_set.empty()) throw input_error("empty set");
    WitnessReport report;
    auto probe = [&](const std::string& kind, int param, std::span<const Element> x_set) {
        if (x_set.empty()) return;
        auto sx = product_set(rs, s_set, x_set);
        WitnessRow row{kind, param, x_set.size(), sx.size(),
                       static_cast<double>(sx.size()) / static_cast<double>(x_set.size())};
        if (report.rows.empty() || row.ratio < report.min_ratio) {
            report.min_ratio = row.ratio;
            report.best_descriptor = kind + ":" + std::to_string(param);
        }
        report.rows.push_back(std::move(row));
    };

    if (family.balls)
        for (int m = 0; m <= ground.radius(); ++m) probe("ball", m, ground.prefix(m));
    if (family.spheres)
        for (int m = 0; m <= ground.radius(); ++m) probe("sphere", m, ground.sphere(m).members());
    if (family.random_count > 0) {
        std::mt19937_64 rng(family.seed);
        std::vector<std::size_t> indices(ground.size());
        for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
        std::vector<Element> x_set;
        for (int t = 0; t < family.random_count; ++t) {
            std::size_t size = 1 + static_cast<std::size_t>(rng() % ground.size());
            // partial Fisher-Yates draw of `size` distinct indices
            for (std::size_t i = 0; i < size; ++i) {
                std::size_t j = i + static_cast<std::size_t>(rng() % (indices.size() - i));
                std::swap(indices[i], indices[j]);
            }
            x_set.clear();
            for (std::size_t i = 0; i < size; ++i) x_set.push_back(ground[indices[i]]);
            probe("random", t, x_set);
        }
    }
    if (report.rows.empty()) throw input_error("witness family is empty");
    return report;
}

// e(S) >= norm_upper^(-p'), valid whenever norm_upper is a true upper bound on
// ||lambda_S||_{p->p}.  Values above 1 clamp to 1 (the bound degenerates to
// e(S) >= 1); `clamped` reports that.
inline double expansion_lower_bound(std::size_t s_size, double p, double norm_upper,
                                    bool* clamped = nullptr) {
    (void)s_size;
    if (!(p > 1.0) || !std::isfinite(p)) throw input_error("exponent p must lie in (1, oo)");
    if (!(norm_upper > 0.0)) throw input_error("norm upper bound must be positive");
    if (clamped) *clamped = false;
    if (norm_upper > 1.0) {
        if (clamped) *clamped = true;
        norm_upper = 1.0;
    }
    double pc = p / (p - 1.0);
    return std::pow(norm_upper, -pc);
}

struct ExpansionReport {
    std::string descriptor;
    std::size_t set_size = 0;
    std::optional<double> exact_min;
    std::vector<Element> exact_argmin;
    double witness_min = 0.0;
    std::string witness_best;
    double lower_bound = 0.0;
    double lower_p = 0.0;
    std::string lower_provenance;
    double c_estimate = 0.0; // witness_min / |S|
};

} // namespace sphavg
