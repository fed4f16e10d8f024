#pragma once

// Metric balls of a Cayley graph enumerated breadth-first, with sphere and
// annulus views, distances, rough medians and growth statistics.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sphavg/errors.hpp"
#include "sphavg/group.hpp"

namespace sphavg {

inline constexpr std::size_t kDefaultElementBudget = 12'000'000;

// delta_hat below this is reported as non-exponential growth.  Calibrated so
// that polynomially growing presets (Z^2 fits to ~0.23 on windows near [1,10])
// are flagged while the slowest exponential preset (C2*C2*C2, log 2 = 0.693)
// is not.
inline constexpr double kNonExponentialThreshold = 0.3;

struct SphereView;
struct AnnulusView;

// Ball B(R) = {g : |g| <= R} in global shortlex order, so every B(r) with
// r <= R is a prefix and spheres are contiguous index ranges.
class BallIndex {
public:
    static BallIndex enumerate(const RewritingSystem& rs, int radius,
                               std::size_t max_elements = kDefaultElementBudget) {
        if (radius < 0) throw input_error("ball radius must be >= 0");
        BallIndex ball(rs);
        ball.grow(radius, max_elements, /*best_effort=*/false);
        return ball;
    }

    // Enumerates as far as the budget allows, up to `radius`.
    static BallIndex enumerate_up_to(const RewritingSystem& rs, int radius,
                                     std::size_t max_elements = kDefaultElementBudget) {
        if (radius < 0) throw input_error("ball radius must be >= 0");
        BallIndex ball(rs);
        ball.grow(radius, max_elements, /*best_effort=*/true);
        return ball;
    }

    const RewritingSystem& system() const { return *rs_; }
    int radius() const { return radius_; }
    std::size_t size() const { return elements_.size(); }

    std::size_t ball_size(int r) const {
        check_radius(r);
        return cum_[static_cast<std::size_t>(r)];
    }

    std::size_t sphere_size(int n) const {
        check_radius(n);
        return cum_[static_cast<std::size_t>(n)] - (n == 0 ? 0 : cum_[static_cast<std::size_t>(n - 1)]);
    }

    const Element& operator[](std::size_t i) const { return elements_[i]; }
    int length_of(std::size_t i) const { return elements_[i].length(); }

    std::optional<std::uint32_t> index_of(const Element& e) const {
        auto it = std::lower_bound(elements_.begin(), elements_.end(), e,
                                   [](const Element& a, const Element& b) {
                                       return shortlex_less(a, b);
                                   });
        if (it == elements_.end() || !(*it == e)) return std::nullopt;
        return static_cast<std::uint32_t>(it - elements_.begin());
    }

    bool contains(const Element& e) const { return index_of(e).has_value(); }

    SphereView sphere(int n) const;
    AnnulusView annulus(int n, int theta) const;

    std::span<const Element> elements() const { return elements_; }
    std::span<const Element> prefix(int r) const {
        return std::span<const Element>(elements_.data(), ball_size(r));
    }

private:
    explicit BallIndex(const RewritingSystem& rs) : rs_(&rs) {
        elements_.push_back(rs.identity());
        cum_.push_back(1);
    }

    void grow(int target, std::size_t max_elements, bool best_effort) {
        if (elements_.size() > max_elements) {
            if (best_effort) return;
            throw resource_error("element budget exhausted", -1);
        }
        const auto nsym = rs_->alphabet().size();
        while (radius_ < target) {
            int depth = radius_ + 1;
            std::size_t lo = radius_ == 0 ? 0 : cum_[static_cast<std::size_t>(radius_) - 1];
            std::size_t hi = cum_[static_cast<std::size_t>(radius_)];
            std::vector<Word> next;
            next.reserve((hi - lo) * nsym);
            for (std::size_t i = lo; i < hi; ++i) {
                for (std::size_t s = 0; s < nsym; ++s) {
                    Element prod = rs_->multiply_symbol(elements_[i], static_cast<symbol_t>(s));
                    if (prod.length() == depth) next.push_back(std::move(prod.word));
                    else if (prod.length() > depth)
                        throw input_error(
                            "rewriting system is not length-reducing on this input");
                }
            }
            std::sort(next.begin(), next.end());
            next.erase(std::unique(next.begin(), next.end()), next.end());
            if (elements_.size() + next.size() > max_elements) {
                if (best_effort) return;
                throw resource_error("element budget exhausted while enumerating radius " +
                                         std::to_string(depth),
                                     radius_);
            }
            for (auto& w : next) elements_.push_back(Element{std::move(w)});
            cum_.push_back(elements_.size());
            ++radius_;
        }
    }

    void check_radius(int r) const {
        if (r < 0 || r > radius_) throw input_error("radius outside the enumerated ball");
    }

    const RewritingSystem* rs_;
    int radius_ = 0;
    std::vector<Element> elements_;
    std::vector<std::size_t> cum_; // cum_[r] = |B(r)|
};

struct SphereView {
    const BallIndex* ball = nullptr;
    int n = 0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;

    std::size_t size() const { return end - begin; }
    std::span<const Element> members() const {
        return std::span<const Element>(ball->elements().data() + begin, size());
    }
};

struct AnnulusView {
    const BallIndex* ball = nullptr;
    int n = 0;
    int theta = 0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;

    std::size_t size() const { return end - begin; }
    std::span<const Element> members() const {
        return std::span<const Element>(ball->elements().data() + begin, size());
    }
};

inline SphereView BallIndex::sphere(int n) const {
    check_radius(n);
    std::uint32_t b = n == 0 ? 0 : static_cast<std::uint32_t>(cum_[n - 1]);
    return SphereView{this, n, b, static_cast<std::uint32_t>(cum_[n])};
}

inline AnnulusView BallIndex::annulus(int n, int theta) const {
    if (theta < 0) throw input_error("annulus thickness must be >= 0");
    if (n + theta > radius_) throw input_error("annulus exceeds the enumerated ball");
    int lo = std::max(0, n - theta);
    std::uint32_t b = lo == 0 ? 0 : static_cast<std::uint32_t>(cum_[lo - 1]);
    return AnnulusView{this, n, theta, b, static_cast<std::uint32_t>(cum_[n + theta])};
}

inline int distance(const RewritingSystem& rs, const Element& x, const Element& y) {
    return rs.multiply(rs.inverse(x), y).length();
}

// Exact median in tree-like Cayley graphs: translate x to the basepoint and
// take the common prefix of the two reduced words.
inline Element tree_median(const RewritingSystem& rs, const Element& x, const Element& y,
                           const Element& z) {
    if (!rs.tree_like()) throw input_error("tree median requires a rule-free system");
    Element u = rs.multiply(rs.inverse(x), y);
    Element v = rs.multiply(rs.inverse(x), z);
    std::size_t c = 0;
    while (c < u.word.size() && c < v.word.size() && u.word[c] == v.word[c]) ++c;
    return rs.multiply(x, Element{u.word.substr(0, c)});
}

struct MedianResult {
    Element median;
    int rho_achieved = 0;
    // The best candidate sits on the boundary sphere of the enumerated ball;
    // better candidates may exist outside it.
    bool boundary_warning = false;
};

// Scans the whole enumerated ball for the point minimizing the largest
// geodesic defect over the three pairs.  Ties break to the smallest BFS index.
inline MedianResult rough_median(const BallIndex& ball, const Element& x, const Element& y,
                                 const Element& z, int rho = 0) {
    (void)rho;
    const auto& rs = ball.system();
    if (!ball.contains(x) || !ball.contains(y) || !ball.contains(z))
        throw input_error("median query points must lie in the enumerated ball");
    Element xi = rs.inverse(x), yi = rs.inverse(y), zi = rs.inverse(z);
    int dxy = rs.multiply(xi, y).length();
    int dyz = rs.multiply(yi, z).length();
    int dzx = rs.multiply(zi, x).length();

    MedianResult best;
    int best_defect = -1;
    for (std::size_t i = 0; i < ball.size(); ++i) {
        const Element& m = ball[i];
        int dxm = rs.multiply(xi, m).length();
        int dym = rs.multiply(yi, m).length();
        int dzm = rs.multiply(zi, m).length();
        int defect = std::max({dxm + dym - dxy, dym + dzm - dyz, dzm + dxm - dzx});
        if (best_defect < 0 || defect < best_defect) {
            best_defect = defect;
            best.median = m;
            if (defect == 0) break;
        }
    }
    best.rho_achieved = best_defect;
    best.boundary_warning = best.median.length() == ball.radius();
    return best;
}

struct SegmentCount {
    std::size_t count = 0;
    // Candidates could extend past the enumerated ball.
    bool boundary_warning = false;
};

// |{z in B : d(x,z)+d(z,y) <= d(x,y)+rho and d(x,z)=n}| by exhaustive scan.
inline SegmentCount rough_segment_count(const BallIndex& ball, const Element& x,
                                        const Element& y, int rho, int n) {
    const auto& rs = ball.system();
    if (!ball.contains(x) || !ball.contains(y))
        throw input_error("segment endpoints must lie in the enumerated ball");
    if (rho < 0 || n < 0) throw input_error("rho and n must be >= 0");
    Element xi = rs.inverse(x), yi = rs.inverse(y);
    int dxy = rs.multiply(xi, y).length();
    SegmentCount result;
    result.boundary_warning = x.length() + n > ball.radius();
    for (std::size_t i = 0; i < ball.size(); ++i) {
        const Element& z = ball[i];
        int dxz = rs.multiply(xi, z).length();
        if (dxz != n) continue;
        int dzy = rs.multiply(rs.inverse(z), y).length();
        if (dxz + dzy <= dxy + rho) ++result.count;
    }
    return result;
}

struct GrowthStats {
    std::vector<std::size_t> sphere_sizes; // index n in [0, R]
    double delta_hat = 0.0;
    std::vector<double> pure_growth_ratios; // |S(n)| e^{-delta_hat n}
    bool non_exponential = false;
    int window_lo = 0, window_hi = 0;
};

// Least-squares slope of log |S(n)| over the window (n = 0 is never fitted).
inline GrowthStats growth_stats(const BallIndex& ball, int window_lo, int window_hi) {
    if (window_lo < 1 || window_hi > ball.radius() || window_hi - window_lo < 2)
        throw input_error("growth fit window must lie in [1, R] and span >= 3 points");
    GrowthStats stats;
    stats.window_lo = window_lo;
    stats.window_hi = window_hi;
    for (int n = 0; n <= ball.radius(); ++n)
        stats.sphere_sizes.push_back(ball.sphere_size(n));

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int n = window_lo; n <= window_hi; ++n) {
        std::size_t s = stats.sphere_sizes[static_cast<std::size_t>(n)];
        if (s == 0) throw input_error("degenerate growth: empty sphere inside the fit window");
        double x = n, y = std::log(static_cast<double>(s));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++count;
    }
    stats.delta_hat = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    stats.non_exponential = stats.delta_hat < kNonExponentialThreshold;
    for (int n = 0; n <= ball.radius(); ++n)
        stats.pure_growth_ratios.push_back(
            static_cast<double>(stats.sphere_sizes[static_cast<std::size_t>(n)]) *
            std::exp(-stats.delta_hat * n));
    return stats;
}

} // namespace sphavg
