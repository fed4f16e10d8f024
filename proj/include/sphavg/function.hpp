#pragma once

// Finitely supported real coefficient functions on the group: indicators of
// spheres/balls/annuli, radial combinations, and the involution a*.

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "sphavg/ball.hpp"
#include "sphavg/errors.hpp"
#include "sphavg/group.hpp"

namespace sphavg {

class SupportedFunction {
public:
    SupportedFunction() = default;

    static SupportedFunction indicator(std::span<const Element> set, double coeff = 1.0) {
        SupportedFunction f;
        for (const auto& g : set) f.entries_.push_back({g, coeff});
        f.finalize();
        return f;
    }

    static SupportedFunction indicator(const SphereView& view, double coeff = 1.0) {
        return indicator(view.members(), coeff);
    }

    static SupportedFunction indicator(const AnnulusView& view, double coeff = 1.0) {
        return indicator(view.members(), coeff);
    }

    static SupportedFunction delta(const Element& g, double coeff = 1.0) {
        SupportedFunction f;
        f.entries_.push_back({g, coeff});
        f.finalize();
        return f;
    }

    // a = sum_k coeffs[k] * indicator(S(k)); trailing zero coefficients are fine.
    static SupportedFunction radial(const BallIndex& ball, std::span<const double> coeffs) {
        if (static_cast<int>(coeffs.size()) - 1 > ball.radius())
            throw input_error("radial coefficients exceed the enumerated ball");
        SupportedFunction f;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            if (coeffs[k] == 0.0) continue;
            for (const auto& g : ball.sphere(static_cast<int>(k)).members())
                f.entries_.push_back({g, coeffs[k]});
        }
        f.finalize();
        return f;
    }

    void set(const Element& g, double value) {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), g,
                                   [](const auto& e, const Element& key) {
                                       return shortlex_less(e.first, key);
                                   });
        if (it != entries_.end() && it->first == g) {
            if (value == 0.0) entries_.erase(it);
            else it->second = value;
        } else if (value != 0.0) {
            entries_.insert(it, {g, value});
        }
    }

    double at(const Element& g) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), g,
                                   [](const auto& e, const Element& key) {
                                       return shortlex_less(e.first, key);
                                   });
        return (it != entries_.end() && it->first == g) ? it->second : 0.0;
    }

    const std::vector<std::pair<Element, double>>& entries() const { return entries_; }
    std::size_t support_size() const { return entries_.size(); }

    // max |g| over the support; entries are shortlex-sorted so the last one is
    // the longest.
    int support_radius() const {
        return entries_.empty() ? 0 : entries_.back().first.length();
    }

    double l1_norm() const {
        double s = 0;
        for (const auto& [g, c] : entries_) s += std::abs(c);
        return s;
    }

    double lp_norm(double p) const {
        double s = 0;
        for (const auto& [g, c] : entries_) s += std::pow(std::abs(c), p);
        return std::pow(s, 1.0 / p);
    }

    bool nonnegative() const {
        for (const auto& [g, c] : entries_)
            if (c < 0) return false;
        return true;
    }

    // a*(g) = a(g^-1); an involution preserving the l1 norm.
    SupportedFunction star(const RewritingSystem& rs) const {
        SupportedFunction f;
        for (const auto& [g, c] : entries_) f.entries_.push_back({rs.inverse(g), c});
        f.finalize();
        return f;
    }

    friend bool operator==(const SupportedFunction&, const SupportedFunction&) = default;

private:
    void finalize() {
        std::sort(entries_.begin(), entries_.end(), [](const auto& a, const auto& b) {
            return shortlex_less(a.first, b.first);
        });
        for (std::size_t i = 1; i < entries_.size(); ++i)
            if (entries_[i].first == entries_[i - 1].first)
                throw input_error("duplicate support element");
        std::erase_if(entries_, [](const auto& e) { return e.second == 0.0; });
    }

    std::vector<std::pair<Element, double>> entries_;
};

} // namespace sphavg
