#pragma once

// Finitely generated groups presented by a symmetric generator alphabet and a
// confluent, shortlex-reducing string rewriting system.  Normal forms are
// geodesic words, so word length equals graph distance to the identity.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "sphavg/errors.hpp"

namespace sphavg {

using symbol_t = std::uint8_t;

// A word is a sequence of symbol indices into the alphabet.  std::string keeps
// short words inline, which matters when enumerating balls with millions of
// elements.
using Word = std::string;

inline bool shortlex_less(const Word& a, const Word& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.compare(b) < 0;
}

// A group element held in normal form.
struct Element {
    Word word;

    int length() const { return static_cast<int>(word.size()); }
    bool is_identity() const { return word.empty(); }

    friend bool operator==(const Element&, const Element&) = default;
};

inline bool shortlex_less(const Element& a, const Element& b) {
    return shortlex_less(a.word, b.word);
}

struct ElementHash {
    std::size_t operator()(const Element& e) const {
        return std::hash<std::string>{}(e.word);
    }
};

// Ordered symmetric generating alphabet.  The listed order is total and drives
// the shortlex order on words; the pairing is an involution (self-inverse
// symbols allowed).
class GeneratorAlphabet {
public:
    GeneratorAlphabet(std::vector<std::string> labels, std::vector<symbol_t> inverse_of)
        : labels_(std::move(labels)), inverse_(std::move(inverse_of)) {
        if (labels_.empty()) throw input_error("alphabet must not be empty");
        if (labels_.size() != inverse_.size())
            throw input_error("alphabet and inverse table sizes differ");
        if (labels_.size() > 200) throw input_error("alphabet too large");
        for (std::size_t s = 0; s < labels_.size(); ++s) {
            if (labels_[s].empty()) throw input_error("empty generator label");
            if (inverse_[s] >= labels_.size() || inverse_[inverse_[s]] != s)
                throw input_error("inverse pairing is not an involution covering every symbol");
            if (!by_label_.emplace(labels_[s], static_cast<symbol_t>(s)).second)
                throw input_error("duplicate generator label: " + labels_[s]);
        }
    }

    std::size_t size() const { return labels_.size(); }
    symbol_t inverse(symbol_t s) const { return inverse_[s]; }
    const std::string& label(symbol_t s) const { return labels_[s]; }

    std::optional<symbol_t> find(const std::string& label) const {
        auto it = by_label_.find(label);
        if (it == by_label_.end()) return std::nullopt;
        return it->second;
    }

    bool all_single_char() const {
        return std::all_of(labels_.begin(), labels_.end(),
                           [](const std::string& l) { return l.size() == 1; });
    }

private:
    std::vector<std::string> labels_;
    std::vector<symbol_t> inverse_;
    std::unordered_map<std::string, symbol_t> by_label_;
};

struct RewriteRule {
    Word lhs;
    Word rhs;
};

// Which shipped constructor produced a system; recipes use this to validate
// their group requirements.
struct PresetInfo {
    enum class Kind { custom, free_group, free_abelian, free_product };
    Kind kind = Kind::custom;
    std::vector<int> params; // rank, or cyclic factor orders

    bool is_free_group() const { return kind == Kind::free_group; }
};

struct CriticalPair {
    Word word; // superposition the two reductions started from
    Word nf_left;
    Word nf_right;
};

struct ConfluenceReport {
    bool confluent = true;
    std::vector<CriticalPair> failing_pairs;
};

class RewritingSystem {
public:
    RewritingSystem(GeneratorAlphabet alphabet, std::vector<RewriteRule> rules,
                    PresetInfo preset = {})
        : alphabet_(std::move(alphabet)), rules_(std::move(rules)), preset_(std::move(preset)) {
        for (const auto& r : rules_) {
            validate_symbols(r.lhs);
            validate_symbols(r.rhs);
            if (!shortlex_less(r.rhs, r.lhs))
                throw input_error("rewrite rule is not shortlex-reducing");
        }
        // Free cancellations x x^-1 -> [] are ordinary rules, listed first so
        // they win ties against user rules of the same length.
        for (std::size_t s = 0; s < alphabet_.size(); ++s) {
            Word lhs;
            lhs.push_back(static_cast<char>(s));
            lhs.push_back(static_cast<char>(alphabet_.inverse(static_cast<symbol_t>(s))));
            all_rules_.push_back(RewriteRule{std::move(lhs), Word{}});
        }
        all_rules_.insert(all_rules_.end(), rules_.begin(), rules_.end());
        // Per-symbol match lists: candidates whose left side ends with the
        // symbol, longest first (a longer redex ending here starts further
        // left), stable so cancellations and listed order break ties.
        by_last_.assign(alphabet_.size(), {});
        for (std::size_t i = 0; i < all_rules_.size(); ++i)
            by_last_[static_cast<unsigned char>(all_rules_[i].lhs.back())].push_back(
                static_cast<std::uint32_t>(i));
        for (auto& list : by_last_)
            std::stable_sort(list.begin(), list.end(),
                             [&](std::uint32_t a, std::uint32_t b) {
                                 return all_rules_[a].lhs.size() > all_rules_[b].lhs.size();
                             });
    }

    const GeneratorAlphabet& alphabet() const { return alphabet_; }
    const std::vector<RewriteRule>& rules() const { return rules_; }
    const PresetInfo& preset() const { return preset_; }

    // With no rules beyond free cancellation the Cayley graph is a tree
    // (free products of copies of Z and C2).  Several routines use closed
    // forms in that case.
    bool tree_like() const { return rules_.empty(); }

    Element normal_form(const Word& w) const {
        validate_symbols(w);
        Word out;
        out.reserve(w.size());
        reduce_onto(out, w);
        return Element{std::move(out)};
    }

    Element multiply(const Element& x, const Element& y) const {
        Word out = x.word;
        reduce_onto(out, y.word);
        return Element{std::move(out)};
    }

    // Multiply a normal form by a single generator on the right.
    Element multiply_symbol(const Element& x, symbol_t s) const {
        Word out = x.word;
        reduce_onto(out, Word(1, static_cast<char>(s)));
        return Element{std::move(out)};
    }

    Element inverse(const Element& x) const {
        Word rev;
        rev.reserve(x.word.size());
        for (auto it = x.word.rbegin(); it != x.word.rend(); ++it)
            rev.push_back(static_cast<char>(alphabet_.inverse(static_cast<symbol_t>(
                static_cast<unsigned char>(*it)))));
        Word out;
        out.reserve(rev.size());
        reduce_onto(out, rev);
        return Element{std::move(out)};
    }

    Element identity() const { return Element{}; }

    // Parse a word from generator labels.  Single-character alphabets are read
    // character by character ("abB"); otherwise tokens are whitespace-separated.
    Word parse(const std::string& text) const {
        Word w;
        if (alphabet_.all_single_char()) {
            for (char c : text) {
                if (c == ' ' || c == '\t') continue;
                auto s = alphabet_.find(std::string(1, c));
                if (!s) throw input_error(std::string("unknown symbol: ") + c);
                w.push_back(static_cast<char>(*s));
            }
        } else {
            std::istringstream in(text);
            std::string tok;
            while (in >> tok) {
                auto s = alphabet_.find(tok);
                if (!s) throw input_error("unknown symbol: " + tok);
                w.push_back(static_cast<char>(*s));
            }
        }
        return w;
    }

    std::string format(const Element& e) const {
        std::string out;
        bool spaced = !alphabet_.all_single_char();
        for (std::size_t i = 0; i < e.word.size(); ++i) {
            if (spaced && i) out += ' ';
            out += alphabet_.label(static_cast<symbol_t>(
                static_cast<unsigned char>(e.word[i])));
        }
        return out;
    }

    Element element(const std::string& text) const { return normal_form(parse(text)); }

    // Checks local confluence by resolving critical pairs of rule overlaps
    // (free cancellations count as rules).  Superpositions longer than
    // max_overlap_len are skipped.
    ConfluenceReport check_local_confluence(std::size_t max_overlap_len = 16) const {
        const std::vector<RewriteRule>& all = all_rules_;

        ConfluenceReport report;
        auto resolve = [&](const Word& superposition, const Word& left, const Word& right) {
            Word nl = normal_form(left).word;
            Word nr = normal_form(right).word;
            if (nl != nr) {
                report.confluent = false;
                if (report.failing_pairs.size() < 64)
                    report.failing_pairs.push_back(CriticalPair{superposition, nl, nr});
            }
        };

        for (const auto& r1 : all) {
            for (const auto& r2 : all) {
                // suffix of r1.lhs overlapping a prefix of r2.lhs
                std::size_t cap = std::min(r1.lhs.size(), r2.lhs.size());
                for (std::size_t olen = 1; olen <= cap; ++olen) {
                    if (r1.lhs.compare(r1.lhs.size() - olen, olen, r2.lhs, 0, olen) != 0)
                        continue;
                    Word word = r1.lhs.substr(0, r1.lhs.size() - olen) + r2.lhs;
                    if (word.size() > max_overlap_len) continue;
                    Word left = r1.rhs + r2.lhs.substr(olen);
                    Word right = r1.lhs.substr(0, r1.lhs.size() - olen) + r2.rhs;
                    resolve(word, left, right);
                }
                // r2.lhs contained strictly inside r1.lhs
                if (r2.lhs.size() < r1.lhs.size() && r1.lhs.size() <= max_overlap_len) {
                    for (std::size_t i = 0; i + r2.lhs.size() <= r1.lhs.size(); ++i) {
                        if (r1.lhs.compare(i, r2.lhs.size(), r2.lhs) != 0) continue;
                        Word right = r1.lhs.substr(0, i) + r2.rhs +
                                     r1.lhs.substr(i + r2.lhs.size());
                        resolve(r1.lhs, r1.rhs, right);
                    }
                }
            }
        }
        return report;
    }

private:
    void validate_symbols(const Word& w) const {
        for (char c : w)
            if (static_cast<unsigned char>(c) >= alphabet_.size())
                throw input_error("word contains a symbol outside the alphabet");
    }

    // Appends `tail` to the irreducible word `out`, reducing as symbols land.
    // Every new redex ends at the tail, so scanning left to right and resolving
    // the longest match first realizes deterministic leftmost-innermost
    // reduction.  Rule right-hand sides are re-fed through the same loop.
    void reduce_onto(Word& out, const Word& tail) const {
        Word pending(tail.rbegin(), tail.rend());
        while (!pending.empty()) {
            char c = pending.back();
            pending.pop_back();

            const RewriteRule* hit = nullptr;
            for (std::uint32_t idx : by_last_[static_cast<unsigned char>(c)]) {
                const RewriteRule& r = all_rules_[idx];
                std::size_t head = r.lhs.size() - 1; // symbols to match before c
                if (out.size() < head) continue;
                if (out.compare(out.size() - head, head, r.lhs, 0, head) != 0) continue;
                hit = &r;
                break;
            }

            if (hit) {
                out.resize(out.size() - (hit->lhs.size() - 1));
                for (auto it = hit->rhs.rbegin(); it != hit->rhs.rend(); ++it)
                    pending.push_back(*it);
            } else {
                out.push_back(c);
            }
        }
    }

    GeneratorAlphabet alphabet_;
    std::vector<RewriteRule> rules_;           // user rules, as given
    std::vector<RewriteRule> all_rules_;       // cancellations + user rules
    std::vector<std::vector<std::uint32_t>> by_last_;
    PresetInfo preset_;
};

namespace detail {

inline std::pair<std::vector<std::string>, std::vector<symbol_t>>
paired_letters(int count) {
    if (count < 1 || count > 26) throw input_error("generator count must be in [1, 26]");
    std::vector<std::string> labels;
    std::vector<symbol_t> inv;
    for (int i = 0; i < count; ++i) {
        labels.push_back(std::string(1, static_cast<char>('a' + i)));
        labels.push_back(std::string(1, static_cast<char>('A' + i)));
        inv.push_back(static_cast<symbol_t>(2 * i + 1));
        inv.push_back(static_cast<symbol_t>(2 * i));
    }
    return {labels, inv};
}

} // namespace detail

inline RewritingSystem make_free_group(int rank) {
    auto [labels, inv] = detail::paired_letters(rank);
    return RewritingSystem(GeneratorAlphabet(std::move(labels), std::move(inv)), {},
                           PresetInfo{PresetInfo::Kind::free_group, {rank}});
}

inline RewritingSystem make_free_abelian(int rank) {
    auto [labels, inv] = detail::paired_letters(rank);
    // Sort letters of distinct generators: any j-letter followed by an i-letter
    // with i < j swaps.  Length is preserved and the result is lex-smaller.
    std::vector<RewriteRule> rules;
    for (int i = 0; i < rank; ++i) {
        for (int j = i + 1; j < rank; ++j) {
            for (int ju : {2 * j, 2 * j + 1}) {
                for (int iu : {2 * i, 2 * i + 1}) {
                    Word lhs, rhs;
                    lhs.push_back(static_cast<char>(ju));
                    lhs.push_back(static_cast<char>(iu));
                    rhs.push_back(static_cast<char>(iu));
                    rhs.push_back(static_cast<char>(ju));
                    rules.push_back(RewriteRule{lhs, rhs});
                }
            }
        }
    }
    return RewritingSystem(GeneratorAlphabet(std::move(labels), std::move(inv)),
                           std::move(rules),
                           PresetInfo{PresetInfo::Kind::free_abelian, {rank}});
}

// Free product of cyclic groups C_{m_1} * ... * C_{m_r}.  Order-2 factors get a
// single self-inverse letter; larger factors get a letter pair with power
// rules folding g^e into the shorter of g^e and (g^-1)^(m-e).
inline RewritingSystem make_free_product(const std::vector<int>& orders) {
    if (orders.empty()) throw input_error("free product needs at least one factor");
    if (orders.size() > 26) throw input_error("too many factors");
    std::vector<std::string> labels;
    std::vector<symbol_t> inv;
    std::vector<RewriteRule> rules;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        int m = orders[i];
        if (m < 2) throw input_error("cyclic factor order must be >= 2");
        char lo = static_cast<char>('a' + i);
        char up = static_cast<char>('A' + i);
        if (m == 2) {
            auto s = static_cast<symbol_t>(labels.size());
            labels.push_back(std::string(1, lo));
            inv.push_back(s); // self-inverse
        } else {
            auto s = static_cast<symbol_t>(labels.size());
            labels.push_back(std::string(1, lo));
            labels.push_back(std::string(1, up));
            inv.push_back(static_cast<symbol_t>(s + 1));
            inv.push_back(s);
            int half = m / 2;
            // g^(half+1) -> G^(m-half-1)
            rules.push_back(RewriteRule{Word(half + 1, static_cast<char>(s)),
                                        Word(m - half - 1, static_cast<char>(s + 1))});
            if (m % 2 == 0) {
                // G^(m/2) -> g^(m/2): same length, lex-smaller
                rules.push_back(RewriteRule{Word(half, static_cast<char>(s + 1)),
                                            Word(half, static_cast<char>(s))});
            } else {
                rules.push_back(RewriteRule{Word(half + 1, static_cast<char>(s + 1)),
                                            Word(m - half - 1, static_cast<char>(s))});
            }
        }
    }
    std::vector<int> params(orders.begin(), orders.end());
    return RewritingSystem(GeneratorAlphabet(std::move(labels), std::move(inv)),
                           std::move(rules),
                           PresetInfo{PresetInfo::Kind::free_product, std::move(params)});
}

} // namespace sphavg
