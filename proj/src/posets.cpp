#include "apforce/posets.hpp"

#include <map>

namespace apforce {

std::string to_string(PosetTag tag) { return tag == PosetTag::W ? "W" : "G"; }

bool is_condition_w(const BoundedSet& k, const GroundFunction& f) {
    return is_3ap_free(image(f, k));
}

Rational weight_budget(const BoundedSet& k, const GroundFunction& f, const WeightFunction& g) {
    if (k.empty()) return Rational(0);
    const auto img = image(f, k);
    Rational mx = g(img[0]);
    for (Nat v : img) {
        Rational w = g(v);
        if (w > mx) mx = w;
    }
    return (Rational(2) - Rational(1) / pow2(k.size())) * mx;
}

bool is_condition_g(const BoundedSet& k, const GroundFunction& f, const WeightFunction& g) {
    if (k.empty()) return true;
    return weight_sum(image(f, k), g) <= weight_budget(k, f, g);
}

bool extends(const BoundedSet& k, const BoundedSet& l) {
    if (k == l) return true;
    if (k.size() <= l.size()) return false;
    if (!l.is_subset_of(k)) return false;
    if (l.empty()) return true;
    // l is a subset, so the new points are exactly the tail of k.
    for (std::size_t i = 0; i < l.size(); ++i)
        if (k[i] != l[i]) return false;
    return true;
}

std::optional<Nat> meets_dense_w(const BoundedSet& k_set, const BoundedSet& f_set, Nat k) {
    if (k == 0) return Nat{0};
    std::map<Nat, Nat> per_block;
    for (Nat x : k_set.intersect(f_set)) ++per_block[block_index(x)];
    for (const auto& [n, c] : per_block)
        if (c >= k) return n;
    return std::nullopt;
}

// Topmost witness: greatest start, then least step.
std::optional<ArithmeticProgression> meets_dense_g(const BoundedSet& k_set, const LazySet& f_set,
                                                   Nat k) {
    std::vector<Nat> both;
    for (Nat x : k_set)
        if (f_set.contains(x)) both.push_back(x);
    const BoundedSet s(std::move(both), k_set.universe_bound());
    if (k == 0) return contains_ap(s, k);
    if (s.empty()) return std::nullopt;
    if (k == 1) return ArithmeticProgression{s.max(), 1, 1};
    for (std::size_t i = s.size(); i-- > 0;) {
        const Nat a = s[i];
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const Nat d = s[j] - a;
            const Nat reach = (k - 1) * d;
            if (reach / (k - 1) != d || a + reach > s.max()) break;
            bool ok = true;
            for (Nat t = 2; t < k && ok; ++t) ok = s.contains(a + t * d);
            if (ok) return ArithmeticProgression{a, d, k};
        }
    }
    return std::nullopt;
}

}  // namespace apforce
