#pragma once

// Arithmetic-progression primitives over bounded sets of naturals, plus the
// dyadic block partition I_0 = {0,1}, I_n = [2^n, 2^{n+1}).

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace apforce {

using Nat = std::uint64_t;

/// Largest universe bound the library accepts. Keeps a + (k-1)*d style
/// arithmetic inside 64 bits for every progression we look at.
inline constexpr Nat kMaxUniverse = Nat{1} << 62;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A finite set of naturals below an exclusive universe bound, stored as a
/// strictly increasing sequence.
class BoundedSet {
public:
    BoundedSet() = default;
    explicit BoundedSet(Nat universe_bound);

    /// Elements must already be strictly increasing and below the bound.
    BoundedSet(std::vector<Nat> elements, Nat universe_bound);
    BoundedSet(std::initializer_list<Nat> elements, Nat universe_bound)
        : BoundedSet(std::vector<Nat>(elements), universe_bound) {}

    /// Sorts and deduplicates; still rejects out-of-range elements.
    static BoundedSet from_unsorted(std::vector<Nat> elements, Nat universe_bound);
    static BoundedSet range(Nat lo, Nat hi, Nat universe_bound);
    static BoundedSet multiples(Nat step, Nat universe_bound);

    Nat universe_bound() const { return bound_; }
    std::size_t size() const { return elements_.size(); }
    bool empty() const { return elements_.empty(); }
    Nat min() const;
    Nat max() const;
    std::span<const Nat> elements() const { return elements_; }
    auto begin() const { return elements_.begin(); }
    auto end() const { return elements_.end(); }
    Nat operator[](std::size_t i) const { return elements_[i]; }

    bool contains(Nat x) const;
    /// Least element >= x.
    std::optional<Nat> successor(Nat x) const;
    /// Elements in [lo, hi).
    std::size_t count_in(Nat lo, Nat hi) const;
    BoundedSet restrict_to(Nat lo, Nat hi) const;

    BoundedSet intersect(const BoundedSet& other) const;
    BoundedSet unite(const BoundedSet& other) const;
    BoundedSet minus(const BoundedSet& other) const;
    bool is_subset_of(const BoundedSet& other) const;
    BoundedSet with_bound(Nat universe_bound) const;

    std::string to_string() const;

    friend bool operator==(const BoundedSet& a, const BoundedSet& b) {
        return a.elements_ == b.elements_;
    }

private:
    std::vector<Nat> elements_;
    Nat bound_ = 0;
};

struct ArithmeticProgression {
    Nat start = 0;
    Nat step = 1;
    Nat length = 1;

    Nat term(Nat i) const { return start + i * step; }
    Nat last() const { return term(length - 1); }
    std::vector<Nat> terms() const;

    friend bool operator==(const ArithmeticProgression&, const ArithmeticProgression&) = default;
};

std::string to_string(const ArithmeticProgression& ap);

struct DyadicBlock {
    Nat index = 0;
    Nat lo = 0;  // inclusive
    Nat hi = 0;  // exclusive

    Nat size() const { return hi - lo; }
    bool contains(Nat m) const { return lo <= m && m < hi; }

    friend bool operator==(const DyadicBlock&, const DyadicBlock&) = default;
};

DyadicBlock block(Nat n);
Nat block_index(Nat m);
/// Number of blocks that meet [0, universe_bound).
Nat block_count(Nat universe_bound);

struct LongestAp {
    Nat length = 0;
    std::optional<ArithmeticProgression> witness;
};

std::optional<ArithmeticProgression> contains_ap(const BoundedSet& s, Nat k);
bool is_3ap_free(const BoundedSet& s);
LongestAp longest_ap(const BoundedSet& s);
std::optional<ArithmeticProgression> find_ap_in(const BoundedSet& s, Nat k, Nat min_above);

namespace detail {
// Exposed for tests: the two quadratic strategies behind longest_ap.
LongestAp longest_ap_table(std::span<const Nat> s);
LongestAp longest_ap_walk(std::span<const Nat> s);
}  // namespace detail

/// Least (by start, then step) progression of length k whose terms lie in
/// [lo, hi) and in `s`. `Set` needs `successor(Nat) -> optional<Nat>` and
/// `contains(Nat) -> bool`; it may be lazily represented, so the search only
/// walks elements it actually needs.
template <class Set>
std::optional<ArithmeticProgression> least_ap(const Set& s, Nat k, Nat lo, Nat hi) {
    if (k == 0) throw std::invalid_argument("progression length must be at least 1");
    if (lo >= hi) return std::nullopt;
    for (auto a = s.successor(lo); a && *a < hi; a = s.successor(*a + 1)) {
        if (k == 1) return ArithmeticProgression{*a, 1, 1};
        const Nat room = hi - 1 - *a;
        for (auto b = s.successor(*a + 1); b && *b < hi; b = s.successor(*b + 1)) {
            const Nat d = *b - *a;
            if (d > room / (k - 1)) break;
            bool ok = true;
            for (Nat i = 2; i < k && ok; ++i) ok = s.contains(*a + i * d);
            if (ok) return ArithmeticProgression{*a, d, k};
        }
    }
    return std::nullopt;
}

}  // namespace apforce
