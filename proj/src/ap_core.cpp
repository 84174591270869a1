#include "apforce/ap_core.hpp"

#include <algorithm>
#include <bit>
#include <iterator>
#include <sstream>

namespace apforce {

namespace {

void check_bound(Nat bound) {
    if (bound > kMaxUniverse) throw std::invalid_argument("universe bound exceeds 2^62");
}

}  // namespace

BoundedSet::BoundedSet(Nat universe_bound) : bound_(universe_bound) { check_bound(bound_); }

BoundedSet::BoundedSet(std::vector<Nat> elements, Nat universe_bound)
    : elements_(std::move(elements)), bound_(universe_bound) {
    check_bound(bound_);
    for (std::size_t i = 1; i < elements_.size(); ++i) {
        if (elements_[i - 1] >= elements_[i])
            throw std::invalid_argument("BoundedSet elements must be strictly increasing");
    }
    if (!elements_.empty() && elements_.back() >= bound_)
        throw std::invalid_argument("BoundedSet element " + std::to_string(elements_.back()) +
                                    " outside universe [0, " + std::to_string(bound_) + ")");
}

BoundedSet BoundedSet::from_unsorted(std::vector<Nat> elements, Nat universe_bound) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    return BoundedSet(std::move(elements), universe_bound);
}

BoundedSet BoundedSet::range(Nat lo, Nat hi, Nat universe_bound) {
    hi = std::min(hi, universe_bound);
    std::vector<Nat> out;
    if (lo < hi) {
        out.reserve(hi - lo);
        for (Nat x = lo; x < hi; ++x) out.push_back(x);
    }
    return BoundedSet(std::move(out), universe_bound);
}

BoundedSet BoundedSet::multiples(Nat step, Nat universe_bound) {
    if (step == 0) throw std::invalid_argument("multiples: step must be positive");
    std::vector<Nat> out;
    out.reserve(universe_bound / step + 1);
    for (Nat x = 0; x < universe_bound; x += step) out.push_back(x);
    return BoundedSet(std::move(out), universe_bound);
}

Nat BoundedSet::min() const {
    if (elements_.empty()) throw std::logic_error("min of empty set");
    return elements_.front();
}

Nat BoundedSet::max() const {
    if (elements_.empty()) throw std::logic_error("max of empty set");
    return elements_.back();
}

bool BoundedSet::contains(Nat x) const {
    return std::binary_search(elements_.begin(), elements_.end(), x);
}

std::optional<Nat> BoundedSet::successor(Nat x) const {
    auto it = std::lower_bound(elements_.begin(), elements_.end(), x);
    if (it == elements_.end()) return std::nullopt;
    return *it;
}

std::size_t BoundedSet::count_in(Nat lo, Nat hi) const {
    if (lo >= hi) return 0;
    auto a = std::lower_bound(elements_.begin(), elements_.end(), lo);
    auto b = std::lower_bound(a, elements_.end(), hi);
    return static_cast<std::size_t>(b - a);
}

BoundedSet BoundedSet::restrict_to(Nat lo, Nat hi) const {
    BoundedSet out(bound_);
    if (lo >= hi) return out;
    auto a = std::lower_bound(elements_.begin(), elements_.end(), lo);
    auto b = std::lower_bound(a, elements_.end(), hi);
    out.elements_.assign(a, b);
    return out;
}

BoundedSet BoundedSet::intersect(const BoundedSet& other) const {
    BoundedSet out(std::min(bound_, other.bound_));
    std::set_intersection(elements_.begin(), elements_.end(), other.elements_.begin(),
                          other.elements_.end(), std::back_inserter(out.elements_));
    return out;
}

BoundedSet BoundedSet::unite(const BoundedSet& other) const {
    BoundedSet out(std::max(bound_, other.bound_));
    std::set_union(elements_.begin(), elements_.end(), other.elements_.begin(),
                   other.elements_.end(), std::back_inserter(out.elements_));
    return out;
}

BoundedSet BoundedSet::minus(const BoundedSet& other) const {
    BoundedSet out(bound_);
    std::set_difference(elements_.begin(), elements_.end(), other.elements_.begin(),
                        other.elements_.end(), std::back_inserter(out.elements_));
    return out;
}

bool BoundedSet::is_subset_of(const BoundedSet& other) const {
    return std::includes(other.elements_.begin(), other.elements_.end(), elements_.begin(),
                         elements_.end());
}

BoundedSet BoundedSet::with_bound(Nat universe_bound) const {
    return BoundedSet(elements_, universe_bound);
}

std::string BoundedSet::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        if (i) os << ',';
        os << elements_[i];
    }
    os << '}';
    return os.str();
}

std::vector<Nat> ArithmeticProgression::terms() const {
    std::vector<Nat> out;
    out.reserve(length);
    for (Nat i = 0; i < length; ++i) out.push_back(term(i));
    return out;
}

std::string to_string(const ArithmeticProgression& ap) {
    return "AP(" + std::to_string(ap.start) + "," + std::to_string(ap.step) + "," +
           std::to_string(ap.length) + ")";
}

DyadicBlock block(Nat n) {
    if (n >= 63) throw std::out_of_range("block index too large");
    if (n == 0) return {0, 0, 2};
    return {n, Nat{1} << n, Nat{1} << (n + 1)};
}

Nat block_index(Nat m) {
    if (m < 2) return 0;
    return static_cast<Nat>(std::bit_width(m)) - 1;
}

Nat block_count(Nat universe_bound) {
    if (universe_bound == 0) return 0;
    return block_index(universe_bound - 1) + 1;
}

std::optional<ArithmeticProgression> contains_ap(const BoundedSet& s, Nat k) {
    if (s.empty()) return std::nullopt;
    return least_ap(s, k, s.min(), s.max() + 1);
}

bool is_3ap_free(const BoundedSet& s) { return !contains_ap(s, 3).has_value(); }

std::optional<ArithmeticProgression> find_ap_in(const BoundedSet& s, Nat k, Nat min_above) {
    if (s.empty() || s.max() <= min_above) return std::nullopt;
    return least_ap(s, k, min_above + 1, s.max() + 1);
}

namespace detail {

namespace {

// Keeps the best progression seen: longer wins, ties go to the lexicographically
// least (start, step).
struct Best {
    LongestAp result;

    void offer(Nat length, Nat start, Nat step) {
        const auto& w = result.witness;
        if (length > result.length ||
            (length == result.length && w &&
             (start < w->start || (start == w->start && step < w->step)))) {
            result.length = length;
            result.witness = ArithmeticProgression{start, step, length};
        }
    }
};

}  // namespace

LongestAp longest_ap_table(std::span<const Nat> s) {
    const std::size_t n = s.size();
    if (n == 0) return {};
    if (n == 1) return {1, ArithmeticProgression{s[0], 1, 1}};

    // len[j * n + k]: longest progression whose last two terms are s[j], s[k].
    std::vector<std::uint32_t> len(n * n, 2);
    for (std::size_t j = 1; j + 1 < n; ++j) {
        std::size_t i = j;  // candidate predecessor is s[i - 1]
        std::size_t k = j + 1;
        while (i > 0 && k < n) {
            const Nat lhs = s[i - 1] + s[k];
            const Nat rhs = 2 * s[j];
            if (lhs < rhs) {
                ++k;
            } else if (lhs > rhs) {
                --i;
            } else {
                len[j * n + k] = len[(i - 1) * n + j] + 1;
                --i;
                ++k;
            }
        }
    }

    Best best;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const Nat l = len[j * n + k];
            const Nat d = s[k] - s[j];
            best.offer(l, s[k] - (l - 1) * d, d);
        }
    }
    return best.result;
}

LongestAp longest_ap_walk(std::span<const Nat> s) {
    const std::size_t n = s.size();
    if (n == 0) return {};
    if (n == 1) return {1, ArithmeticProgression{s[0], 1, 1}};

    const Nat lo = s.front();
    const Nat hi = s.back();
    std::vector<bool> member(hi - lo + 1, false);
    for (Nat x : s) member[x - lo] = true;
    auto in = [&](Nat x) { return x >= lo && x <= hi && member[x - lo]; };

    Best best;
    best.offer(2, s[0], s[1] - s[0]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const Nat a = s[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Nat d = s[j] - a;
            // Nothing starting at a with step >= d can beat the current best.
            if ((hi - a) / d + 1 <= best.result.length) break;
            if (a >= lo + d && in(a - d)) continue;  // a is not the start of a maximal run
            Nat l = 2;
            for (Nat x = s[j] + d; x <= hi && in(x); x += d) ++l;
            best.offer(l, a, d);
        }
    }
    return best.result;
}

}  // namespace detail

LongestAp longest_ap(const BoundedSet& s) {
    // The pair table is the straightforward DP; past a few thousand elements its
    // n^2 memory stops being reasonable and the pruned walk takes over.
    constexpr std::size_t kTableLimit = 2048;
    if (s.size() <= kTableLimit) return detail::longest_ap_table(s.elements());
    return detail::longest_ap_walk(s.elements());
}

}  // namespace apforce
