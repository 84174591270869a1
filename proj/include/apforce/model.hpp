#pragma once

// The bounded-universe model: ground functions f, lazily evaluated subsets of
// the universe, filter bases and finite partitions.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "apforce/ap_core.hpp"

namespace apforce {

/// Signed threshold; -1 stands for "no lower cutoff".
using Threshold = std::int64_t;

class GroundFunction {
public:
    enum class Kind { Identity, BlockCollapse, Halving, Table };

    static GroundFunction identity(Nat universe_bound);
    static GroundFunction block_collapse(Nat universe_bound);  // m -> block_index(m)
    static GroundFunction halving(Nat universe_bound);         // m -> floor(m/2)
    /// values[m] is f(m); the universe is [0, values.size()).
    static GroundFunction table(std::vector<Nat> values);

    Kind kind() const { return kind_; }
    Nat universe_bound() const { return bound_; }
    /// Every value f takes on the universe lies below this.
    Nat codomain_bound() const;
    std::string name() const;
    const std::vector<Nat>& table_values() const { return table_; }
    bool is_monotone() const { return kind_ != Kind::Table; }

    Nat operator()(Nat m) const;

    /// Least x in [from, bound) with f(x) == v.
    std::optional<Nat> fiber_successor(Nat v, Nat from) const;
    /// Least x in [from, bound) with f(x) > t.
    std::optional<Nat> least_exceeding(Threshold t, Nat from) const;
    /// |f^{-1}(v)| within the universe.
    Nat fiber_size(Nat v) const;

private:
    Kind kind_ = Kind::Identity;
    Nat bound_ = 0;
    std::vector<Nat> table_;
};

/// A subset of [0, bound) that is only materialized on request. Generators of
/// a filter base (cofinite tails, multiples, unions of blocks) live here so a
/// universe far larger than memory can still be searched by successor queries.
class LazySet {
public:
    LazySet();
    LazySet(BoundedSet explicit_set);  // NOLINT: explicit sets are lazy sets

    static LazySet full(Nat bound);
    static LazySet interval(Nat lo, Nat hi, Nat bound);
    static LazySet cofinite_tail(Nat t, Nat bound);
    static LazySet residue(Nat modulus, Nat residue, Nat bound);
    static LazySet multiples(Nat m, Nat bound);
    /// { s*(2^n + i) : n >= 1, 0 <= i < n }: block n of the index sequence holds
    /// an n-term progression of step s, so the set is AP-rich and meets the
    /// dyadic blocks in unboundedly many points.
    static LazySet ap_rich(Nat step, Nat bound);
    static LazySet preimage(const GroundFunction& f, BoundedSet values);
    /// { x : f(x) > t }.
    static LazySet image_above(const GroundFunction& f, Threshold t);
    static LazySet intersection(std::vector<LazySet> parts);

    Nat universe_bound() const;
    const std::string& label() const;
    LazySet with_label(std::string label) const;

    bool contains(Nat x) const;
    std::optional<Nat> successor(Nat x) const;
    bool is_empty() const { return !successor(0).has_value(); }

    BoundedSet materialize() const;
    BoundedSet materialize(Nat lo, Nat hi) const;
    /// Elements in [lo, hi), stopping once `cap` have been seen.
    Nat count_in(Nat lo, Nat hi, Nat cap) const;

    /// Non-null when this set is stored explicitly.
    const BoundedSet* as_explicit() const;

    struct Node;

private:
    explicit LazySet(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

class CentrednessViolation : public Error {
public:
    CentrednessViolation(std::vector<std::size_t> indices);
    const std::vector<std::size_t>& indices() const { return indices_; }

private:
    std::vector<std::size_t> indices_;
};

using IndexSet = std::vector<std::size_t>;

struct CentrednessReport {
    bool centred = true;
    std::size_t arity_cap = 0;
    std::size_t meets_checked = 0;
    std::optional<IndexSet> violation;
};

/// Finite list of generators standing in for a filter base of subsets of omega.
class FilterBase {
public:
    FilterBase(std::vector<LazySet> generators, Nat universe_bound);
    /// Cofinite tails [t, bound): the desk-scale Frechet filter.
    static FilterBase frechet(Nat universe_bound, const std::vector<Nat>& tails = {0});

    Nat universe_bound() const { return bound_; }
    std::size_t size() const { return generators_.size(); }
    const LazySet& generator(std::size_t i) const { return generators_.at(i); }
    const std::vector<LazySet>& generators() const { return generators_; }
    void add(LazySet generator);

    /// Intersection of the selected generators, evaluated lazily.
    LazySet meet_view(const IndexSet& indices) const;
    BoundedSet meet(const IndexSet& indices) const;

    /// All non-empty index sets of size <= arity_cap, by size then lexicographically.
    std::vector<IndexSet> index_sets(std::size_t arity_cap) const;
    CentrednessReport check_centred(std::size_t arity_cap = 3) const;

private:
    std::vector<LazySet> generators_;
    Nat bound_ = 0;
};

class PartitionSpec {
public:
    enum class Kind { Dyadic, Pullback, Intervals };

    static PartitionSpec dyadic(Nat universe_bound);
    /// Cells f^{-1}[I_n].
    static PartitionSpec pullback(const GroundFunction& f);
    /// Disjoint [lo, hi) intervals that must cover [0, universe_bound) exactly.
    static PartitionSpec intervals(std::vector<std::pair<Nat, Nat>> cells, Nat universe_bound);

    Kind kind() const { return kind_; }
    Nat universe_bound() const { return bound_; }
    Nat cell_of(Nat m) const;

private:
    Kind kind_ = Kind::Dyadic;
    Nat bound_ = 0;
    std::optional<GroundFunction> f_;
    std::vector<std::pair<Nat, Nat>> cells_;
};

struct SelectorViolation {
    Nat cell = 0;
    Nat first = 0;
    Nat second = 0;
};

bool is_selector(const BoundedSet& a, const PartitionSpec& p);
std::optional<SelectorViolation> selector_violation(const BoundedSet& a, const PartitionSpec& p);

struct FiberReport {
    Nat universe_bound = 0;
    Nat max_fiber = 0;
    Nat max_fiber_value = 0;
    Nat fiber_cap = 0;
    bool pass = false;
};

FiberReport validate_finite_to_one(const GroundFunction& f, Nat fiber_cap);

BoundedSet image(const GroundFunction& f, const BoundedSet& a);
BoundedSet preimage(const GroundFunction& f, const BoundedSet& b);

/// Streams the distinct values of f[F] in increasing order until `visit`
/// returns false. Monotone f skips whole fibers, so an F covering a huge
/// universe costs one successor query per value.
void for_each_image_value(const GroundFunction& f, const LazySet& set,
                          const std::function<bool(Nat)>& visit);
BoundedSet image(const GroundFunction& f, const LazySet& set);

}  // namespace apforce
