#include "apforce/model.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <variant>

namespace apforce {

// ---------------------------------------------------------------------------
// GroundFunction

GroundFunction GroundFunction::identity(Nat universe_bound) {
    GroundFunction f;
    f.kind_ = Kind::Identity;
    f.bound_ = universe_bound;
    return f;
}

GroundFunction GroundFunction::block_collapse(Nat universe_bound) {
    GroundFunction f;
    f.kind_ = Kind::BlockCollapse;
    f.bound_ = universe_bound;
    return f;
}

GroundFunction GroundFunction::halving(Nat universe_bound) {
    GroundFunction f;
    f.kind_ = Kind::Halving;
    f.bound_ = universe_bound;
    return f;
}

GroundFunction GroundFunction::table(std::vector<Nat> values) {
    GroundFunction f;
    f.kind_ = Kind::Table;
    f.bound_ = values.size();
    f.table_ = std::move(values);
    return f;
}

Nat GroundFunction::codomain_bound() const {
    switch (kind_) {
        case Kind::Identity: return bound_;
        case Kind::BlockCollapse: return std::max<Nat>(block_count(bound_), 1);
        case Kind::Halving: return bound_ / 2 + 1;
        case Kind::Table:
            return table_.empty() ? 1 : *std::max_element(table_.begin(), table_.end()) + 1;
    }
    return bound_;
}

std::string GroundFunction::name() const {
    switch (kind_) {
        case Kind::Identity: return "identity";
        case Kind::BlockCollapse: return "block-collapse";
        case Kind::Halving: return "halving";
        case Kind::Table: return "table";
    }
    return "?";
}

Nat GroundFunction::operator()(Nat m) const {
    if (m >= bound_)
        throw std::out_of_range("f evaluated at " + std::to_string(m) + " outside [0, " +
                                std::to_string(bound_) + ")");
    switch (kind_) {
        case Kind::Identity: return m;
        case Kind::BlockCollapse: return block_index(m);
        case Kind::Halving: return m / 2;
        case Kind::Table: return table_[m];
    }
    return m;
}

std::optional<Nat> GroundFunction::fiber_successor(Nat v, Nat from) const {
    Nat lo = 0;
    Nat hi = 0;  // candidate fiber [lo, hi) for the monotone kinds
    switch (kind_) {
        case Kind::Identity:
            lo = v;
            hi = v + 1;
            break;
        case Kind::Halving:
            if (v > kMaxUniverse) return std::nullopt;
            lo = 2 * v;
            hi = 2 * v + 2;
            break;
        case Kind::BlockCollapse: {
            if (v >= 62) return std::nullopt;
            const auto b = block(v);
            lo = b.lo;
            hi = b.hi;
            break;
        }
        case Kind::Table:
            for (Nat x = from; x < bound_; ++x)
                if (table_[x] == v) return x;
            return std::nullopt;
    }
    const Nat x = std::max(lo, from);
    if (x < hi && x < bound_) return x;
    return std::nullopt;
}

std::optional<Nat> GroundFunction::least_exceeding(Threshold t, Nat from) const {
    Nat lo = 0;
    if (t >= 0) {
        const Nat tu = static_cast<Nat>(t);
        switch (kind_) {
            case Kind::Identity: lo = tu + 1; break;
            case Kind::Halving:
                if (tu >= kMaxUniverse / 2) return std::nullopt;
                lo = 2 * tu + 2;
                break;
            case Kind::BlockCollapse:
                if (tu + 1 >= 62) return std::nullopt;
                lo = block(tu + 1).lo;
                break;
            case Kind::Table:
                for (Nat x = from; x < bound_; ++x)
                    if (table_[x] > tu) return x;
                return std::nullopt;
        }
    }
    const Nat x = std::max(lo, from);
    if (x < bound_) return x;
    return std::nullopt;
}

Nat GroundFunction::fiber_size(Nat v) const {
    switch (kind_) {
        case Kind::Identity: return v < bound_ ? 1 : 0;
        case Kind::Halving: {
            Nat n = 0;
            for (Nat x = 2 * v; x < 2 * v + 2; ++x) n += x < bound_;
            return n;
        }
        case Kind::BlockCollapse: {
            if (v >= 62) return 0;
            const auto b = block(v);
            if (b.lo >= bound_) return 0;
            return std::min(b.hi, bound_) - b.lo;
        }
        case Kind::Table:
            return static_cast<Nat>(std::count(table_.begin(), table_.end(), v));
    }
    return 0;
}

// ---------------------------------------------------------------------------
// LazySet

namespace {

struct ExplicitNode {
    BoundedSet set;
};
struct IntervalNode {
    Nat lo, hi;
};
struct ResidueNode {
    Nat modulus, residue;
};
struct ApRichNode {
    Nat step;
};
struct PreimageNode {
    GroundFunction f;
    BoundedSet values;
};
struct ImageAboveNode {
    GroundFunction f;
    Threshold t;
};
struct IntersectionNode {
    std::vector<LazySet> parts;
};

using NodeVariant = std::variant<ExplicitNode, IntervalNode, ResidueNode, ApRichNode,
                                 PreimageNode, ImageAboveNode, IntersectionNode>;

// Least index y >= q of the form 2^n + i with n >= 1 and i < n.
Nat ap_rich_index_successor(Nat q) {
    if (q < 2) return 2;
    const Nat n = block_index(q);
    if (q - (Nat{1} << n) < n) return q;
    return Nat{1} << (n + 1);
}

bool ap_rich_index_member(Nat q) {
    if (q < 2) return false;
    const Nat n = block_index(q);
    return q - (Nat{1} << n) < n;
}

std::string join_labels(const std::vector<LazySet>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " & ";
        out += parts[i].label();
    }
    return out;
}

}  // namespace

struct LazySet::Node {
    Nat bound = 0;
    std::string label;
    NodeVariant v;
};

LazySet::LazySet() : LazySet(BoundedSet{}) {}

LazySet::LazySet(BoundedSet explicit_set) {
    auto n = std::make_shared<Node>();
    n->bound = explicit_set.universe_bound();
    n->label = explicit_set.to_string();
    n->v = ExplicitNode{std::move(explicit_set)};
    node_ = std::move(n);
}

LazySet::LazySet(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

namespace {

std::shared_ptr<LazySet::Node> make_node(Nat bound, std::string label, NodeVariant v) {
    if (bound > kMaxUniverse) throw std::invalid_argument("universe bound exceeds 2^62");
    auto n = std::make_shared<LazySet::Node>();
    n->bound = bound;
    n->label = std::move(label);
    n->v = std::move(v);
    return n;
}

}  // namespace

LazySet LazySet::full(Nat bound) {
    return LazySet(make_node(bound, "full", IntervalNode{0, bound}));
}

LazySet LazySet::interval(Nat lo, Nat hi, Nat bound) {
    return LazySet(make_node(bound, "range:" + std::to_string(lo) + ".." + std::to_string(hi),
                             IntervalNode{lo, std::min(hi, bound)}));
}

LazySet LazySet::cofinite_tail(Nat t, Nat bound) {
    return LazySet(make_node(bound, "cofinite:" + std::to_string(t), IntervalNode{t, bound}));
}

LazySet LazySet::residue(Nat modulus, Nat residue, Nat bound) {
    if (modulus == 0) throw std::invalid_argument("residue class needs a positive modulus");
    return LazySet(make_node(bound,
                             "residue:" + std::to_string(residue % modulus) + "/" +
                                 std::to_string(modulus),
                             ResidueNode{modulus, residue % modulus}));
}

LazySet LazySet::multiples(Nat m, Nat bound) {
    if (m == 0) throw std::invalid_argument("multiples: step must be positive");
    return LazySet(make_node(bound, "multiples:" + std::to_string(m), ResidueNode{m, 0}));
}

LazySet LazySet::ap_rich(Nat step, Nat bound) {
    if (step == 0) throw std::invalid_argument("ap_rich: step must be positive");
    return LazySet(make_node(bound, "ap_rich:" + std::to_string(step), ApRichNode{step}));
}

LazySet LazySet::preimage(const GroundFunction& f, BoundedSet values) {
    std::string label = "preimage:" + f.name() + ":" + values.to_string();
    return LazySet(make_node(f.universe_bound(), std::move(label), PreimageNode{f, std::move(values)}));
}

LazySet LazySet::image_above(const GroundFunction& f, Threshold t) {
    return LazySet(make_node(f.universe_bound(), f.name() + ">" + std::to_string(t),
                             ImageAboveNode{f, t}));
}

LazySet LazySet::intersection(std::vector<LazySet> parts) {
    if (parts.empty()) throw std::invalid_argument("intersection of no sets");
    if (parts.size() == 1) return parts.front();
    Nat bound = parts.front().universe_bound();
    for (const auto& p : parts) bound = std::min(bound, p.universe_bound());
    std::string label = join_labels(parts);
    return LazySet(make_node(bound, std::move(label), IntersectionNode{std::move(parts)}));
}

Nat LazySet::universe_bound() const { return node_->bound; }
const std::string& LazySet::label() const { return node_->label; }

LazySet LazySet::with_label(std::string label) const {
    auto n = std::make_shared<Node>(*node_);
    n->label = std::move(label);
    return LazySet(std::move(n));
}

const BoundedSet* LazySet::as_explicit() const {
    if (auto* e = std::get_if<ExplicitNode>(&node_->v)) return &e->set;
    return nullptr;
}

bool LazySet::contains(Nat x) const {
    if (x >= node_->bound) return false;
    return std::visit(
        [x](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ExplicitNode>) {
                return n.set.contains(x);
            } else if constexpr (std::is_same_v<T, IntervalNode>) {
                return n.lo <= x && x < n.hi;
            } else if constexpr (std::is_same_v<T, ResidueNode>) {
                return x % n.modulus == n.residue;
            } else if constexpr (std::is_same_v<T, ApRichNode>) {
                return x % n.step == 0 && ap_rich_index_member(x / n.step);
            } else if constexpr (std::is_same_v<T, PreimageNode>) {
                return n.values.contains(n.f(x));
            } else if constexpr (std::is_same_v<T, ImageAboveNode>) {
                return n.t < 0 || n.f(x) > static_cast<Nat>(n.t);
            } else {
                return std::all_of(n.parts.begin(), n.parts.end(),
                                   [x](const LazySet& p) { return p.contains(x); });
            }
        },
        node_->v);
}

std::optional<Nat> LazySet::successor(Nat x) const {
    const Nat bound = node_->bound;
    if (x >= bound) return std::nullopt;
    auto within = [bound](std::optional<Nat> y) -> std::optional<Nat> {
        if (y && *y < bound) return y;
        return std::nullopt;
    };
    return std::visit(
        [&](const auto& n) -> std::optional<Nat> {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, ExplicitNode>) {
                return within(n.set.successor(x));
            } else if constexpr (std::is_same_v<T, IntervalNode>) {
                const Nat y = std::max(x, n.lo);
                if (y < n.hi) return within(y);
                return std::nullopt;
            } else if constexpr (std::is_same_v<T, ResidueNode>) {
                const Nat r = x % n.modulus;
                const Nat y = x + (n.residue + n.modulus - r) % n.modulus;
                return within(y);
            } else if constexpr (std::is_same_v<T, ApRichNode>) {
                const Nat q = x / n.step + (x % n.step != 0);
                const Nat y = ap_rich_index_successor(q);
                if (y > (bound - 1) / n.step) return std::nullopt;
                return within(y * n.step);
            } else if constexpr (std::is_same_v<T, PreimageNode>) {
                std::optional<Nat> best;
                for (Nat v : n.values) {
                    auto y = n.f.fiber_successor(v, x);
                    if (y && (!best || *y < *best)) best = y;
                }
                return within(best);
            } else if constexpr (std::is_same_v<T, ImageAboveNode>) {
                return within(n.f.least_exceeding(n.t, x));
            } else {
                // Leapfrog: raise the candidate until every part agrees on it.
                Nat cand = x;
                for (;;) {
                    bool agreed = true;
                    for (const auto& p : n.parts) {
                        auto y = p.successor(cand);
                        if (!y) return std::nullopt;
                        if (*y != cand) {
                            cand = *y;
                            agreed = false;
                            break;
                        }
                    }
                    if (agreed) return within(cand);
                }
            }
        },
        node_->v);
}

BoundedSet LazySet::materialize() const { return materialize(0, node_->bound); }

BoundedSet LazySet::materialize(Nat lo, Nat hi) const {
    hi = std::min(hi, node_->bound);
    if (const auto* e = as_explicit()) return e->restrict_to(lo, hi);
    std::vector<Nat> out;
    for (auto y = successor(lo); y && *y < hi; y = successor(*y + 1)) out.push_back(*y);
    return BoundedSet(std::move(out), node_->bound);
}

Nat LazySet::count_in(Nat lo, Nat hi, Nat cap) const {
    hi = std::min(hi, node_->bound);
    if (const auto* e = as_explicit()) return std::min<Nat>(e->count_in(lo, hi), cap);
    Nat c = 0;
    for (auto y = successor(lo); y && *y < hi && c < cap; y = successor(*y + 1)) ++c;
    return c;
}

// ---------------------------------------------------------------------------
// FilterBase

namespace {

std::string indices_to_string(const std::vector<std::size_t>& idx) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i];
    os << ']';
    return os.str();
}

}  // namespace

CentrednessViolation::CentrednessViolation(std::vector<std::size_t> indices)
    : Error("centredness violation: generators " + indices_to_string(indices) +
            " have empty intersection"),
      indices_(std::move(indices)) {}

FilterBase::FilterBase(std::vector<LazySet> generators, Nat universe_bound)
    : generators_(std::move(generators)), bound_(universe_bound) {
    if (generators_.empty()) throw std::invalid_argument("filter base needs a generator");
}

FilterBase FilterBase::frechet(Nat universe_bound, const std::vector<Nat>& tails) {
    std::vector<LazySet> gens;
    for (Nat t : tails) gens.push_back(LazySet::cofinite_tail(t, universe_bound));
    return FilterBase(std::move(gens), universe_bound);
}

void FilterBase::add(LazySet generator) { generators_.push_back(std::move(generator)); }

LazySet FilterBase::meet_view(const IndexSet& indices) const {
    if (indices.empty()) throw std::invalid_argument("meet of no generators");
    std::vector<LazySet> parts;
    for (auto i : indices) {
        if (i >= generators_.size())
            throw std::out_of_range("generator index " + std::to_string(i) + " out of range");
        parts.push_back(generators_[i]);
    }
    auto m = LazySet::intersection(std::move(parts));
    if (m.is_empty()) throw CentrednessViolation(indices);
    return m;
}

BoundedSet FilterBase::meet(const IndexSet& indices) const {
    return meet_view(indices).materialize();
}

std::vector<IndexSet> FilterBase::index_sets(std::size_t arity_cap) const {
    std::vector<IndexSet> out;
    const std::size_t n = generators_.size();
    for (std::size_t r = 1; r <= std::min(arity_cap, n); ++r) {
        std::vector<std::size_t> idx(r);
        for (std::size_t i = 0; i < r; ++i) idx[i] = i;
        for (;;) {
            out.push_back(idx);
            std::size_t pos = r;
            while (pos > 0 && idx[pos - 1] == n - r + pos - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t j = pos; j < r; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

CentrednessReport FilterBase::check_centred(std::size_t arity_cap) const {
    CentrednessReport rep;
    rep.arity_cap = arity_cap;
    for (const auto& idx : index_sets(arity_cap)) {
        ++rep.meets_checked;
        std::vector<LazySet> parts;
        for (auto i : idx) parts.push_back(generators_[i]);
        if (LazySet::intersection(std::move(parts)).is_empty()) {
            rep.centred = false;
            rep.violation = idx;
            break;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// PartitionSpec

PartitionSpec PartitionSpec::dyadic(Nat universe_bound) {
    PartitionSpec p;
    p.kind_ = Kind::Dyadic;
    p.bound_ = universe_bound;
    return p;
}

PartitionSpec PartitionSpec::pullback(const GroundFunction& f) {
    PartitionSpec p;
    p.kind_ = Kind::Pullback;
    p.bound_ = f.universe_bound();
    p.f_ = f;
    return p;
}

PartitionSpec PartitionSpec::intervals(std::vector<std::pair<Nat, Nat>> cells, Nat universe_bound) {
    std::sort(cells.begin(), cells.end());
    Nat expect = 0;
    for (const auto& [lo, hi] : cells) {
        if (lo != expect || hi <= lo)
            throw std::invalid_argument("partition cells must be non-empty, disjoint and cover [0, " +
                                        std::to_string(universe_bound) + ")");
        expect = hi;
    }
    if (expect != universe_bound)
        throw std::invalid_argument("partition cells do not cover the universe");
    PartitionSpec p;
    p.kind_ = Kind::Intervals;
    p.bound_ = universe_bound;
    p.cells_ = std::move(cells);
    return p;
}

Nat PartitionSpec::cell_of(Nat m) const {
    if (m >= bound_) throw std::out_of_range("point outside the partitioned universe");
    switch (kind_) {
        case Kind::Dyadic: return block_index(m);
        case Kind::Pullback: return block_index((*f_)(m));
        case Kind::Intervals: {
            auto it = std::upper_bound(cells_.begin(), cells_.end(), std::make_pair(m, kMaxUniverse));
            return static_cast<Nat>(it - cells_.begin()) - 1;
        }
    }
    return 0;
}

std::optional<SelectorViolation> selector_violation(const BoundedSet& a, const PartitionSpec& p) {
    std::map<Nat, Nat> seen;
    for (Nat x : a) {
        const Nat c = p.cell_of(x);
        auto [it, fresh] = seen.emplace(c, x);
        if (!fresh) return SelectorViolation{c, it->second, x};
    }
    return std::nullopt;
}

bool is_selector(const BoundedSet& a, const PartitionSpec& p) {
    return !selector_violation(a, p).has_value();
}

// ---------------------------------------------------------------------------
// Fibers, images, preimages

FiberReport validate_finite_to_one(const GroundFunction& f, Nat fiber_cap) {
    FiberReport r;
    r.universe_bound = f.universe_bound();
    r.fiber_cap = fiber_cap;
    const Nat bound = f.universe_bound();
    switch (f.kind()) {
        case GroundFunction::Kind::Identity:
            r.max_fiber = bound > 0 ? 1 : 0;
            break;
        case GroundFunction::Kind::Halving:
            r.max_fiber = std::min<Nat>(bound, 2);
            break;
        case GroundFunction::Kind::BlockCollapse:
            for (Nat n = 0; n < block_count(bound); ++n) {
                const Nat s = f.fiber_size(n);
                if (s > r.max_fiber) {
                    r.max_fiber = s;
                    r.max_fiber_value = n;
                }
            }
            break;
        case GroundFunction::Kind::Table: {
            std::map<Nat, Nat> count;
            for (Nat v : f.table_values()) ++count[v];
            for (const auto& [v, c] : count) {
                if (c > r.max_fiber) {
                    r.max_fiber = c;
                    r.max_fiber_value = v;
                }
            }
            break;
        }
    }
    r.pass = r.max_fiber <= fiber_cap;
    return r;
}

BoundedSet image(const GroundFunction& f, const BoundedSet& a) {
    std::vector<Nat> out;
    out.reserve(a.size());
    for (Nat x : a) out.push_back(f(x));
    return BoundedSet::from_unsorted(std::move(out), f.codomain_bound());
}

BoundedSet preimage(const GroundFunction& f, const BoundedSet& b) {
    return LazySet::preimage(f, b).materialize();
}

void for_each_image_value(const GroundFunction& f, const LazySet& set,
                          const std::function<bool(Nat)>& visit) {
    if (!f.is_monotone()) {
        for (Nat v : image(f, set.materialize()))
            if (!visit(v)) return;
        return;
    }
    for (auto x = set.successor(0); x;) {
        const Nat v = f(*x);
        if (!visit(v)) return;
        auto next = f.least_exceeding(static_cast<Threshold>(v), *x);
        if (!next) return;
        x = set.successor(*next);
    }
}

BoundedSet image(const GroundFunction& f, const LazySet& set) {
    std::vector<Nat> out;
    for_each_image_value(f, set, [&](Nat v) {
        out.push_back(v);
        return true;
    });
    return BoundedSet(std::move(out), f.codomain_bound());
}

}  // namespace apforce
