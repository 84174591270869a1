#include "apforce/dense.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace apforce {

std::string to_string(ExtensionCase c) {
    switch (c) {
        case ExtensionCase::WCaseI: return "W-case-I";
        case ExtensionCase::WCaseII: return "W-case-II";
        case ExtensionCase::G: return "G";
    }
    return "?";
}

ExtensionFailure::ExtensionFailure(const std::string& what, std::vector<BlockScan> scan,
                                   std::optional<Threshold> threshold, Nat search_lo,
                                   Nat search_hi)
    : Error(what), scan_(std::move(scan)), threshold_(threshold), lo_(search_lo), hi_(search_hi) {}

GenericRunError::GenericRunError(const std::string& what, GenericRun partial)
    : Error(what), partial_(std::move(partial)) {}

bool all_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

std::span<const Nat> in_block(std::span<const Nat> elems, Nat n) {
    const auto b = block(n);
    auto lo = std::lower_bound(elems.begin(), elems.end(), b.lo);
    auto hi = std::lower_bound(lo, elems.end(), b.hi);
    return {lo, hi};
}

std::vector<Nat> distinct_values(std::span<const Nat> xs, const GroundFunction& f) {
    std::vector<Nat> out;
    out.reserve(xs.size());
    for (Nat x : xs) {
        const Nat v = f(x);
        if (f.is_monotone() && !out.empty() && out.back() == v) continue;
        out.push_back(v);
    }
    if (!f.is_monotone()) {
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
}

BoundedSet with_new_points(const BoundedSet& l, const std::vector<Nat>& fresh, Nat bound) {
    std::vector<Nat> all(l.begin(), l.end());
    all.insert(all.end(), fresh.begin(), fresh.end());
    return BoundedSet::from_unsorted(std::move(all), bound);
}

void assert_post(bool ok, const std::string& what) {
    if (!ok) throw std::logic_error("extension post-check failed: " + what);
}

Extension case_ii(ExtensionTrace t, std::span<const Nat> elems, const GroundFunction& f,
                  const BoundedSet& image_l, Nat n1) {
    const BoundedSet& l = t.l_set;
    const Nat k = t.k;
    const auto vals = distinct_values(in_block(elems, n1), f);
    t.value_cutoff = l.empty() ? -1 : static_cast<Threshold>(3 * t.max_image_l);
    std::vector<Nat> pool;
    for (Nat v : vals)
        if (t.value_cutoff < 0 || v > static_cast<Nat>(t.value_cutoff)) pool.push_back(v);

    std::vector<Nat> b(image_l.begin(), image_l.end());
    std::vector<Nat> chosen;
    for (Nat i = 0; i < k; ++i) {
        std::set<Nat> excluded;
        for (std::size_t x = 0; x < b.size(); ++x) {
            for (std::size_t y = x + 1; y < b.size(); ++y) {
                const Nat c = 2 * b[y] - b[x];
                if (c > b.back() && std::binary_search(pool.begin(), pool.end(), c))
                    excluded.insert(c);
            }
        }
        const Nat size = l.size() + i;
        const Nat cap = size * (size == 0 ? 0 : size - 1) / 2;
        if (excluded.size() > cap)
            throw std::logic_error("case II exclusion set exceeds its bound");
        auto it = b.empty() ? pool.begin() : std::upper_bound(pool.begin(), pool.end(), b.back());
        while (it != pool.end() && excluded.count(*it)) ++it;
        if (it == pool.end()) throw std::logic_error("case II ran out of admissible values");
        b.push_back(*it);
        chosen.push_back(*it);
        t.exclusions.push_back({i, std::vector<Nat>(excluded.begin(), excluded.end()), *it, cap});
    }

    std::vector<Nat> fresh;
    for (Nat x : in_block(elems, n1))
        if (std::binary_search(chosen.begin(), chosen.end(), f(x))) fresh.push_back(x);

    t.case_taken = ExtensionCase::WCaseII;
    t.chosen_block = n1;
    t.l_prime = BoundedSet(fresh, t.universe_bound);
    t.k_set = with_new_points(l, fresh, t.universe_bound);
    return {Condition{t.k_set, PosetTag::W}, std::move(t)};
}

std::optional<Extension> case_i(ExtensionTrace t, std::span<const Nat> elems,
                                const GroundFunction& f) {
    const BoundedSet& l = t.l_set;
    const Nat k = t.k;
    Nat m = 0;
    for (const auto& s : t.scan) m = std::max(m, s.image_size);
    const Nat cutoff = l.empty() ? 0 : 3 * t.max_image_l;
    const Nat need = k * (m + 1);
    for (const auto& s : t.scan) {
        const auto xs = in_block(elems, s.block);
        std::map<Nat, std::vector<Nat>> by_value;
        Nat survivors = 0;
        for (Nat x : xs) {
            const Nat v = f(x);
            if (v <= cutoff) continue;
            ++survivors;
            auto& fiber = by_value[v];
            if (fiber.size() < k) fiber.push_back(x);
        }
        if (survivors < need) continue;
        for (const auto& [v, fiber] : by_value) {
            if (fiber.size() < k) continue;
            t.case_taken = ExtensionCase::WCaseI;
            t.chosen_block = s.block;
            t.value_cutoff = static_cast<Threshold>(cutoff);
            t.m = m;
            t.l = v;
            t.l_prime = BoundedSet(fiber, t.universe_bound);
            t.k_set = with_new_points(l, fiber, t.universe_bound);
            return Extension{Condition{t.k_set, PosetTag::W}, std::move(t)};
        }
        throw std::logic_error("case I pigeonhole found no heavy value");
    }
    return std::nullopt;
}

}  // namespace

Extension extend_w(const Condition& lc, const BoundedSet& f_set, const GroundFunction& f, Nat k) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    const BoundedSet& l = lc.set;
    if (!is_condition_w(l, f)) throw std::invalid_argument("L is not a condition: f[L] has a 3-AP");
    const Nat bound = std::min(f_set.universe_bound(), f.universe_bound());
    if (!f_set.empty() && f_set.max() >= f.universe_bound())
        throw std::invalid_argument("F leaves the domain of f");

    ExtensionTrace t;
    t.universe_bound = bound;
    t.k = k;
    t.l_set = l;
    const auto image_l = image(f, l);
    t.max_image_l = image_l.empty() ? 0 : image_l.max();
    t.n0 = l.empty() ? -1 : static_cast<Threshold>(block_index(l.max()));
    const Nat size = l.size() + k;
    t.case_ii_threshold = 3 * t.max_image_l + size * size;

    const auto elems = f_set.elements();
    for (Nat n = static_cast<Nat>(t.n0 + 1); n < block_count(bound); ++n)
        t.scan.push_back({n, distinct_values(in_block(elems, n), f).size()});

    std::optional<Extension> out;
    for (const auto& s : t.scan) {
        if (s.image_size >= t.case_ii_threshold) {
            out = case_ii(t, elems, f, image_l, s.block);
            break;
        }
    }
    if (!out) out = case_i(t, elems, f);
    if (!out) {
        std::ostringstream os;
        os << "universe exhausted: no block above n0 = " << t.n0 << " below " << bound
           << " reaches the case II threshold " << t.case_ii_threshold
           << " or a case I block for k = " << k;
        throw ExtensionFailure(os.str(), t.scan);
    }

    const auto& kset = out->condition.set;
    assert_post(extends(kset, l), "K does not extend L");
    assert_post(is_condition_w(kset, f), "f[K] has a 3-AP");
    assert_post(meets_dense_w(kset, f_set, k).has_value(), "K misses D_{F,k}");
    return *std::move(out);
}

Extension extend_g(const Condition& lc, const LazySet& f_set, const GroundFunction& f,
                   const WeightFunction& g, Nat k) {
    if (k == 0) throw std::invalid_argument("k must be at least 1");
    const BoundedSet& l = lc.set;
    if (!is_condition_g(l, f, g))
        throw std::invalid_argument("L is not a condition: weight budget exceeded");
    const Nat bound = std::min(f_set.universe_bound(), f.universe_bound());

    ExtensionTrace t;
    t.case_taken = ExtensionCase::G;
    t.universe_bound = bound;
    t.k = k;
    t.l_set = l;

    if (l.empty()) {
        auto ap = least_ap(f_set, k, 0, bound);
        if (!ap)
            throw ExtensionFailure("no progression of length " + std::to_string(k) + " in F",
                                   {}, Threshold{-1}, 0, bound);
        BoundedSet cand(ap->terms(), bound);
        if (!is_condition_g(cand, f, g)) {
            // The least progression is over budget: start from one point instead.
            BoundedSet seed({*f_set.successor(0)}, bound);
            auto ext = extend_g(Condition{seed, PosetTag::G}, f_set, f, g, k);
            ext.trace.bootstrap = true;
            ext.trace.l_set = l;
            ext.trace.l_prime = ext.condition.set;
            return ext;
        }
        t.threshold = -1;
        t.ap = ap;
        t.l_prime = cand;
        t.k_set = cand;
    } else {
        const auto image_l = image(f, l);
        Rational mx = g(image_l[0]);
        for (Nat v : image_l) mx = std::max(mx, Rational(g(v)));
        const Rational cutoff = mx / (pow2(l.size() + 1) * Rational(static_cast<unsigned long>(k)));
        const Nat first = g.first_below(cutoff, f.codomain_bound());
        const Threshold n_l = static_cast<Threshold>(first) - 1;
        t.threshold = n_l;
        t.weight_cutoff = cutoff;

        const Nat lo = l.max() + 1;
        const auto search = LazySet::intersection({f_set, LazySet::image_above(f, n_l)});
        auto ap = least_ap(search, k, lo, bound);
        if (!ap) {
            std::ostringstream os;
            os << "no progression of length " << k << " in F with f-values above n_L = " << n_l
               << " inside [" << lo << ", " << bound << ")";
            throw ExtensionFailure(os.str(), {}, n_l, lo, bound);
        }
        t.ap = ap;
        t.l_prime = BoundedSet(ap->terms(), bound);
        t.k_set = with_new_points(l, ap->terms(), bound);
    }
    t.chosen_block = block_index(t.ap->start);

    const auto& kset = t.k_set;
    assert_post(extends(kset, l), "K does not extend L");
    assert_post(is_condition_g(kset, f, g), "K exceeds the weight budget");
    assert_post(meets_dense_g(kset, f_set, k).has_value(), "K misses D_{F,k}");
    return {Condition{kset, PosetTag::G}, std::move(t)};
}

std::vector<DenseSetSpec> sort_schedule(std::vector<DenseSetSpec> schedule) {
    std::stable_sort(schedule.begin(), schedule.end(),
                     [](const DenseSetSpec& a, const DenseSetSpec& b) { return a.k < b.k; });
    return schedule;
}

namespace {

bool valid_condition(const BoundedSet& k, const GenericSetup& s) {
    return s.flavor == PosetTag::W ? is_condition_w(k, s.f) : is_condition_g(k, s.f, *s.g);
}

std::string spec_label(const DenseSetSpec& spec) {
    std::ostringstream os;
    os << "D(";
    for (std::size_t i = 0; i < spec.generators.size(); ++i)
        os << (i ? "&" : "") << spec.generators[i];
    os << "," << spec.k << ")";
    return os.str();
}

}  // namespace

GenericRun run_generic(const Condition& start, const std::vector<DenseSetSpec>& schedule,
                       const GenericSetup& setup, bool sort_by_k) {
    if (start.tag != setup.flavor) throw std::invalid_argument("start condition has the wrong tag");
    if (setup.flavor == PosetTag::G && !setup.g)
        throw std::invalid_argument("G flavor needs a weight function");
    if (!valid_condition(start.set, setup))
        throw std::invalid_argument("start is not a condition of the poset");

    GenericRun run;
    run.flavor = setup.flavor;
    run.universe_bound = setup.base.universe_bound();
    run.schedule = sort_by_k ? sort_schedule(schedule) : schedule;
    run.chain.push_back(start.set);

    BoundedSet cur = start.set;
    for (auto spec : run.schedule) {
        if (spec.k == 0) throw std::invalid_argument("dense set spec needs k >= 1");
        spec.flavor = setup.flavor;
        GenericStep step;
        step.spec = spec;
        try {
            const LazySet meet = setup.base.meet_view(spec.generators);
            if (setup.flavor == PosetTag::W) {
                const BoundedSet f_set = meet.materialize();
                step.witness_block = meets_dense_w(cur, f_set, spec.k);
                if (step.witness_block) {
                    step.already_met = true;
                } else {
                    auto ext = extend_w(Condition{cur, PosetTag::W}, f_set, setup.f, spec.k);
                    cur = ext.condition.set;
                    step.trace = std::move(ext.trace);
                    step.witness_block = meets_dense_w(cur, f_set, spec.k);
                }
            } else {
                step.witness_ap = meets_dense_g(cur, meet, spec.k);
                if (step.witness_ap) {
                    step.already_met = true;
                } else {
                    auto ext = extend_g(Condition{cur, PosetTag::G}, meet, setup.f, *setup.g, spec.k);
                    cur = ext.condition.set;
                    step.trace = std::move(ext.trace);
                    step.witness_ap = meets_dense_g(cur, meet, spec.k);
                }
            }
        } catch (const Error& e) {
            run.union_set = cur;
            throw GenericRunError(spec_label(spec) + ": " + e.what(), std::move(run));
        }
        if (step.witness_block) {
            const auto b = block(*step.witness_block);
            const BoundedSet f_set = setup.base.meet_view(spec.generators).materialize(b.lo, b.hi);
            const auto pts = cur.restrict_to(b.lo, b.hi).intersect(f_set);
            step.witness_points.assign(pts.begin(), pts.end());
        } else if (step.witness_ap) {
            step.witness_points = step.witness_ap->terms();
        }
        if (step.trace) run.chain.push_back(cur);
        run.steps.push_back(std::move(step));
    }
    run.union_set = cur;
    run.checks = verify_generic(run, setup);
    return run;
}

std::vector<Check> verify_generic(const GenericRun& run, const GenericSetup& setup) {
    std::vector<Check> checks;

    bool chain_ok = !run.chain.empty();
    std::string chain_detail = "chain length " + std::to_string(run.chain.size());
    BoundedSet uni(run.universe_bound);
    for (std::size_t i = 0; i < run.chain.size(); ++i) {
        uni = uni.unite(run.chain[i]);
        if (!valid_condition(run.chain[i], setup)) {
            chain_ok = false;
            chain_detail = "condition " + std::to_string(i) + " leaves the poset";
            break;
        }
        if (i > 0 && !extends(run.chain[i], run.chain[i - 1])) {
            chain_ok = false;
            chain_detail = "condition " + std::to_string(i) + " does not extend its predecessor";
            break;
        }
    }
    checks.push_back({"chain", chain_ok, chain_detail});
    checks.push_back({"union", uni == run.union_set, "|G| = " + std::to_string(run.union_set.size())});

    const BoundedSet& g_set = run.union_set;
    const auto img = image(setup.f, g_set);
    bool witnesses_ok = true;
    std::string witness_detail = "specs re-validated: " + std::to_string(run.steps.size());

    if (setup.flavor == PosetTag::W) {
        checks.push_back({"image-3ap-free", is_3ap_free(img),
                          "|f[G]| = " + std::to_string(img.size())});
        for (const auto& step : run.steps) {
            bool ok = false;
            if (step.witness_block) {
                const auto b = block(*step.witness_block);
                const BoundedSet f_set = setup.base.meet_view(step.spec.generators).materialize(b.lo, b.hi);
                ok = g_set.restrict_to(b.lo, b.hi).intersect(f_set).size() >= step.spec.k;
            }
            if (!ok) {
                witnesses_ok = false;
                witness_detail = spec_label(step.spec) + " has no valid block witness";
                break;
            }
        }
    } else {
        const Rational sum = weight_sum(img, *setup.g);
        const Rational cap = Rational(2) * setup.g->max_value(setup.f.codomain_bound());
        checks.push_back({"weight-budget", sum <= cap,
                          "sum = " + to_string(sum) + ", cap = " + to_string(cap)});
        for (const auto& step : run.steps) {
            const LazySet meet = setup.base.meet_view(step.spec.generators);
            bool ok = step.witness_ap && step.witness_ap->length == step.spec.k;
            if (ok) {
                for (Nat x : step.witness_ap->terms())
                    ok = ok && g_set.contains(x) && meet.contains(x);
            }
            if (!ok) {
                witnesses_ok = false;
                witness_detail = spec_label(step.spec) + " has no valid progression witness";
                break;
            }
        }
    }
    checks.push_back({"dense-witnesses", witnesses_ok, witness_detail});
    return checks;
}

}  // namespace apforce
