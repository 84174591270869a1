#include "apforce/construction.hpp"

#include <algorithm>
#include <sstream>

namespace apforce {

namespace {

std::string indices_label(const IndexSet& idx) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i];
    os << ']';
    return os.str();
}

Nat max_k(const std::vector<Nat>& ks) {
    Nat m = 0;
    for (Nat k : ks) m = std::max(m, k);
    return m;
}

void validate_ks(const std::vector<Nat>& ks) {
    for (Nat k : ks)
        if (k == 0) throw std::invalid_argument("scheduled k must be at least 1");
}

}  // namespace

// ---------------------------------------------------------------------------
// (♠)

bool SpadeReport::pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const SpadeRow& r) { return r.block.has_value(); });
}

SpadeReport spade_check(const LazySet& f_set, const std::vector<Nat>& ks) {
    SpadeReport rep;
    rep.label = f_set.label();
    rep.universe_bound = f_set.universe_bound();
    const Nat blocks = block_count(f_set.universe_bound());
    for (Nat k : ks) {
        SpadeRow row;
        row.k = k;
        if (k == 0) {
            row.block = 0;
        } else {
            for (Nat n = 0; n < blocks; ++n) {
                const auto b = block(n);
                const Nat c = f_set.count_in(b.lo, b.hi, k);
                if (c >= k) {
                    row.block = n;
                    row.count = c;
                    break;
                }
            }
        }
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Dichotomy

std::string to_string(DichotomyBranch b) {
    return b == DichotomyBranch::WithA ? "with-A" : "with-complement";
}

InconclusiveDichotomy::InconclusiveDichotomy(const std::string& what, DichotomyResult partial)
    : Error(what), partial_(std::move(partial)) {}

namespace {

IndexSet merged(const IndexSet& a, const IndexSet& b) {
    IndexSet out = a;
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// |S ∩ [lo, hi) ∖ A|, stopping at cap.
Nat count_outside(const LazySet& s, const LazySet& a, Nat lo, Nat hi, Nat cap) {
    Nat c = 0;
    for (auto x = s.successor(lo); x && *x < hi && c < cap; x = s.successor(*x + 1))
        if (!a.contains(*x)) ++c;
    return c;
}

}  // namespace

DichotomyResult spade_dichotomy(const FilterBase& base, const LazySet& a, Nat k_cap,
                                const DichotomyOptions& options) {
    DichotomyResult res;
    res.universe_bound = base.universe_bound();
    res.k_cap = k_cap;
    res.arity_cap = options.arity_cap;
    const Nat blocks = block_count(base.universe_bound());
    res.horizon = options.horizon.value_or(blocks / 2);

    std::vector<Nat> ks;
    for (Nat k = 1; k <= k_cap; ++k) ks.push_back(k);
    const auto meets = base.index_sets(options.arity_cap);
    for (const auto& idx : meets) {
        if (!spade_check(base.meet_view(idx), ks).pass())
            throw std::invalid_argument("base fails spade up to k = " + std::to_string(k_cap) +
                                        " on meet " + indices_label(idx));
    }

    for (const auto& idx : meets) {
        const auto fa = LazySet::intersection({base.meet_view(idx), a});
        for (Nat k = 1; k <= k_cap && !res.f0; ++k) {
            DichotomyRow row;
            row.meet = idx;
            row.k = k;
            for (Nat n = res.horizon; n < blocks; ++n) {
                const auto b = block(n);
                const Nat c = fa.count_in(b.lo, b.hi, k);
                if (c >= k) {
                    row.block = n;
                    row.count = c;
                    break;
                }
            }
            if (!row.block) {
                res.f0 = idx;
                res.failing_k = k;
            }
            res.rows.push_back(row);
        }
        if (res.f0) break;
    }
    if (!res.f0) {
        res.branch = DichotomyBranch::WithA;
        return res;
    }

    res.branch = DichotomyBranch::WithComplement;
    res.rows.clear();
    const auto f0a = LazySet::intersection({base.meet_view(*res.f0), a});
    Nat peak = 0;
    for (Nat n = 0; n < blocks; ++n) {
        const auto b = block(n);
        peak = std::max(peak, f0a.count_in(b.lo, b.hi, b.size()));
    }
    const Nat k0 = peak + 1;
    res.k0 = k0;

    for (const auto& idx : meets) {
        const auto f = base.meet_view(idx);
        const auto ff0 = base.meet_view(merged(idx, *res.f0));
        const auto ff0a = LazySet::intersection({ff0, a});
        for (Nat k = 1; k <= k_cap; ++k) {
            DichotomyRow row;
            row.meet = idx;
            row.k = k;
            for (Nat n = 0; n < blocks; ++n) {
                const auto b = block(n);
                const Nat c = ff0.count_in(b.lo, b.hi, k + k0);
                if (c < k + k0) continue;
                row.block = n;
                row.count = c;
                row.count_in_a = ff0a.count_in(b.lo, b.hi, k0);
                row.count_complement = count_outside(f, a, b.lo, b.hi, k);
                break;
            }
            const bool ok = row.block && row.count >= k + k0 && row.count_in_a < k0 &&
                            row.count_complement >= k;
            res.rows.push_back(row);
            if (!ok)
                throw InconclusiveDichotomy("no block certifies the complement branch for meet " +
                                                indices_label(idx) + " at k = " + std::to_string(k),
                                            res);
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Selector split

SelectorPreconditionError::SelectorPreconditionError(const SelectorViolation& v)
    : Error("not a selector: " + std::to_string(v.first) + " and " + std::to_string(v.second) +
            " both lie in the preimage of block " + std::to_string(v.cell)),
      v_(v) {}

QPointSplit qpoint_witness_split(const BoundedSet& u, const GroundFunction& f) {
    if (auto v = selector_violation(u, PartitionSpec::pullback(f))) throw SelectorPreconditionError(*v);

    QPointSplit out;
    const auto img = image(f, u);
    out.enumeration.assign(img.begin(), img.end());
    std::vector<Nat> even_vals, odd_vals;
    for (std::size_t i = 0; i < img.size(); ++i) (i % 2 ? odd_vals : even_vals).push_back(img[i]);
    out.image0 = BoundedSet(even_vals, img.universe_bound());
    out.image1 = BoundedSet(odd_vals, img.universe_bound());

    std::vector<Nat> u0, u1;
    for (Nat x : u) (out.image0.contains(f(x)) ? u0 : u1).push_back(x);
    out.u0 = BoundedSet(u0, u.universe_bound());
    out.u1 = BoundedSet(u1, u.universe_bound());

    out.image0_free = is_3ap_free(out.image0);
    out.image1_free = is_3ap_free(out.image1);
    if (!out.image0_free || !out.image1_free)
        throw std::logic_error("selector split produced an image with a 3-AP");
    return out;
}

// ---------------------------------------------------------------------------
// Stage runs

std::string to_string(StageBranch b) {
    switch (b) {
        case StageBranch::ExistingGenerator: return "existing-generator";
        case StageBranch::PreprocessingK: return "preprocessing-K";
        case StageBranch::DenseExtension: return "dense-extension";
    }
    return "?";
}

std::string to_string(ScheduleScope s) {
    switch (s) {
        case ScheduleScope::Seed: return "seed";
        case ScheduleScope::Generators: return "generators";
        case ScheduleScope::Meets: return "meets";
    }
    return "?";
}

StageFailure::StageFailure(const std::string& what, std::vector<StageLog> completed)
    : Error(what), completed_(std::move(completed)) {}

bool WNotQRun::pass() const {
    return all_pass(final_checks) &&
           std::all_of(stages.begin(), stages.end(), [](const StageLog& s) { return s.pass(); });
}

bool RapidRun::pass() const {
    return std::all_of(stages.begin(), stages.end(), [](const StageLog& s) { return s.pass(); });
}

namespace {

std::vector<DenseSetSpec> stage_schedule(const FilterBase& base, std::size_t seed_count,
                                         ScheduleScope scope, std::size_t arity,
                                         const std::vector<Nat>& ks, PosetTag flavor) {
    std::vector<IndexSet> targets;
    switch (scope) {
        case ScheduleScope::Seed:
            for (std::size_t i = 0; i < seed_count; ++i) targets.push_back({i});
            break;
        case ScheduleScope::Generators:
            for (std::size_t i = 0; i < base.size(); ++i) targets.push_back({i});
            break;
        case ScheduleScope::Meets:
            targets = base.index_sets(arity);
            break;
    }
    std::vector<DenseSetSpec> out;
    for (Nat k : ks)
        for (const auto& t : targets) out.push_back({t, k, flavor});
    return out;
}

std::optional<IndexSet> free_image_meet(const FilterBase& base, const GroundFunction& f,
                                        std::size_t arity) {
    for (const auto& idx : base.index_sets(arity)) {
        BoundedSet m;
        try {
            m = base.meet(idx);
        } catch (const CentrednessViolation&) {
            continue;
        }
        if (is_3ap_free(image(f, m))) return idx;
    }
    return std::nullopt;
}

std::optional<IndexSet> light_image_meet(const FilterBase& base, const GroundFunction& f,
                                         const WeightFunction& g, const Rational& cap,
                                         std::size_t arity) {
    for (const auto& idx : base.index_sets(arity)) {
        std::optional<LazySet> m;
        try {
            m = base.meet_view(idx);
        } catch (const CentrednessViolation&) {
            continue;
        }
        Rational sum(0);
        for_each_image_value(f, *m, [&](Nat v) {
            sum += g(v);
            return sum <= cap;
        });
        if (sum <= cap) return idx;
    }
    return std::nullopt;
}

Check centred_check(const FilterBase& base, std::size_t arity) {
    const auto rep = base.check_centred(arity);
    std::string detail = "nonempty meets of arity <= " + std::to_string(arity) + ": " +
                         std::to_string(rep.meets_checked);
    if (rep.violation) detail = "meet " + indices_label(*rep.violation) + " is empty";
    return {"centred", rep.centred, detail};
}

Check growth_check(const StageLog& log) {
    const bool ok = log.generators_after <= log.generators_before + 1;
    return {"generator-growth", ok,
            std::to_string(log.generators_before) + " -> " + std::to_string(log.generators_after)};
}

std::vector<std::string> labels_of(const FilterBase& base) {
    std::vector<std::string> out;
    for (const auto& g : base.generators()) out.push_back(g.label());
    return out;
}

}  // namespace

WNotQRun run_w_not_q(const std::vector<GroundFunction>& functions, const std::vector<Nat>& ks,
                     const WNotQOptions& options) {
    validate_ks(ks);
    const Nat bound = options.universe_bound;
    WNotQRun out;
    out.universe_bound = bound;
    out.ks = ks;

    FilterBase base = FilterBase::frechet(bound, options.seed_tails);
    const std::size_t seed_count = base.size();

    for (std::size_t i = 0; i < functions.size(); ++i) {
        const auto& f = functions[i];
        if (f.universe_bound() != bound)
            throw std::invalid_argument("stage function universe differs from the scenario");
        StageLog log;
        log.index = i;
        log.function = f.name();
        log.generators_before = base.size();

        if (auto idx = free_image_meet(base, f, options.arity_cap)) {
            log.branch = StageBranch::ExistingGenerator;
            log.existing_meet = *idx;
        } else {
            log.branch = StageBranch::DenseExtension;
            GenericSetup setup{PosetTag::W, base, f, std::nullopt};
            const auto schedule =
                stage_schedule(base, seed_count, options.scope, options.arity_cap, ks, PosetTag::W);
            GenericRun run;
            try {
                run = run_generic(Condition{BoundedSet(bound), PosetTag::W}, schedule, setup);
            } catch (const GenericRunError& e) {
                throw StageFailure("stage " + std::to_string(i) + " (" + f.name() + "): " + e.what(),
                                   out.stages);
            }
            const std::string label = "G" + std::to_string(i);
            base.add(LazySet(run.union_set).with_label(label));
            log.generator_label = label;
            log.generator_elements = run.union_set;
            log.checks.push_back({"generic-run", run.pass(), "union re-verified"});
            log.checks.push_back({"added-image-3ap-free", is_3ap_free(image(f, run.union_set)),
                                  "|G| = " + std::to_string(run.union_set.size())});
            log.run = std::move(run);
        }
        log.generators_after = base.size();

        const auto witness = free_image_meet(base, f, options.arity_cap);
        log.checks.push_back({"vi", witness.has_value(),
                              witness ? "meet " + indices_label(*witness) + " has 3-AP-free image"
                                      : "no meet has a 3-AP-free image"});
        bool spade_ok = true;
        for (const auto& g : base.generators()) {
            log.spade.push_back(spade_check(g, ks));
            spade_ok = spade_ok && log.spade.back().pass();
        }
        log.checks.push_back({"v", spade_ok, "spade per generator up to k = " + std::to_string(max_k(ks))});
        log.checks.push_back(centred_check(base, options.arity_cap));
        log.checks.push_back(growth_check(log));
        out.stages.push_back(std::move(log));
    }

    out.generators = labels_of(base);
    bool no_selector = true;
    std::string selector_detail = "every generator has two points in one dyadic block";
    for (const auto& g : base.generators()) {
        if (is_selector(g.materialize(), PartitionSpec::dyadic(bound))) {
            no_selector = false;
            selector_detail = g.label() + " is a dyadic selector";
            break;
        }
    }
    out.final_checks.push_back({"not-q-point", no_selector, selector_detail});

    if (options.test_set) {
        DichotomyOptions dopt;
        dopt.arity_cap = options.scope == ScheduleScope::Meets ? options.arity_cap : 1;
        // Without an explicit cap, step down to the largest cap the universe can certify.
        Nat k_cap = options.dichotomy_k_cap.value_or(max_k(ks));
        const Nat floor = options.dichotomy_k_cap ? k_cap : 1;
        for (;; --k_cap) {
            try {
                out.dichotomy = spade_dichotomy(base, *options.test_set, k_cap, dopt);
                out.final_checks.push_back({"dichotomy", true,
                                            "branch " + to_string(out.dichotomy->branch) +
                                                " up to k = " + std::to_string(k_cap)});
                break;
            } catch (const InconclusiveDichotomy& e) {
                if (k_cap > floor) continue;
                out.dichotomy = e.partial();
                out.final_checks.push_back({"dichotomy", false, e.what()});
                break;
            }
        }
    }
    return out;
}

namespace {

std::optional<BoundedSet> preprocessing_search(const FilterBase& base, const GroundFunction& f,
                                               const WeightFunction& g, const Rational& cap,
                                               const std::vector<Nat>& ks,
                                               const RapidOptions& options, std::size_t& tried) {
    const Nat kmax = max_k(ks);
    const Nat bound = base.universe_bound();
    std::vector<Nat> eligible;
    const Nat vmax = std::min(options.preprocessing_value_bound, f.codomain_bound());
    for (Nat v = 0; v < vmax; ++v)
        if (f.fiber_size(v) > kmax) eligible.push_back(v);

    const auto meets = base.index_sets(options.arity_cap);
    for (std::size_t size = 1; size <= options.preprocessing_max_size; ++size) {
        for (std::size_t start = 0; start + size <= eligible.size(); ++start) {
            ++tried;
            std::vector<Nat> vals(eligible.begin() + start, eligible.begin() + start + size);
            Rational w(0);
            for (Nat v : vals) w += g(v);
            if (w > cap) continue;
            BoundedSet k_set(vals, f.codomain_bound());
            const auto pre = LazySet::preimage(f, k_set);
            bool ok = true;
            for (const auto& idx : meets) {
                const auto m = LazySet::intersection({base.meet_view(idx), pre});
                if (!least_ap(m, kmax, 0, bound)) {
                    ok = false;
                    break;
                }
            }
            if (ok) return k_set;
        }
    }
    return std::nullopt;
}

}  // namespace

RapidRun run_rapid_no_w(const std::vector<std::pair<GroundFunction, WeightFunction>>& pairs,
                        const std::vector<Nat>& ks, const RapidOptions& options) {
    validate_ks(ks);
    const Nat bound = options.universe_bound;
    RapidRun out;
    out.universe_bound = bound;
    out.ks = ks;

    std::vector<LazySet> seed = options.seed;
    if (seed.empty()) seed.push_back(LazySet::full(bound));
    FilterBase base(seed, bound);
    const std::size_t seed_count = base.size();
    const Nat kmax = max_k(ks);

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [f, g] = pairs[i];
        if (f.universe_bound() != bound)
            throw std::invalid_argument("stage function universe differs from the scenario");
        StageLog log;
        log.index = i;
        log.function = f.name();
        log.weight = g.name();
        log.generators_before = base.size();
        const Rational cap = Rational(2) * g.max_value(f.codomain_bound());
        log.budget_cap = cap;

        if (auto idx = light_image_meet(base, f, g, cap, options.arity_cap)) {
            log.branch = StageBranch::ExistingGenerator;
            log.existing_meet = *idx;
        } else if (auto k_set = preprocessing_search(base, f, g, cap, ks, options,
                                                     log.preprocessing_candidates)) {
            log.branch = StageBranch::PreprocessingK;
            log.preprocessing_k = *k_set;
            auto pre = LazySet::preimage(f, *k_set);
            log.generator_label = pre.label();
            base.add(pre);
            log.checks.push_back({"added-weight", weight_sum(*k_set, g) <= cap,
                                  "weight of K = " + to_string(weight_sum(*k_set, g))});
        } else {
            log.branch = StageBranch::DenseExtension;
            GenericSetup setup{PosetTag::G, base, f, g};
            const auto schedule =
                stage_schedule(base, seed_count, options.scope, options.arity_cap, ks, PosetTag::G);
            GenericRun run;
            try {
                run = run_generic(Condition{BoundedSet(bound), PosetTag::G}, schedule, setup);
            } catch (const GenericRunError& e) {
                throw StageFailure("stage " + std::to_string(i) + " (" + f.name() + ", " +
                                       g.name() + "): " + e.what(),
                                   out.stages);
            }
            const std::string label = "G" + std::to_string(i);
            base.add(LazySet(run.union_set).with_label(label));
            log.generator_label = label;
            log.generator_elements = run.union_set;
            log.checks.push_back({"generic-run", run.pass(), "union re-verified"});
            log.run = std::move(run);
        }
        log.generators_after = base.size();

        std::string v_detail = "every meet of arity <= " + std::to_string(options.arity_cap) +
                               " holds a " + std::to_string(kmax) + "-AP";
        bool v_ok = true;
        for (const auto& idx : base.index_sets(options.arity_cap)) {
            if (!least_ap(base.meet_view(idx), kmax, 0, bound)) {
                v_ok = false;
                v_detail = "meet " + indices_label(idx) + " has no " + std::to_string(kmax) + "-AP";
                break;
            }
        }
        log.checks.push_back({"v", v_ok, v_detail});
        const auto light = light_image_meet(base, f, g, cap, options.arity_cap);
        log.checks.push_back({"vi", light.has_value(),
                              light ? "meet " + indices_label(*light) + " has image weight <= " +
                                          to_string(cap)
                                    : "no meet has image weight <= " + to_string(cap)});
        log.checks.push_back(centred_check(base, options.arity_cap));
        log.checks.push_back(growth_check(log));
        out.stages.push_back(std::move(log));
    }
    out.generators = labels_of(base);
    return out;
}

DominationReport rapid_domination_probe(const BoundedSet& g_set, const GroundFunction& f_target) {
    if (g_set.empty()) throw std::invalid_argument("domination probe needs a nonempty set");
    DominationReport rep;
    rep.size = g_set.size();
    for (std::size_t i = g_set.size(); i-- > 0;) {
        if (g_set[i] < f_target(i)) {
            rep.last_violation = i;
            break;
        }
    }
    const Nat t = rep.last_violation ? *rep.last_violation + 1 : 0;
    if (t < rep.size) rep.threshold = t;
    return rep;
}

}  // namespace apforce
