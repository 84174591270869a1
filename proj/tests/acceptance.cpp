// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "apforce/cli.hpp"
#include "apforce/construction.hpp"
#include "apforce/scenario.hpp"
#include "apforce/trace_json.hpp"
#include "oracles.hpp"

using namespace apforce;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

std::vector<Nat> vec(const BoundedSet& s) { return {s.begin(), s.end()}; }

GroundFunction ground(int which, Nat bound) {
    switch (which % 3) {
        case 0: return GroundFunction::identity(bound);
        case 1: return GroundFunction::block_collapse(bound);
        default: return GroundFunction::halving(bound);
    }
}

LazySet random_dense(std::mt19937_64& rng, Nat bound, double p) {
    std::bernoulli_distribution keep(p);
    std::vector<Nat> v;
    for (Nat x = 0; x < bound; ++x)
        if (keep(rng)) v.push_back(x);
    return LazySet(BoundedSet(std::move(v), bound)).with_label("random");
}

/// Sets whose blocks carry many distinct values, so both W cases stay in reach.
LazySet w_family(std::mt19937_64& rng, Nat bound) {
    switch (rng() % 6) {
        case 0: return LazySet::full(bound);
        case 1: return LazySet::cofinite_tail(rng() % 1024, bound);
        case 2: return LazySet::multiples(1 + rng() % 3, bound);
        case 3: {
            const Nat m = 2 + rng() % 3;
            return LazySet::residue(m, rng() % m, bound);
        }
        case 4: return random_dense(rng, bound, 0.3 + 0.7 * std::uniform_real_distribution<>(0, 1)(rng));
        default: return LazySet::intersection({LazySet::multiples(2, bound), LazySet::cofinite_tail(rng() % 512, bound)});
    }
}

/// Each identity step climbs two or three blocks, so the least element must stay low.
LazySet w_run_family(std::mt19937_64& rng, Nat bound) {
    switch (rng() % 5) {
        case 0: return LazySet::full(bound);
        case 1: return LazySet::cofinite_tail(rng() % 64, bound);
        case 2: return LazySet::multiples(1 + rng() % 2, bound);
        case 3: return LazySet::residue(2, 1, bound);
        default: return random_dense(rng, bound, 0.5 + 0.5 * std::uniform_real_distribution<>(0, 1)(rng));
    }
}

/// Sets with small least element and long progressions high up.
LazySet g_family(std::mt19937_64& rng, Nat bound, bool allow_sparse) {
    switch (rng() % (allow_sparse ? 6 : 5)) {
        case 0: return LazySet::full(bound);
        case 1: return LazySet::multiples(1 + rng() % 9, bound);
        case 2: {
            const Nat m = 2 + rng() % 6;
            return LazySet::residue(m, rng() % std::min<Nat>(m, 4), bound);
        }
        case 3: return LazySet::cofinite_tail(rng() % 4, bound);
        case 4: return LazySet::residue(2, 0, bound);
        default: return LazySet::ap_rich(1 + rng() % 3, bound);
    }
}

/// A random condition below `below`: drawn points are kept while the image stays 3-AP-free.
BoundedSet random_w_condition(std::mt19937_64& rng, const GroundFunction& f, const LazySet& f_set,
                              Nat below, std::size_t max_size) {
    BoundedSet l(f.universe_bound());
    const std::size_t want = rng() % (max_size + 1);
    for (int tries = 0; tries < 20 && l.size() < want; ++tries) {
        const Nat x = rng() % below;
        if (!f_set.contains(x) || (!l.empty() && x <= l.max())) continue;
        auto cand = l.unite(BoundedSet({x}, f.universe_bound()));
        if (is_condition_w(cand, f)) l = cand;
    }
    return l;
}

// 1 ------------------------------------------------------------------------

Verdict criterion1() {
    Verdict v;
    std::mt19937_64 rng(1001);
    for (int trial = 0; trial < 500 && v.pass; ++trial) {
        const auto s = oracle::random_subset(rng, Nat{1} << 16, rng() % 41);
        const auto got = longest_ap(BoundedSet(s, Nat{1} << 16));
        const auto want = oracle::longest_ap(s);
        if (got.length != want.length) v.fail("set " + std::to_string(trial) + ": length mismatch");
        if (want.length > 0 && (got.witness->start != want.start || got.witness->step != want.step))
            v.fail("set " + std::to_string(trial) + ": witness mismatch");
    }
    // Structured sets exercise long progressions, not just pairs.
    for (int trial = 0; trial < 100 && v.pass; ++trial) {
        std::vector<Nat> s;
        const Nat a = rng() % 1000, d = 1 + rng() % 50, n = 3 + rng() % 20;
        for (Nat i = 0; i < n; ++i) s.push_back(a + i * d);
        for (auto x : oracle::random_subset(rng, 2048, rng() % (41 - n))) s.push_back(x);
        const auto bs = BoundedSet::from_unsorted(s, Nat{1} << 16);
        const auto want = oracle::longest_ap(vec(bs));
        if (longest_ap(bs).length != want.length) v.fail("structured set length mismatch");
    }
    v.detail = v.pass ? "600 sets agree with the cubic oracle" : v.detail;
    return v;
}

// 2 ------------------------------------------------------------------------

Verdict criterion2() {
    Verdict v;
    std::mt19937_64 rng(1002);
    const Nat bound = Nat{1} << 16;
    std::size_t case1 = 0, case2 = 0, excl = 0;
    for (int trial = 0; trial < 1000 && v.pass; ++trial) {
        const auto f = ground(trial, bound);
        const LazySet fl = w_family(rng, bound);
        const BoundedSet f_set = fl.materialize();
        const Nat k = 1 + rng() % 6;
        const Nat below = f.kind() == GroundFunction::Kind::BlockCollapse ? 32 : 256;
        const auto l = random_w_condition(rng, f, fl, below, 3);
        const std::string tag = "instance " + std::to_string(trial) + " (" + f.name() + ", " + fl.label() +
                                ", k = " + std::to_string(k) + ", L = " + l.to_string() + ")";
        try {
            const auto ext = extend_w(Condition{l, PosetTag::W}, f_set, f, k);
            const auto& kset = ext.condition.set;
            (ext.trace.case_taken == ExtensionCase::WCaseI ? case1 : case2)++;
            if (!extends(kset, l)) v.fail(tag + ": K does not extend L");
            if (!is_condition_w(kset, f) || oracle::has_3ap(vec(image(f, kset))))
                v.fail(tag + ": image of K has a 3-AP");
            if (!meets_dense_w(kset, f_set, k) ||
                !oracle::first_block_with(oracle::intersect(vec(kset), vec(f_set.restrict_to(0, kset.max() + 1))),
                                          k, block_count(bound)))
                v.fail(tag + ": K misses D(F,k)");
            for (const auto& e : ext.trace.exclusions) {
                ++excl;
                const Nat n = l.size() + e.i;
                if (2 * e.excluded.size() > n * (n - 1)) v.fail(tag + ": |A_i| above the bound");
            }
        } catch (const std::exception& e) {
            v.fail(tag + ": " + e.what());
        }
    }
    if (v.pass)
        v.detail = "1000 extensions valid (case I " + std::to_string(case1) + ", case II " + std::to_string(case2) +
                   ", " + std::to_string(excl) + " exclusion sets within bound)";
    return v;
}

// 3 ------------------------------------------------------------------------

Verdict criterion3() {
    Verdict v;
    std::mt19937_64 rng(1003);
    const Nat bound = Nat{1} << 40;
    std::size_t runs = 0;
    for (int trial = 0; trial < 1000 && v.pass; ++trial) {
        const bool recip = trial % 2 == 0;
        const auto g = recip ? WeightFunction::reciprocal() : WeightFunction::inverse_sqrt();
        const auto gfun = recip ? oracle::reciprocal : oracle::inverse_sqrt;
        // Halving halves the reachable values, which only the reciprocal weight can afford.
        const auto f = recip && trial % 4 == 2 ? GroundFunction::halving(bound) : GroundFunction::identity(bound);
        const LazySet fl = g_family(rng, bound, recip);
        const Nat k = 1 + rng() % 6;

        BoundedSet l(bound);
        for (int tries = 0; tries < 4; ++tries) {
            const auto x = fl.successor(rng() % 1024);
            if (!x || (!l.empty() && *x <= l.max())) continue;
            auto cand = l.unite(BoundedSet({*x}, bound));
            if (is_condition_g(cand, f, g)) l = cand;
        }
        const std::string tag = "instance " + std::to_string(trial) + " (" + g.name() + ", " + f.name() + ", " +
                                fl.label() + ", k = " + std::to_string(k) + ", L = " + l.to_string() + ")";
        try {
            const auto ext = extend_g(Condition{l, PosetTag::G}, fl, f, g, k);
            const auto& kset = ext.condition.set;
            const auto img = vec(image(f, kset));
            mpq_class mx = 0;
            for (Nat x : img) mx = std::max(mx, gfun(x));
            const mpq_class budget = (mpq_class(2) - mpq_class(1, 1UL << kset.size())) * mx;
            if (!extends(kset, l)) v.fail(tag + ": K does not extend L");
            if (!(oracle::weight_sum(img, gfun) <= budget)) v.fail(tag + ": budget exceeded");
            if (!meets_dense_g(kset, fl, k)) v.fail(tag + ": K misses D(F,k)");

            GenericSetup setup{PosetTag::G, FilterBase({fl}, bound), f, g};
            std::vector<DenseSetSpec> sched;
            for (Nat j = 1; j <= 6; ++j) sched.push_back({{0}, j, PosetTag::G});
            const auto run = run_generic(Condition{BoundedSet(bound), PosetTag::G}, sched, setup);
            ++runs;
            const auto gimg = vec(image(f, run.union_set));
            if (!(oracle::weight_sum(gimg, gfun) <= 2 * gfun(0))) v.fail(tag + ": union weight above 2 max g");
            if (!run.pass()) v.fail(tag + ": run checks failed");
        } catch (const std::exception& e) {
            v.fail(tag + ": " + e.what());
        }
    }
    if (v.pass)
        v.detail = "1000 extensions within the exact budget, " + std::to_string(runs) +
                   " runs with ks 1..6 below 2 max g";
    return v;
}

// 4 ------------------------------------------------------------------------

Verdict criterion4() {
    Verdict v;
    std::mt19937_64 rng(1004);
    const Nat bound = Nat{1} << 20;
    for (int trial = 0; trial < 200 && v.pass; ++trial) {
        const auto f = trial % 2 ? GroundFunction::halving(bound) : GroundFunction::identity(bound);
        std::vector<LazySet> gens{w_run_family(rng, bound)};
        if (rng() % 2) gens.push_back(LazySet::cofinite_tail(rng() % 16, bound));
        const FilterBase base(gens, bound);
        IndexSet all;
        for (std::size_t i = 0; i < gens.size(); ++i) all.push_back(i);
        std::vector<DenseSetSpec> sched;
        for (Nat k = 1; k <= 5; ++k) sched.push_back({all, k, PosetTag::W});
        const std::string tag = "run " + std::to_string(trial) + " (" + f.name() + ", " + gens[0].label() + ")";
        try {
            const auto run = run_generic(Condition{BoundedSet(bound), PosetTag::W}, sched,
                                         GenericSetup{PosetTag::W, base, f, std::nullopt});
            if (oracle::has_3ap(vec(image(f, run.union_set)))) v.fail(tag + ": image of G has a 3-AP");
            const auto gf = oracle::intersect(vec(run.union_set), vec(base.meet(all)));
            for (const auto& step : run.steps) {
                if (!step.witness_block) {
                    v.fail(tag + ": missing witness block");
                    break;
                }
                if (oracle::block_count(gf, *step.witness_block) < step.spec.k) v.fail(tag + ": witness block too thin");
            }
        } catch (const std::exception& e) {
            v.fail(tag + ": " + e.what());
        }
    }
    if (v.pass) v.detail = "200 runs: f[G] 3-AP-free, every (F,k) has a verified block";
    return v;
}

// 5 ------------------------------------------------------------------------

Verdict criterion5() {
    Verdict v;
    std::mt19937_64 rng(1005);
    const Nat bound = Nat{1} << 12;
    const auto id = GroundFunction::identity(bound);
    for (int trial = 0; trial < 500 && v.pass; ++trial) {
        std::vector<Nat> u;
        for (Nat n = 0; n < 12; ++n) {
            if (rng() % 4 == 0) continue;
            const auto b = block(n);
            u.push_back(b.lo + rng() % b.size());
        }
        if (!oracle::is_block_selector(u)) {
            v.fail("generator produced a non-selector");
            break;
        }
        try {
            const auto q = qpoint_witness_split(BoundedSet(u, bound), id);
            if (oracle::has_3ap(vec(q.image0)) || oracle::has_3ap(vec(q.image1)))
                v.fail("selector " + std::to_string(trial) + ": an image has a 3-AP");
        } catch (const std::exception& e) {
            v.fail(e.what());
        }
    }
    std::size_t triples = 0;
    for (Nat a = 0; a < 256; ++a)
        for (Nat b = a + 1; b < 256; ++b)
            for (Nat c = b + 1; c < 256; ++c) {
                if (c <= 2 * b) continue;
                ++triples;
                if (c - b == b - a) v.fail("growth lemma fails at " + std::to_string(a));
            }
    if (v.pass) v.detail = "500 selectors split cleanly, growth lemma holds on " + std::to_string(triples) + " triples";
    return v;
}

// 6 ------------------------------------------------------------------------

LazySet test_set(std::mt19937_64& rng, Nat bound) {
    switch (rng() % 8) {
        case 0: return LazySet::residue(2, rng() % 2, bound);
        case 1: return LazySet::multiples(2 + rng() % 5, bound);
        case 2: return LazySet::interval(0, 1 + rng() % 2048, bound);
        case 3: return LazySet::cofinite_tail(rng() % bound, bound);
        case 4: return random_dense(rng, bound, std::uniform_real_distribution<>(0, 1)(rng));
        case 5: return LazySet(BoundedSet::from_unsorted(oracle::random_subset(rng, bound, rng() % 64), bound));
        case 6: {
            std::vector<Nat> v;
            for (Nat n = 0; n < block_count(bound); ++n) {
                if (rng() % 2) continue;
                const auto b = block(n);
                for (Nat x = b.lo; x < b.hi; ++x) v.push_back(x);
            }
            return LazySet(BoundedSet(std::move(v), bound));
        }
        default: return LazySet(BoundedSet(bound));
    }
}

Verdict criterion6() {
    Verdict v;
    std::mt19937_64 rng(1006);
    const Nat bound = Nat{1} << 14;
    std::size_t with_a = 0, with_c = 0;
    for (int trial = 0; trial < 300 && v.pass; ++trial) {
        std::vector<LazySet> gens{LazySet::full(bound)};
        if (rng() % 2) gens.push_back(LazySet::multiples(1 + rng() % 4, bound));
        if (rng() % 2) gens.push_back(LazySet::cofinite_tail(rng() % 4096, bound));
        if (rng() % 3 == 0) gens.push_back(random_dense(rng, bound, 0.5));
        const FilterBase base(gens, bound);
        const LazySet a = test_set(rng, bound);
        const DichotomyOptions opt;
        std::vector<Nat> ks{1, 2, 3, 4, 5, 6, 7, 8};
        bool spade = true;
        for (const auto& idx : base.index_sets(opt.arity_cap)) spade = spade && spade_check(base.meet_view(idx), ks).pass();
        const std::string tag = "pair " + std::to_string(trial);
        if (!spade) {
            v.fail(tag + ": generated base fails spade");
            break;
        }
        try {
            const auto d = spade_dichotomy(base, a, 8, opt);
            const auto av = a.materialize();
            for (const auto& row : d.rows) {
                if (!row.block) {
                    v.fail(tag + ": row without a block");
                    break;
                }
                const auto b = block(*row.block);
                const auto f = vec(base.meet(row.meet).restrict_to(b.lo, b.hi));
                const auto fa = oracle::intersect(f, vec(av));
                if (d.branch == DichotomyBranch::WithA) {
                    if (fa.size() < row.k || *row.block < d.horizon) v.fail(tag + ": with-A row fails recount");
                } else {
                    IndexSet both = row.meet;
                    both.insert(both.end(), d.f0->begin(), d.f0->end());
                    const auto ff0 = vec(base.meet(both).restrict_to(b.lo, b.hi));
                    const Nat in_a = oracle::intersect(ff0, vec(av)).size();
                    const Nat comp = f.size() - fa.size();
                    const bool premise = ff0.size() >= row.k + *d.k0 && in_a < *d.k0;
                    if (!premise) v.fail(tag + ": complement premise fails recount");
                    if (premise && comp < row.k) v.fail(tag + ": subtraction inequality fails");
                    // F ∩ F0 ⊆ F, so the complement count is at least |F∩F0| − |F∩F0∩A|.
                    if (ff0.size() - in_a < row.k) v.fail(tag + ": block arithmetic fails");
                }
            }
            (d.branch == DichotomyBranch::WithA ? with_a : with_c)++;
        } catch (const std::exception& e) {
            v.fail(tag + ": " + e.what());
        }
    }
    if (v.pass)
        v.detail = "300 pairs: " + std::to_string(with_a) + " with-A, " + std::to_string(with_c) +
                   " with-complement, all rows recounted";
    return v;
}

// 7 ------------------------------------------------------------------------

bool stage_green(const json_io::Json& stage, std::string& why) {
    bool saw_v = false, saw_vi = false;
    for (const auto& [name, c] : stage["checks"].items()) {
        saw_v = saw_v || name == "v";
        saw_vi = saw_vi || name == "vi";
        if (!c["pass"].get<bool>()) {
            why = "stage " + std::to_string(stage["index"].get<int>()) + " check " + name + " fails";
            return false;
        }
    }
    if (!saw_v || !saw_vi) why = "stage lacks condition (v) or (vi)";
    return saw_v && saw_vi;
}

Verdict criterion7() {
    Verdict v;
    const auto w_sc = json_io::Json::parse(R"({"mode": "w-not-q", "universe_bound": 1048576, "ks": "1..4",
        "stages": ["identity", "block-collapse", "halving"]})");
    const auto r_sc = json_io::Json::parse(R"({"mode": "rapid-no-w", "universe_bound": 1048576, "ks": "1..5",
        "stages": [{"f": "identity", "g": "reciprocal"}, {"f": "block-collapse", "g": "inverse-sqrt"}]})");
    std::size_t stages = 0;
    for (const auto& sc : {w_sc, r_sc}) {
        const auto first = cli::run_construct(sc);
        const auto second = cli::run_construct(sc);
        const auto mode = sc["mode"].get<std::string>();
        if (first.code != 0) v.fail(mode + " run exited " + std::to_string(first.code));
        if (!first.doc.contains("result")) continue;
        const auto& st = first.doc["result"]["stages"];
        if (st.size() != sc["stages"].size()) v.fail(mode + ": stage count");
        for (const auto& s : st) {
            std::string why;
            if (!stage_green(s, why)) v.fail(mode + ": " + why);
            ++stages;
        }
        if (json_io::render(first.doc) != json_io::render(second.doc)) v.fail(mode + ": rerun differs");
        const auto replayed = cli::replay(json_io::Json::parse(json_io::render(first.doc)));
        if (json_io::render(replayed.doc) != json_io::render(first.doc)) v.fail(mode + ": replay differs");
    }
    if (v.pass) v.detail = std::to_string(stages) + " stages green, reruns byte-identical";
    return v;
}

// 8 ------------------------------------------------------------------------

Verdict criterion8() {
    Verdict v;
    const std::string dir = APFORCE_GOLDEN_DIR;
    struct Golden {
        const char* file;
        std::vector<std::string> args;
        std::vector<Nat> k;
    };
    const std::vector<Golden> goldens{
        {"extend_w_case_i.json",
         {"extend", "--flavor", "w", "--L", "2", "--F", "full", "--f", "block-collapse", "--k", "3", "--universe", "64"},
         {2, 16, 17, 18}},
        {"extend_w_case_ii.json",
         {"extend", "--flavor", "w", "--L", "1,2", "--F", "full", "--f", "identity", "--k", "2", "--universe", "64"},
         {1, 2, 32, 33}},
        {"extend_g.json",
         {"extend", "--flavor", "g", "--L", "0", "--F", "multiples:5", "--f", "identity", "--g", "reciprocal", "--k",
          "2", "--universe", "1024"},
         {0, 10, 15}},
    };
    for (const auto& g : goldens) {
        std::ostringstream out, err;
        const int code = cli::run(g.args, out, err);
        std::string golden;
        try {
            golden = read_file(dir + "/" + g.file);
        } catch (const std::exception& e) {
            v.fail(e.what());
            continue;
        }
        if (code != 0) v.fail(std::string(g.file) + ": exit " + std::to_string(code));
        if (out.str() != golden) v.fail(std::string(g.file) + ": output differs from golden bytes");
        if (json_io::Json::parse(golden)["K"].get<std::vector<Nat>>() != g.k) v.fail(std::string(g.file) + ": K");
    }
    if (v.pass) v.detail = "3 golden traces reproduced bit-exactly";
    return v;
}

}  // namespace

int main() {
    const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8};
    const std::vector<double> limits{5, 30, 0, 0, 0, 0, 0, 0};
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v = criteria[i]();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (limits[i] > 0 && secs >= limits[i]) v.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(limits[i]));
        all = all && v.pass;
        std::ostringstream line;
        line.precision(2);
        line << std::fixed << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << v.detail << " [" << secs
             << " s]";
        std::cout << line.str() << std::endl;
    }
    return all ? 0 : 1;
}
