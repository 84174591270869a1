#pragma once

// Higher-level procedures: property (♠), the A-or-complement dichotomy for
// extending a (♠) base, the selector split behind "W-ultrafilters are not
// Q-points", and finite-stage runs of the two ultrafilter constructions.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "apforce/dense.hpp"

namespace apforce {

struct SpadeRow {
    Nat k = 0;
    std::optional<Nat> block;  // least n with |F ∩ I_n| >= k
    Nat count = 0;             // |F ∩ I_n| at that block
};

struct SpadeReport {
    std::string label;
    Nat universe_bound = 0;
    std::vector<SpadeRow> rows;

    bool pass() const;
};

SpadeReport spade_check(const LazySet& f_set, const std::vector<Nat>& ks);

enum class DichotomyBranch { WithA, WithComplement };
std::string to_string(DichotomyBranch b);

struct DichotomyOptions {
    /// Meets of at most this many generators stand in for members of the base.
    std::size_t arity_cap = 2;
    /// A block witness for the with-A branch must sit at or above this index,
    /// so that finitely many low blocks cannot fake unboundedness. Defaults to
    /// half the number of blocks in the universe.
    std::optional<Nat> horizon;
};

struct DichotomyRow {
    IndexSet meet;
    Nat k = 0;
    std::optional<Nat> block;
    Nat count = 0;             // with-A: |F ∩ A ∩ I_n|;  with-complement: |F ∩ F0 ∩ I_n|
    Nat count_in_a = 0;        // with-complement: |F ∩ F0 ∩ A ∩ I_n|
    Nat count_complement = 0;  // with-complement: |F ∩ (ω∖A) ∩ I_n|
};

struct DichotomyResult {
    DichotomyBranch branch = DichotomyBranch::WithA;
    Nat universe_bound = 0;
    Nat k_cap = 0;
    Nat horizon = 0;
    std::size_t arity_cap = 0;
    std::vector<DichotomyRow> rows;
    std::optional<IndexSet> f0;
    std::optional<Nat> failing_k;
    std::optional<Nat> k0;
};

class InconclusiveDichotomy : public Error {
public:
    InconclusiveDichotomy(const std::string& what, DichotomyResult partial);
    const DichotomyResult& partial() const { return partial_; }

private:
    DichotomyResult partial_;
};

DichotomyResult spade_dichotomy(const FilterBase& base, const LazySet& a, Nat k_cap,
                                const DichotomyOptions& options = {});

struct QPointSplit {
    std::vector<Nat> enumeration;  // f[U] increasing: u_0 < u_1 < ...
    BoundedSet u0, u1;
    BoundedSet image0, image1;
    bool image0_free = true;
    bool image1_free = true;
};

class SelectorPreconditionError : public Error {
public:
    SelectorPreconditionError(const SelectorViolation& v);
    const SelectorViolation& violation() const { return v_; }

private:
    SelectorViolation v_;
};

/// U meets every f^{-1}[I_n] at most once; the even- and odd-indexed parts of
/// its increasing image skip at least one block between consecutive terms, so
/// each term more than doubles the previous one and no 3-AP survives.
QPointSplit qpoint_witness_split(const BoundedSet& u, const GroundFunction& f);

enum class StageBranch { ExistingGenerator, PreprocessingK, DenseExtension };
std::string to_string(StageBranch b);

/// Which dense requirements a dense-extension stage schedules.
enum class ScheduleScope { Seed, Generators, Meets };
std::string to_string(ScheduleScope s);

struct StageLog {
    std::size_t index = 0;
    std::string function;
    std::optional<std::string> weight;
    StageBranch branch = StageBranch::ExistingGenerator;
    std::optional<IndexSet> existing_meet;
    std::optional<BoundedSet> preprocessing_k;
    std::size_t preprocessing_candidates = 0;
    std::optional<Rational> budget_cap;
    std::optional<std::string> generator_label;
    std::optional<BoundedSet> generator_elements;
    std::optional<GenericRun> run;
    std::size_t generators_before = 0;
    std::size_t generators_after = 0;
    std::vector<SpadeReport> spade;
    std::vector<Check> checks;

    bool pass() const { return all_pass(checks); }
};

class StageFailure : public Error {
public:
    StageFailure(const std::string& what, std::vector<StageLog> completed);
    const std::vector<StageLog>& completed() const { return completed_; }

private:
    std::vector<StageLog> completed_;
};

struct WNotQOptions {
    Nat universe_bound = Nat{1} << 14;
    std::vector<Nat> seed_tails{0};
    std::size_t arity_cap = 3;
    ScheduleScope scope = ScheduleScope::Seed;
    std::optional<LazySet> test_set;
    std::optional<Nat> dichotomy_k_cap;  // defaults to max ks
};

struct WNotQRun {
    Nat universe_bound = 0;
    std::vector<Nat> ks;
    std::vector<StageLog> stages;
    std::vector<std::string> generators;
    std::optional<DichotomyResult> dichotomy;
    std::vector<Check> final_checks;

    bool pass() const;
};

WNotQRun run_w_not_q(const std::vector<GroundFunction>& functions, const std::vector<Nat>& ks,
                     const WNotQOptions& options = {});

struct RapidOptions {
    Nat universe_bound = Nat{1} << 20;
    std::vector<LazySet> seed;  // empty: the full universe
    std::size_t arity_cap = 3;
    ScheduleScope scope = ScheduleScope::Meets;
    std::size_t preprocessing_max_size = 8;
    Nat preprocessing_value_bound = 64;
};

struct RapidRun {
    Nat universe_bound = 0;
    std::vector<Nat> ks;
    std::vector<StageLog> stages;
    std::vector<std::string> generators;

    bool pass() const;
};

RapidRun run_rapid_no_w(const std::vector<std::pair<GroundFunction, WeightFunction>>& pairs,
                        const std::vector<Nat>& ks, const RapidOptions& options = {});

struct DominationReport {
    Nat size = 0;
    std::optional<Nat> threshold;        // least t with e_G(i) >= f(i) for t <= i < |G|
    std::optional<Nat> last_violation;   // largest i with e_G(i) < f(i)
};

/// Desk probe only: a finite window cannot certify domination mod finite.
DominationReport rapid_domination_probe(const BoundedSet& g_set, const GroundFunction& f_target);

}  // namespace apforce
