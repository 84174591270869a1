#pragma once

// Extension algorithms for the dense sets D_{F,k} of both posets, and the
// generic-chain builder that folds them over a schedule.

#include <optional>
#include <string>
#include <vector>

#include "apforce/posets.hpp"

namespace apforce {

enum class ExtensionCase { WCaseI, WCaseII, G };

std::string to_string(ExtensionCase c);

struct BlockScan {
    Nat block = 0;
    Nat image_size = 0;  // |f[F ∩ I_n]|
};

/// One greedy step of W-case-II: the completions A_i excluded before l_i.
struct ExclusionStep {
    Nat i = 0;
    std::vector<Nat> excluded;
    Nat l = 0;
    Nat bound = 0;  // (|L|+i)(|L|+i-1)/2
};

struct ExtensionTrace {
    ExtensionCase case_taken = ExtensionCase::WCaseI;
    Nat universe_bound = 0;
    Nat k = 1;
    BoundedSet l_set;
    BoundedSet l_prime;
    BoundedSet k_set;
    std::optional<Nat> chosen_block;

    // W flavor
    Nat max_image_l = 0;
    Threshold n0 = -1;
    Threshold value_cutoff = -1;  // chosen values must exceed this; -1 means no cutoff
    Nat case_ii_threshold = 0;
    std::optional<Nat> m;
    std::optional<Nat> l;
    std::vector<BlockScan> scan;
    std::vector<ExclusionStep> exclusions;

    // G flavor
    std::optional<Threshold> threshold;  // n_L
    std::optional<Rational> weight_cutoff;
    std::optional<ArithmeticProgression> ap;
    bool bootstrap = false;
};

struct Extension {
    Condition condition;
    ExtensionTrace trace;
};

class ExtensionFailure : public Error {
public:
    ExtensionFailure(const std::string& what, std::vector<BlockScan> scan,
                     std::optional<Threshold> threshold = std::nullopt, Nat search_lo = 0,
                     Nat search_hi = 0);

    const std::vector<BlockScan>& scan() const { return scan_; }
    std::optional<Threshold> threshold() const { return threshold_; }
    Nat search_lo() const { return lo_; }
    Nat search_hi() const { return hi_; }

private:
    std::vector<BlockScan> scan_;
    std::optional<Threshold> threshold_;
    Nat lo_ = 0;
    Nat hi_ = 0;
};

Extension extend_w(const Condition& l, const BoundedSet& f_set, const GroundFunction& f, Nat k);
Extension extend_g(const Condition& l, const LazySet& f_set, const GroundFunction& f,
                   const WeightFunction& g, Nat k);

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

bool all_pass(const std::vector<Check>& checks);

struct GenericSetup {
    PosetTag flavor = PosetTag::W;
    FilterBase base;
    GroundFunction f;
    std::optional<WeightFunction> g;
};

struct GenericStep {
    DenseSetSpec spec;
    bool already_met = false;
    std::optional<ExtensionTrace> trace;
    std::optional<Nat> witness_block;                 // W
    std::optional<ArithmeticProgression> witness_ap;  // G
    std::vector<Nat> witness_points;                  // K ∩ F ∩ I_n, or the progression
};

struct GenericRun {
    PosetTag flavor = PosetTag::W;
    Nat universe_bound = 0;
    std::vector<DenseSetSpec> schedule;
    std::vector<BoundedSet> chain;
    std::vector<GenericStep> steps;
    BoundedSet union_set;
    std::vector<Check> checks;

    bool pass() const { return all_pass(checks); }
};

class GenericRunError : public Error {
public:
    GenericRunError(const std::string& what, GenericRun partial);
    const GenericRun& partial() const { return partial_; }

private:
    GenericRun partial_;
};

/// Specs ordered by k, ties keeping their given order.
std::vector<DenseSetSpec> sort_schedule(std::vector<DenseSetSpec> schedule);

/// Meets each spec in order, extending only when the current condition does
/// not already meet it. The chain starts with `start`.
GenericRun run_generic(const Condition& start, const std::vector<DenseSetSpec>& schedule,
                       const GenericSetup& setup, bool sort_by_k = true);

/// Recomputes the union checks of a finished run.
std::vector<Check> verify_generic(const GenericRun& run, const GenericSetup& setup);

}  // namespace apforce
