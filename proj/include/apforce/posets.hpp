#pragma once

// The two forcing posets: P_W (finite K whose f-image is 3-AP-free) and P_g
// (finite K within the exact weight budget), ordered by end-extension.

#include <optional>
#include <string>

#include "apforce/ap_core.hpp"
#include "apforce/ideals.hpp"
#include "apforce/model.hpp"

namespace apforce {

enum class PosetTag { W, G };

std::string to_string(PosetTag tag);

struct Condition {
    BoundedSet set;
    PosetTag tag = PosetTag::W;
};

/// D_{F,k} with F the meet of the listed generators.
struct DenseSetSpec {
    IndexSet generators;
    Nat k = 1;
    PosetTag flavor = PosetTag::W;
};

bool is_condition_w(const BoundedSet& k, const GroundFunction& f);

/// (2 - 1/2^{|K|}) * max g[f[K]] as an exact rational; zero for K empty.
Rational weight_budget(const BoundedSet& k, const GroundFunction& f, const WeightFunction& g);
bool is_condition_g(const BoundedSet& k, const GroundFunction& f, const WeightFunction& g);

/// K <= L: K = L, or K is a proper superset whose new points all lie above max L.
bool extends(const BoundedSet& k, const BoundedSet& l);

/// Least n with |K ∩ F ∩ I_n| >= k.
std::optional<Nat> meets_dense_w(const BoundedSet& k_set, const BoundedSet& f_set, Nat k);
std::optional<ArithmeticProgression> meets_dense_g(const BoundedSet& k_set, const LazySet& f_set,
                                                   Nat k);

}  // namespace apforce
