#pragma once

// Desk-scale views of the van der Waerden ideal and of summable ideals I_g.
// Nothing here decides membership in an ideal of subsets of omega; every
// answer is a probe or a diagnostic over an explicit finite window.

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <gmpxx.h>

#include "apforce/ap_core.hpp"

namespace apforce {

using Rational = mpq_class;

std::string to_string(const Rational& q);
Rational pow2(Nat e);

class DomainError : public Error {
public:
    using Error::Error;
};

/// Positive weight g determining the summable ideal
/// I_g = { A : sum_{a in A} g(a) < infinity }.
class WeightFunction {
public:
    enum class Kind { Reciprocal, InverseSqrt, Table };

    static WeightFunction reciprocal();   // g(n) = 1/(n+1)
    static WeightFunction inverse_sqrt(); // g(n) = 1/ceil(sqrt(n+1))
    static WeightFunction table(std::map<Nat, Rational> values);
    /// Constant weight c on [0, size).
    static WeightFunction constant(const Rational& c, Nat size);

    Kind kind() const { return kind_; }
    std::string name() const;
    const std::map<Nat, Rational>& entries() const { return table_; }

    bool in_domain(Nat n) const;
    Rational operator()(Nat n) const;

    /// Least n0 such that g(n) < c for every n in [n0, bound). Returns `bound`
    /// when even n = bound - 1 fails. Only domain points count for tables.
    Nat first_below(const Rational& c, Nat bound) const;
    /// max_{n < bound} g(n).
    Rational max_value(Nat bound) const;

private:
    Kind kind_ = Kind::Reciprocal;
    std::map<Nat, Rational> table_;
};

/// 1/ceil(sqrt(n+1)) uses this exact integer ceiling.
Nat ceil_sqrt(Nat x);

Rational weight_sum(const BoundedSet& a, const WeightFunction& g);
bool tallness_probe(const WeightFunction& g, Nat horizon, const Rational& eps);

/// Parses [{"n": .., "num": .., "den": ..}, ...].
WeightFunction load_weight_table(const std::string& json_text);
WeightFunction load_weight_table_file(const std::string& path);

struct VdwDetail {
    Nat longest_length = 0;
    std::optional<ArithmeticProgression> witness;
};

struct SummableDetail {
    std::string weight;
    Rational sum;
};

struct IdealDiagnostic {
    enum class Kind { Vdw, Summable };
    Kind kind = Kind::Vdw;
    std::variant<VdwDetail, SummableDetail> detail;
};

/// Longest progression in the window; a long one is evidence against
/// membership in the van der Waerden ideal, never a proof either way.
IdealDiagnostic vdw_diagnostic(const BoundedSet& a);
IdealDiagnostic summable_diagnostic(const BoundedSet& a, const WeightFunction& g);

struct ShiftedPowers {
    Nat shift = 0;
    BoundedSet set;
    IdealDiagnostic diagnostic;
};

/// Truncations of A_n = {2^i + n : i in omega} for n < n_max: each A_n is in
/// the van der Waerden ideal, yet no single member of the ideal almost
/// contains all of them.
std::vector<ShiftedPowers> not_p_ideal_witness(Nat n_max, Nat bound);

}  // namespace apforce
