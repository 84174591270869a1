#include "apforce/ideals.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace apforce {

static_assert(sizeof(unsigned long) == sizeof(Nat), "GMP conversions assume 64-bit long");

namespace {

mpz_class to_mpz(Nat n) { return mpz_class(static_cast<unsigned long>(n)); }

}  // namespace

std::string to_string(const Rational& q) { return q.get_str(); }

Rational pow2(Nat e) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, e);
    return Rational(p);
}

Nat ceil_sqrt(Nat x) {
    if (x == 0) return 0;
    Nat r = static_cast<Nat>(std::sqrt(static_cast<long double>(x)));
    while (r > 0 && r * r > x) --r;
    while ((r + 1) * (r + 1) <= x) ++r;
    return r * r == x ? r : r + 1;
}

WeightFunction WeightFunction::reciprocal() { return {}; }

WeightFunction WeightFunction::inverse_sqrt() {
    WeightFunction g;
    g.kind_ = Kind::InverseSqrt;
    return g;
}

WeightFunction WeightFunction::table(std::map<Nat, Rational> values) {
    for (auto& [n, v] : values) {
        v.canonicalize();
        if (sgn(v) <= 0)
            throw std::invalid_argument("weight table entry " + std::to_string(n) +
                                        " must be positive");
    }
    WeightFunction g;
    g.kind_ = Kind::Table;
    g.table_ = std::move(values);
    return g;
}

WeightFunction WeightFunction::constant(const Rational& c, Nat size) {
    std::map<Nat, Rational> values;
    for (Nat n = 0; n < size; ++n) values.emplace(n, c);
    return table(std::move(values));
}

std::string WeightFunction::name() const {
    switch (kind_) {
        case Kind::Reciprocal: return "reciprocal";
        case Kind::InverseSqrt: return "inverse-sqrt";
        case Kind::Table: return "table";
    }
    return "?";
}

bool WeightFunction::in_domain(Nat n) const {
    return kind_ != Kind::Table || table_.contains(n);
}

Rational WeightFunction::operator()(Nat n) const {
    switch (kind_) {
        case Kind::Reciprocal: {
            return Rational(mpz_class(1), to_mpz(n + 1));
        }
        case Kind::InverseSqrt: {
            return Rational(mpz_class(1), to_mpz(ceil_sqrt(n + 1)));
        }
        case Kind::Table: {
            auto it = table_.find(n);
            if (it == table_.end())
                throw DomainError("weight table has no entry for " + std::to_string(n));
            return it->second;
        }
    }
    return {};
}

namespace {

Nat clamp_to(const mpz_class& v, Nat bound) {
    if (v >= to_mpz(bound)) return bound;
    return static_cast<Nat>(v.get_ui());
}

}  // namespace

Nat WeightFunction::first_below(const Rational& c, Nat bound) const {
    if (sgn(c) <= 0) return bound;
    const mpz_class t = c.get_den() / c.get_num();  // floor(1/c)
    switch (kind_) {
        case Kind::Reciprocal:
            // 1/(n+1) < c  <=>  n >= floor(1/c)
            return clamp_to(t, bound);
        case Kind::InverseSqrt:
            // 1/ceil(sqrt(n+1)) < c  <=>  ceil(sqrt(n+1)) > floor(1/c)  <=>  n >= floor(1/c)^2
            return clamp_to(t * t, bound);
        case Kind::Table: {
            for (auto it = table_.lower_bound(bound); it != table_.begin();) {
                --it;
                if (it->second >= c) return it->first + 1;
            }
            return 0;
        }
    }
    return bound;
}

Rational WeightFunction::max_value(Nat bound) const {
    if (kind_ != Kind::Table) {
        if (bound == 0) throw DomainError("max weight over an empty universe");
        return Rational(1);  // both named families are non-increasing with g(0) = 1
    }
    std::optional<Rational> best;
    for (auto it = table_.begin(); it != table_.end() && it->first < bound; ++it)
        if (!best || it->second > *best) best = it->second;
    if (!best) throw DomainError("weight table has no entries below the universe bound");
    return *best;
}

Rational weight_sum(const BoundedSet& a, const WeightFunction& g) {
    Rational sum(0);
    for (Nat x : a) sum += g(x);
    return sum;
}

bool tallness_probe(const WeightFunction& g, Nat horizon, const Rational& eps) {
    const Nat lo = horizon / 2;
    if (lo >= horizon) return true;
    if (g.kind() != WeightFunction::Kind::Table) return g(lo) < eps;  // non-increasing
    for (Nat n = lo; n < horizon; ++n)
        if (!(g(n) < eps)) return false;
    return true;
}

WeightFunction load_weight_table(const std::string& json_text) {
    const auto doc = nlohmann::json::parse(json_text);
    if (!doc.is_array()) throw std::invalid_argument("weight table must be a JSON array");
    std::map<Nat, Rational> values;
    for (const auto& e : doc) {
        const Nat n = e.at("n").get<Nat>();
        const Nat num = e.at("num").get<Nat>();
        const Nat den = e.at("den").get<Nat>();
        if (den == 0) throw std::invalid_argument("weight table: den must be positive");
        Rational q(to_mpz(num), to_mpz(den));
        if (!values.emplace(n, q).second)
            throw std::invalid_argument("weight table: duplicate n = " + std::to_string(n));
    }
    return WeightFunction::table(std::move(values));
}

WeightFunction load_weight_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open weight table " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_weight_table(ss.str());
}

IdealDiagnostic vdw_diagnostic(const BoundedSet& a) {
    const auto l = longest_ap(a);
    return {IdealDiagnostic::Kind::Vdw, VdwDetail{l.length, l.witness}};
}

IdealDiagnostic summable_diagnostic(const BoundedSet& a, const WeightFunction& g) {
    return {IdealDiagnostic::Kind::Summable, SummableDetail{g.name(), weight_sum(a, g)}};
}

std::vector<ShiftedPowers> not_p_ideal_witness(Nat n_max, Nat bound) {
    if (n_max < 1) throw std::invalid_argument("not_p_ideal_witness: n_max must be >= 1");
    std::vector<ShiftedPowers> out;
    for (Nat n = 0; n < n_max; ++n) {
        std::vector<Nat> elems;
        for (Nat i = 0; i < 62; ++i) {
            const Nat x = (Nat{1} << i) + n;
            if (x >= bound) break;
            elems.push_back(x);
        }
        BoundedSet s(std::move(elems), bound);
        if (n == 0 && !is_3ap_free(s))
            throw std::logic_error("powers of two contain a 3-term progression");
        auto diag = vdw_diagnostic(s);
        out.push_back({n, std::move(s), std::move(diag)});
    }
    return out;
}

}  // namespace apforce
