#include "doctest.h"

#include <random>

#include "apforce/ideals.hpp"
#include "oracles.hpp"

using namespace apforce;

namespace {

BoundedSet make(std::vector<Nat> v, Nat bound = 1 << 12) { return BoundedSet::from_unsorted(std::move(v), bound); }

Nat longest(const BoundedSet& a) { return std::get<VdwDetail>(vdw_diagnostic(a).detail).longest_length; }

}  // namespace

TEST_CASE("weight_sum examples") {
    const auto g = WeightFunction::reciprocal();
    CHECK(weight_sum(make({0, 10, 15}), g) == Rational(203, 176));
    CHECK(weight_sum(make({}), g) == 0);
    CHECK(weight_sum(make({0}), g) == 1);
}

TEST_CASE("named weights") {
    const auto r = WeightFunction::reciprocal();
    const auto s = WeightFunction::inverse_sqrt();
    for (Nat n = 0; n < 2000; ++n) {
        CHECK(r(n) == oracle::reciprocal(n));
        CHECK(s(n) == oracle::inverse_sqrt(n));
    }
    CHECK(r.max_value(100) == 1);
    CHECK(s.max_value(100) == 1);
    CHECK(r.first_below(Rational(1, 8), 1024) == 8);
    CHECK(s.first_below(Rational(1, 3), 1024) == 9);
    CHECK(ceil_sqrt(0) == 0);
    CHECK(ceil_sqrt(17) == 5);
    CHECK(ceil_sqrt(Nat{1} << 62) == Nat{1} << 31);
}

TEST_CASE("weight tables") {
    const auto t = load_weight_table(R"([{"n": 0, "num": 1, "den": 2}, {"n": 3, "num": 3, "den": 4}])");
    CHECK(t(3) == Rational(3, 4));
    CHECK(t.in_domain(0));
    CHECK_FALSE(t.in_domain(1));
    CHECK_THROWS_AS(t(1), DomainError);
    CHECK_THROWS_AS(weight_sum(make({1}), t), DomainError);
    CHECK(t.max_value(16) == Rational(3, 4));
    CHECK_THROWS_AS(load_weight_table(R"([{"n": 0, "num": 1, "den": 0}])"), std::invalid_argument);
    CHECK_THROWS_AS(load_weight_table(R"({"n": 0})"), std::invalid_argument);
}

TEST_CASE("tallness probe examples") {
    CHECK(tallness_probe(WeightFunction::reciprocal(), 1024, Rational(1, 100)));
    CHECK_FALSE(tallness_probe(WeightFunction::reciprocal(), 64, Rational(1, 100)));
    CHECK_FALSE(tallness_probe(WeightFunction::constant(1, 64), 64, Rational(1, 2)));
}

TEST_CASE("vdw diagnostic examples") {
    CHECK(longest(BoundedSet::multiples(7, 1024)) == 147);
    std::vector<Nat> powers;
    for (Nat i = 0; i < 10; ++i) powers.push_back(Nat{1} << i);
    CHECK(longest(make(powers)) == 2);
    CHECK(longest(make({})) == 0);
}

TEST_CASE("not-P-ideal witness examples") {
    auto w = not_p_ideal_witness(1, 64);
    REQUIRE(w.size() == 1);
    CHECK(w[0].set == make({1, 2, 4, 8, 16, 32}, 64));
    w = not_p_ideal_witness(2, 16);
    REQUIRE(w.size() == 2);
    CHECK(w[0].set == make({1, 2, 4, 8}, 16));
    CHECK(w[1].set == make({2, 3, 5, 9}, 16));
    w = not_p_ideal_witness(1, 2);
    CHECK(w[0].set == make({1}, 2));
    for (const auto& s : not_p_ideal_witness(6, 1 << 12)) {
        std::vector<Nat> v(s.set.begin(), s.set.end());
        CHECK_FALSE(oracle::has_3ap(v));
    }
}

TEST_CASE("weight_sum is additive and monotone") {
    std::mt19937_64 rng(21);
    const auto g = WeightFunction::inverse_sqrt();
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = make(oracle::random_subset(rng, 1 << 12, rng() % 20));
        const auto b = make(oracle::random_subset(rng, 1 << 12, rng() % 20)).minus(a);
        const auto u = a.unite(b);
        CHECK(weight_sum(u, g) == weight_sum(a, g) + weight_sum(b, g));
        CHECK(weight_sum(a, g) <= weight_sum(u, g));
        std::vector<Nat> uv(u.begin(), u.end());
        CHECK(weight_sum(u, g) == oracle::weight_sum(uv, oracle::inverse_sqrt));
    }
}

TEST_CASE("longest progression is monotone under supersets") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = make(oracle::random_subset(rng, 256, rng() % 25));
        const auto b = a.unite(make(oracle::random_subset(rng, 256, rng() % 10)));
        CHECK(longest(a) <= longest(b));
    }
}
