#include "doctest.h"

#include <random>

#include "apforce/posets.hpp"
#include "oracles.hpp"

using namespace apforce;

namespace {

constexpr Nat kBound = 1 << 10;

BoundedSet make(std::vector<Nat> v, Nat bound = kBound) { return BoundedSet::from_unsorted(std::move(v), bound); }

}  // namespace

TEST_CASE("is_condition_w examples") {
    const auto id = GroundFunction::identity(kBound);
    CHECK(is_condition_w(make({1, 2, 32, 33}), id));
    CHECK_FALSE(is_condition_w(make({2, 5, 8}), id));
    CHECK(is_condition_w(make({}), id));
    CHECK(is_condition_w(make({}), GroundFunction::halving(kBound)));
}

TEST_CASE("is_condition_g examples") {
    const auto id = GroundFunction::identity(kBound);
    const auto r = WeightFunction::reciprocal();
    CHECK(is_condition_g(make({0}), id, r));
    CHECK(weight_budget(make({0}), id, r) == Rational(3, 2));
    CHECK(is_condition_g(make({0, 10, 15}), id, r));
    CHECK(weight_budget(make({0, 10, 15}), id, r) == Rational(15, 8));
    CHECK_FALSE(is_condition_g(make({1, 2, 3}), id, WeightFunction::constant(1, kBound)));
    CHECK(is_condition_g(make({}), id, r));
}

TEST_CASE("extends examples") {
    CHECK(extends(make({1, 2, 32, 33}), make({1, 2})));
    CHECK_FALSE(extends(make({1, 3}), make({1, 2})));
    CHECK(extends(make({1, 2}), make({1, 2})));
    CHECK_FALSE(extends(make({0, 1, 2}), make({1, 2})));
}

TEST_CASE("meets_dense examples") {
    const auto full = BoundedSet::range(0, kBound, kBound);
    CHECK(meets_dense_w(make({16, 17, 18}), full, 3) == 4u);
    CHECK_FALSE(meets_dense_w(make({1, 8}), full, 2));
    CHECK(meets_dense_w(make({40}), full, 1));
    CHECK(meets_dense_g(make({0, 10, 15}), LazySet::multiples(5, kBound), 2) ==
          ArithmeticProgression{10, 5, 2});
    CHECK_FALSE(meets_dense_g(make({}), LazySet::full(kBound), 1));
    CHECK(meets_dense_g(make({7}), LazySet(make({7})), 1) == ArithmeticProgression{7, 1, 1});
}

TEST_CASE("extends is a partial order with L a prefix of K") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 500; ++trial) {
        auto a = make(oracle::random_subset(rng, 64, rng() % 6), 64);
        auto b = a.unite(make(oracle::random_subset(rng, 64, rng() % 3), 64));
        auto c = b.unite(make(oracle::random_subset(rng, 64, rng() % 3), 64));
        CHECK(extends(a, a));
        if (extends(a, b) && extends(b, a)) CHECK(a == b);
        if (extends(c, b) && extends(b, a)) CHECK(extends(c, a));
        if (extends(b, a)) {
            REQUIRE(b.size() >= a.size());
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
            if (!a.empty())
                for (Nat x : b.minus(a)) CHECK(x > a.max());
        }
    }
}

TEST_CASE("W conditions are closed under taking prefixes") {
    std::mt19937_64 rng(42);
    const auto bc = GroundFunction::block_collapse(kBound);
    const auto id = GroundFunction::identity(kBound);
    for (int trial = 0; trial < 400; ++trial) {
        const auto k = make(oracle::random_subset(rng, kBound, 1 + rng() % 7));
        const auto& f = trial % 2 ? bc : id;
        const auto img = image(f, k);
        CHECK(is_condition_w(k, f) == !oracle::has_3ap(std::vector<Nat>(img.begin(), img.end())));
        if (!is_condition_w(k, f)) continue;
        for (std::size_t n = 0; n <= k.size(); ++n) {
            const auto l = k.restrict_to(0, n == k.size() ? kBound : k[n]);
            REQUIRE(extends(k, l));
            CHECK(is_condition_w(l, f));
        }
    }
}

TEST_CASE("meeting a dense set survives extension") {
    std::mt19937_64 rng(43);
    const auto f_set = BoundedSet::multiples(3, kBound);
    const auto lazy = LazySet::multiples(3, kBound);
    for (int trial = 0; trial < 300; ++trial) {
        const auto k = make(oracle::random_subset(rng, kBound, rng() % 12));
        const auto k2 = k.unite(make(oracle::random_subset(rng, kBound, rng() % 12)));
        for (Nat j = 1; j <= 3; ++j) {
            if (meets_dense_w(k, f_set, j)) CHECK(meets_dense_w(k2, f_set, j));
            if (meets_dense_g(k, lazy, j)) CHECK(meets_dense_g(k2, lazy, j));
            const auto kf = oracle::intersect(std::vector<Nat>(k.begin(), k.end()),
                                              std::vector<Nat>(f_set.begin(), f_set.end()));
            CHECK(meets_dense_w(k, f_set, j) == oracle::first_block_with(kf, j, block_count(kBound)));
            CHECK(meets_dense_g(k, lazy, j).has_value() == oracle::least_ap(kf, j).has_value());
        }
    }
}
