#include "doctest.h"

#include <random>

#include "apforce/ap_core.hpp"
#include "oracles.hpp"

using namespace apforce;

namespace {

BoundedSet make(std::vector<Nat> v, Nat bound = 1 << 16) { return BoundedSet::from_unsorted(std::move(v), bound); }

ArithmeticProgression ap(Nat a, Nat d, Nat n) { return {a, d, n}; }

}  // namespace

TEST_CASE("contains_ap examples") {
    CHECK(contains_ap(make({1, 3, 5, 7}), 4) == ap(1, 2, 4));
    CHECK_FALSE(contains_ap(make({0, 1, 3, 4}), 3));
    CHECK_FALSE(contains_ap(make({}), 1));
    CHECK_THROWS_AS(contains_ap(make({1}), 0), std::invalid_argument);
}

TEST_CASE("is_3ap_free examples") {
    CHECK(is_3ap_free(make({0, 1, 3, 4})));
    CHECK_FALSE(is_3ap_free(make({2, 5, 8})));
    CHECK(is_3ap_free(make({7})));
}

TEST_CASE("longest_ap examples") {
    auto l = longest_ap(make({1, 2, 4, 8, 16}));
    CHECK(l.length == 2);
    CHECK(l.witness == ap(1, 1, 2));
    l = longest_ap(make({10, 20, 30, 40}));
    CHECK(l.length == 4);
    CHECK(l.witness == ap(10, 10, 4));
    l = longest_ap(make({}));
    CHECK(l.length == 0);
    CHECK_FALSE(l.witness);
    l = longest_ap(make({9}));
    CHECK(l.length == 1);
    CHECK(l.witness == ap(9, 1, 1));
}

TEST_CASE("dyadic blocks") {
    CHECK(block(0) == DyadicBlock{0, 0, 2});
    CHECK(block(3) == DyadicBlock{3, 8, 16});
    CHECK(block(5) == DyadicBlock{5, 32, 64});
    CHECK(block_index(1) == 0);
    CHECK(block_index(8) == 3);
    CHECK(block_index(63) == 5);
    CHECK(block_count(64) == 6);
    CHECK(block_count(2) == 1);
}

TEST_CASE("find_ap_in examples") {
    CHECK(find_ap_in(BoundedSet::multiples(5, 100), 2, 0) == ap(5, 5, 2));
    CHECK(find_ap_in(BoundedSet::range(0, 32, 32), 5, 10) == ap(11, 1, 5));
    CHECK_FALSE(find_ap_in(make({1, 2, 4}), 3, 0));
}

TEST_CASE("BoundedSet rejects bad input") {
    CHECK_THROWS_AS(BoundedSet({3, 1}, 8), std::invalid_argument);
    CHECK_THROWS_AS(BoundedSet({9}, 8), std::invalid_argument);
    CHECK_THROWS_AS(BoundedSet(kMaxUniverse + 1), std::invalid_argument);
    const auto s = make({5, 1, 5, 3}, 8);
    CHECK(s.size() == 3);
    CHECK(s.successor(4) == 5u);
    CHECK_FALSE(s.successor(6));
}

TEST_CASE("longest_ap agrees with the brute-force oracle") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t size = rng() % 30;
        const Nat bound = trial % 2 ? 64 : 4096;
        const auto v = oracle::random_subset(rng, bound, std::min<std::size_t>(size, bound));
        const auto got = longest_ap(BoundedSet(v, bound));
        const auto want = oracle::longest_ap(v);
        REQUIRE(got.length == want.length);
        if (want.length > 0) {
            CHECK(got.witness->start == want.start);
            CHECK(got.witness->step == want.step);
        }
        const auto t = detail::longest_ap_table(v);
        const auto w = detail::longest_ap_walk(v);
        CHECK(t.length == want.length);
        CHECK(w.length == want.length);
        CHECK(t.witness == w.witness);
    }
}

TEST_CASE("contains_ap is downward closed in k and matches the oracle") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const auto v = oracle::random_subset(rng, 128, 4 + rng() % 24);
        const BoundedSet s(v, 128);
        for (Nat k = 1; k <= 6; ++k) {
            const auto got = contains_ap(s, k);
            const auto want = oracle::least_ap(v, k);
            REQUIRE(got.has_value() == want.has_value());
            if (got) {
                CHECK(got->start == want->start);
                CHECK(got->step == want->step);
                for (Nat j = 1; j <= k; ++j) CHECK(contains_ap(s, j));
            }
        }
        CHECK(is_3ap_free(s) == !oracle::has_3ap(v));
    }
}

TEST_CASE("blocks partition the universe") {
    for (Nat m = 0; m < (1 << 12); ++m) {
        const Nat n = block_index(m);
        REQUIRE(block(n).contains(m));
        CHECK(n == oracle::block_of(m));
        if (n > 0) CHECK_FALSE(block(n - 1).contains(m));
        CHECK_FALSE(block(n + 1).contains(m));
    }
}

TEST_CASE("growth lemma below 256") {
    for (Nat a = 0; a < 256; ++a)
        for (Nat b = a + 1; b < 256; ++b)
            for (Nat c = 2 * b + 1; c < 256; ++c) REQUIRE(c - b != b - a);
}

TEST_CASE("even and odd subsequences of a dyadic selector are 3-AP-free") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<Nat> sel;
        for (Nat n = 0; n < 12; ++n) {
            if (rng() % 3 == 0) continue;
            const auto b = block(n);
            sel.push_back(b.lo + rng() % b.size());
        }
        REQUIRE(oracle::is_block_selector(sel));
        std::vector<Nat> even, odd;
        for (std::size_t i = 0; i < sel.size(); ++i) (i % 2 ? odd : even).push_back(sel[i]);
        CHECK_FALSE(oracle::has_3ap(even));
        CHECK_FALSE(oracle::has_3ap(odd));
    }
}

TEST_CASE("least_ap works on sets that only answer successor queries") {
    struct Evens {
        std::optional<Nat> successor(Nat x) const { return x % 2 ? x + 1 : x; }
        bool contains(Nat x) const { return x % 2 == 0; }
    };
    CHECK(least_ap(Evens{}, 3, 5, 1000) == ap(6, 2, 3));
    CHECK(least_ap(Evens{}, 1, 1, 1000) == ap(2, 1, 1));
    CHECK_FALSE(least_ap(Evens{}, 3, 5, 10));
}
