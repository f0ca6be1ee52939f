#include "sblearn/stern_brocot.hpp"

#include "testutil.hpp"

#include <doctest.h>

using namespace sblearn;
using testutil::Rng;

TEST_CASE("mediant construction") {
    CHECK(mediant(Rational::neg_infinity(), Rational::infinity()) == Rational(0, 1));
    CHECK(mediant(Rational(0, 1), Rational::infinity()) == Rational(1, 1));
    CHECK(mediant(Rational(1, 2), Rational(2, 3)) == Rational(3, 5));
    CHECK_THROWS_AS(mediant(Rational(2, 3), Rational(1, 2)), std::invalid_argument);
    CHECK_THROWS_AS(mediant(Rational::infinity(), Rational::neg_infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(mediant(Rational::infinity(), Rational::infinity()), std::invalid_argument);
}

TEST_CASE("children of the figure nodes") {
    SbNode root = SbNode::root();
    CHECK(left_child(root).value == Rational(-1, 1));
    CHECK(right_child(root).value == Rational(1, 1));

    SbNode half{Rational(1, 2), Rational(0, 1), Rational(1, 1)};
    CHECK(right_child(half).value == Rational(2, 3));
    CHECK(left_child(half).value == Rational(1, 3));

    SbNode neg_half{Rational(-1, 2), Rational(-1, 1), Rational(0, 1)};
    CHECK(left_child(neg_half).value == Rational(-2, 3));
}

TEST_CASE("sb_encode matches the published examples") {
    CHECK(sb_encode(Rational(-2, 3)) == SbEncoding{-1, {1, 1, 1}});
    CHECK(sb_encode(Rational(1, 3)) == SbEncoding{1, {1, 2}});
    CHECK(sb_encode(Rational(23, 108)) == SbEncoding{1, {1, 4, 1, 2, 3, 1}});
    CHECK(sb_encode(Rational(0, 1)) == SbEncoding{});
    CHECK(sb_encode(Rational(3, 1)) == SbEncoding{1, {3}});
    CHECK(sb_encode(Rational(-3, 1)) == SbEncoding{-1, {3}});
    CHECK_THROWS_AS(sb_encode(Rational::infinity()), std::invalid_argument);
}

TEST_CASE("sb_decode inverts the examples and rejects malformed runs") {
    CHECK(sb_decode(SbEncoding{-1, {1, 1, 1}}) == Rational(-2, 3));
    CHECK(sb_decode(SbEncoding{1, {1, 2}}) == Rational(1, 3));
    CHECK(sb_decode(SbEncoding{}) == Rational(0, 1));
    CHECK(sb_decode(SbEncoding{1, {1, 4, 1, 2, 3, 1}}) == Rational(23, 108));
    CHECK_THROWS_AS(sb_decode(SbEncoding{1, {1, 0, 2}}), std::invalid_argument);
    CHECK_THROWS_AS(sb_decode(SbEncoding{1, {}}), std::invalid_argument);
    CHECK_THROWS_AS(sb_decode(SbEncoding{0, {2}}), std::invalid_argument);
}

TEST_CASE("encode agrees with the descent oracle and round-trips") {
    Rng rng(7);
    for (int i = 0; i < 300; ++i) {
        Rational q = testutil::random_rational(rng, 10);
        CHECK(sb_encode(q) == testutil::oracle_encode(q));
    }
    for (int i = 0; i < 2000; ++i) {
        Rational q = testutil::random_rational(rng, 256);
        CHECK(sb_decode(sb_encode(q)) == q);
    }
    // decode of arbitrary valid encodings also round-trips the other way
    for (int i = 0; i < 500; ++i) {
        SbEncoding enc = testutil::random_encoding(rng, 8, 24);
        CHECK(sb_encode(sb_decode(enc)) == enc);
    }
}

TEST_CASE("node_of returns the boundary pair") {
    SbNode root = node_of(Rational(0, 1));
    CHECK(root.lo == Rational::neg_infinity());
    CHECK(root.hi == Rational::infinity());

    SbNode third = node_of(Rational(1, 3));  // path RLL
    CHECK(third.lo == Rational(0, 1));
    CHECK(third.hi == Rational(1, 2));

    SbNode neg = node_of(Rational(-2, 3));  // path LRL
    CHECK(neg.lo == Rational(-1, 1));
    CHECK(neg.hi == Rational(-1, 2));

    CHECK_THROWS_AS(node_of(Rational::infinity()), std::invalid_argument);

    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        Rational q = testutil::random_rational(rng, 10);
        SbNode expect = testutil::oracle_node(q);
        SbNode got = node_of(q);
        CHECK(got.value == q);
        CHECK(got.lo == expect.lo);
        CHECK(got.hi == expect.hi);
    }
}

TEST_CASE("mediant-node coherence on random walks") {
    Rng rng(13);
    for (int walk = 0; walk < 50; ++walk) {
        SbNode node = SbNode::root();
        for (int step = 0; step < 64; ++step) {
            node = (rng() & 1) ? left_child(node) : right_child(node);
            CHECK(node.lo < node.value);
            CHECK(node.value < node.hi);
            CHECK(node.value == mediant(node.lo, node.hi));
        }
    }
}

TEST_CASE("parent walks one level up") {
    CHECK(parent(Rational(1, 3)) == Rational(1, 2));
    CHECK(parent(Rational(-1, 1)) == Rational(0, 1));
    CHECK(parent(Rational(3, 5)) == Rational(2, 3));
    CHECK(parent(Rational(1, 1)) == Rational(0, 1));
    CHECK_THROWS_AS(parent(Rational(0, 1)), std::invalid_argument);

    Rng rng(17);
    for (int i = 0; i < 200; ++i) {
        SbNode node = SbNode::root();
        int steps = 1 + static_cast<int>(rng() % 40);
        SbNode prev = node;
        for (int s = 0; s < steps; ++s) {
            prev = node;
            node = (rng() & 1) ? left_child(node) : right_child(node);
        }
        CHECK(parent(node.value) == prev.value);
    }
}

TEST_CASE("convergents are the turning points") {
    CHECK(convergents(Rational(-2, 3)) ==
          std::vector<Rational>{Rational(-1, 1), Rational(-1, 2), Rational(-2, 3)});
    CHECK(convergents(Rational(1, 3)) == std::vector<Rational>{Rational(1, 1), Rational(1, 3)});
    CHECK(convergents(Rational(1, 1)) == std::vector<Rational>{Rational(1, 1)});
    CHECK(convergents(Rational(0, 1)).empty());

    Rng rng(19);
    for (int i = 0; i < 200; ++i) {
        Rational q = testutil::random_rational(rng, 10);
        if (q.is_zero())
            continue;
        CHECK(convergents(q) == testutil::oracle_convergents(q));
    }
}

TEST_CASE("strict ancestry via run prefixes") {
    CHECK(is_ancestor(Rational(1, 2), Rational(1, 3)));
    CHECK_FALSE(is_ancestor(Rational(1, 3), Rational(1, 2)));
    CHECK(is_ancestor(Rational(0, 1), Rational(5, 3)));
    CHECK(is_ancestor(Rational(0, 1), Rational(-7, 2)));
    CHECK_FALSE(is_ancestor(Rational(1, 2), Rational(1, 2)));
    CHECK_FALSE(is_ancestor(Rational(-1, 1), Rational(2, 3)));

    Rng rng(23);
    std::vector<Rational> pool;
    for (int i = 0; i < 120; ++i)
        pool.push_back(testutil::random_rational(rng, 8));
    for (int i = 0; i < 4000; ++i) {
        const Rational& p = pool[rng() % pool.size()];
        const Rational& q = pool[rng() % pool.size()];
        bool got = is_ancestor(p, q);
        CHECK(got == testutil::oracle_is_ancestor(p, q));
        if (got)
            CHECK_FALSE(is_ancestor(q, p));  // antisymmetry
    }
    // transitivity on random triples drawn from real root paths
    for (int i = 0; i < 300; ++i) {
        const Rational& a = pool[rng() % pool.size()];
        const Rational& b = pool[rng() % pool.size()];
        const Rational& c = pool[rng() % pool.size()];
        if (is_ancestor(a, b) && is_ancestor(b, c))
            CHECK(is_ancestor(a, c));
    }
}

TEST_CASE("branch offsets agree with iterated children") {
    SbNode root = SbNode::root();
    CHECK(branch_offset_value(root, Dir::right, 3) == Rational(3, 1));

    SbNode one = node_of(Rational(1, 1));
    CHECK(branch_offset_value(one, Dir::left, 2) == Rational(1, 3));

    Rng rng(29);
    for (int i = 0; i < 40; ++i) {
        SbNode node = SbNode::root();
        int steps = static_cast<int>(rng() % 12);
        for (int s = 0; s < steps; ++s)
            node = (rng() & 1) ? left_child(node) : right_child(node);
        Dir dir = (rng() & 1) ? Dir::left : Dir::right;
        CHECK(branch_offset_value(node, dir, 1) ==
              (dir == Dir::left ? left_child(node) : right_child(node)).value);
        SbNode walk = node;
        Int m = 1;
        for (int k = 0; k < 10; ++k) {  // offsets up to 2^10 against iterated children
            walk = dir == Dir::left ? left_child(walk) : right_child(walk);
            CHECK(branch_offset_value(node, dir, m) == walk.value);
            SbNode jump = branch_offset_node(node, dir, m);
            CHECK(jump.value == walk.value);
            CHECK(jump.lo == walk.lo);
            CHECK(jump.hi == walk.hi);
            m += 1;
        }
        CHECK(branch_offset_value(node, dir, 1024) == [&] {
            SbNode w = node;
            for (int s = 0; s < 1024; ++s)
                w = dir == Dir::left ? left_child(w) : right_child(w);
            return w.value;
        }());
    }
}

TEST_CASE("run-length sizes stay within the size of the value") {
    Rng rng(31);
    for (int i = 0; i < 2000; ++i) {
        Rational q = testutil::random_rational(rng, 64, /*allow_negative=*/false);
        if (q.is_zero())
            continue;
        SbEncoding enc = sb_encode(q);
        std::size_t run_bits = 0;
        for (const Int& a : enc.runs)
            run_bits += bit_length(a);
        std::size_t n = enc.runs.size();
        Rational q_plus_one(q.num() + q.den(), q.den());
        CHECK(run_bits <= bit_size(q_plus_one) + n + 2);
        CHECK(run_bits <= 2 * bit_size(q) + n + 2);
    }
}

TEST_CASE("sb_depth counts the path length") {
    CHECK(sb_depth(Rational(0, 1)) == 0);
    CHECK(sb_depth(Rational(1, 1)) == 1);
    CHECK(sb_depth(Rational(23, 108)) == 12);  // runs 1+4+1+2+3+1
}
