#include "sblearn/learner.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <map>
#include <vector>

using namespace sblearn;
using testutil::Rng;

namespace {

BreakLinkStore store_of(std::vector<std::pair<Rational, Label>> entries) {
    return BreakLinkStore::from_entries(entries);
}

// All break-link endpoints of the target, labeled by it.
BreakLinkStore complete_store(const PiecewiseFunction& target) {
    BreakLinkStore store;
    for (const TreeEdge& e : full_break_link_set(target))
        for (const Rational& v : {e.first, e.second})
            store.insert(v, target.evaluate(v));
    return store;
}

}  // namespace

TEST_CASE("break-link store keeps order and rejects duplicates") {
    BreakLinkStore store;
    CHECK(store.insert(Rational(1, 2), "A"));
    CHECK(store.insert(Rational(0, 1), "A"));
    CHECK(store.insert(Rational(2, 3), "B"));
    CHECK_FALSE(store.insert(Rational(1, 2), "A"));
    REQUIRE(store.size() == 3);
    CHECK(store[0].value == Rational(0, 1));
    CHECK(store[1].value == Rational(1, 2));
    CHECK(store[2].value == Rational(2, 3));
    CHECK(store.contains(Rational(2, 3)));
    CHECK_FALSE(store.contains(Rational(5, 7)));
    CHECK(store.neighbor_chain_ok());
    CHECK_THROWS_AS(store_of({{Rational(1, 2), "A"}, {Rational(1, 2), "B"}}),
                    std::invalid_argument);
}

TEST_CASE("construct_representation base cases") {
    CHECK(construct_representation(store_of({{Rational(0, 1), "A"}})) ==
          PiecewiseFunction::constant("A"));
    CHECK_THROWS_AS(construct_representation(BreakLinkStore()), std::invalid_argument);

    // 1/1 is the right child of 0/1; the label flip closes the piece at 0
    PiecewiseFunction two = construct_representation(
        store_of({{Rational(0, 1), "A"}, {Rational(1, 1), "B"}}));
    PiecewiseFunction expect({
        {Interval(Rational::neg_infinity(), Rational(0, 1), false, true), "A"},
        {Interval(Rational(0, 1), Rational::infinity(), false, false), "B"},
    });
    CHECK(two == expect);
}

TEST_CASE("construct_representation rebuilds the example from its break links") {
    PiecewiseFunction g1 = testutil::gamma1();
    PiecewiseFunction rebuilt = construct_representation(complete_store(g1)).canonicalize();
    CHECK(rebuilt == g1);
}

TEST_CASE("construct_representation is consistent with its input store") {
    Rng rng(73);
    for (int i = 0; i < 60; ++i) {
        PiecewiseFunction target = testutil::random_piecewise(rng, 8, 5, 4);
        BreakLinkStore store = complete_store(target);
        PiecewiseFunction rep = construct_representation(store);
        for (std::size_t k = 0; k < store.size(); ++k)
            CHECK(rep.evaluate(store[k].value) == store[k].label);
        CHECK(rep.canonicalize() == target);
    }
}

TEST_CASE("find_closest_ancestor picks the deepest stored ancestor") {
    BreakLinkStore d1 = store_of({{Rational(0, 1), "A"}});
    CHECK(find_closest_ancestor(Rational(5, 3), d1) == Rational(0, 1));

    BreakLinkStore d2 = store_of(
        {{Rational(0, 1), "A"}, {Rational(1, 2), "A"}, {Rational(1, 1), "B"}});
    CHECK(find_closest_ancestor(Rational(1, 3), d2) == Rational(1, 2));

    BreakLinkStore d3 = store_of({{Rational(-1, 1), "B"}, {Rational(0, 1), "A"}});
    CHECK(find_closest_ancestor(Rational(2, 3), d3) == Rational(0, 1));

    CHECK_THROWS_AS(find_closest_ancestor(Rational(1, 2), d2), TeacherInconsistency);
}

TEST_CASE("find_break_link on the first counterexample of the example") {
    PiecewiseFunction g1 = testutil::gamma1();
    auto teacher = make_simulated_teacher(g1);
    BreakLinkStore store = store_of({{Rational(0, 1), "A"}});
    TreeEdge edge = find_break_link(Rational(0, 1), Rational(1, 1), store, teacher.mq);
    CHECK(is_break_link(g1, edge));
    CHECK(edge == TreeEdge{Rational(0, 1), Rational(1, 1)});
}

TEST_CASE("find_break_link at a single planted boundary, both directions") {
    PiecewiseFunction right_target({
        {Interval(Rational::neg_infinity(), Rational(0, 1), false, true), "A"},
        {Interval(Rational(0, 1), Rational::infinity(), false, false), "B"},
    });
    auto rt = make_simulated_teacher(right_target);
    BreakLinkStore store = store_of({{Rational(0, 1), "A"}});
    CHECK(find_break_link(Rational(0, 1), Rational(1, 1), store, rt.mq) ==
          TreeEdge{Rational(0, 1), Rational(1, 1)});

    PiecewiseFunction left_target = testutil::mirror(right_target);
    auto lt = make_simulated_teacher(left_target);
    BreakLinkStore mirror_store = store_of({{Rational(0, 1), "A"}});
    CHECK(find_break_link(Rational(0, 1), Rational(-1, 1), mirror_store, lt.mq) ==
          TreeEdge{Rational(0, 1), Rational(-1, 1)});
}

TEST_CASE("search_right gallops then bisects to the breaking edge") {
    PiecewiseFunction target({
        {Interval(Rational::neg_infinity(), Rational(3, 1), false, true), "A"},
        {Interval(Rational(3, 1), Rational::infinity(), false, false), "B"},
    });
    auto teacher = make_simulated_teacher(target);
    BreakLinkStore store = store_of({{Rational(0, 1), "A"}});
    TreeEdge edge = search_right(Rational(0, 1), Rational(4, 1), store, teacher.mq);
    CHECK(edge == TreeEdge{Rational(3, 1), Rational(4, 1)});
    CHECK(is_break_link(target, edge));
    CHECK(teacher.mq.count() <= 8);
}

TEST_CASE("bs_right degenerate and bounded cases") {
    PiecewiseFunction target({
        {Interval(Rational::neg_infinity(), Rational(0, 1), false, true), "A"},
        {Interval(Rational(0, 1), Rational::infinity(), false, false), "B"},
    });
    auto teacher = make_simulated_teacher(target);
    CHECK(bs_right(Rational(0, 1), Rational(1, 1), 0, Rational::infinity(), teacher.mq, "A") ==
          TreeEdge{Rational(0, 1), Rational(1, 1)});

    // window of width one returns its only edge
    PiecewiseFunction t32({
        {Interval(Rational::neg_infinity(), Rational(3, 2), false, true), "A"},
        {Interval(Rational(3, 2), Rational::infinity(), false, false), "B"},
    });
    auto teacher32 = make_simulated_teacher(t32);
    CHECK(bs_right(Rational(0, 1), Rational(2, 1), 1, Rational::infinity(), teacher32.mq, "A") ==
          TreeEdge{Rational(1, 1), Rational(2, 1)});

    // boundary at branch offset five with k = 3: one probe pair resolves it
    PiecewiseFunction t5({
        {Interval(Rational::neg_infinity(), Rational(5, 1), false, true), "A"},
        {Interval(Rational(5, 1), Rational::infinity(), false, false), "B"},
    });
    auto teacher5 = make_simulated_teacher(t5);
    std::size_t before = teacher5.mq.count();
    TreeEdge edge =
        bs_right(Rational(0, 1), Rational(6, 1), 3, Rational::infinity(), teacher5.mq, "A");
    CHECK(edge == TreeEdge{Rational(5, 1), Rational(6, 1)});
    CHECK(is_break_link(t5, edge));
    CHECK(teacher5.mq.count() - before <= 2 * 3 + 2);  // two probes per halving plus setup
}

TEST_CASE("bs_left mirrors bs_right") {
    PiecewiseFunction target({
        {Interval(Rational::neg_infinity(), Rational(-5, 1), false, false), "B"},
        {Interval(Rational(-5, 1), Rational::infinity(), true, false), "A"},
    });
    auto teacher = make_simulated_teacher(target);
    TreeEdge edge = bs_left(Rational(0, 1), Rational(-6, 1), 3, Rational::neg_infinity(),
                            teacher.mq, "A");
    CHECK(edge == TreeEdge{Rational(-5, 1), Rational(-6, 1)});
    CHECK(is_break_link(target, edge));
}

TEST_CASE("learning the example function lands exactly on its canonical form") {
    PiecewiseFunction g1 = testutil::gamma1();
    for (CounterexampleStrategy strategy :
         {CounterexampleStrategy::simplest(), CounterexampleStrategy::boundary_adjacent(),
          CounterexampleStrategy::deep(64), CounterexampleStrategy::seeded_random(5)}) {
        auto teacher = make_simulated_teacher(g1, strategy);
        LearnerReport report = learn(teacher.mq, teacher.eq);
        CHECK(report.result == g1);
        CHECK(report.eq_count == report.iterations);
    }
}

TEST_CASE("learning a constant costs one query of each kind") {
    auto teacher = make_simulated_teacher(PiecewiseFunction::constant("A"));
    LearnerReport report = learn(teacher.mq, teacher.eq);
    CHECK(report.result == PiecewiseFunction::constant("A"));
    CHECK(report.mq_count == 1);
    CHECK(report.eq_count == 1);
    CHECK(report.iterations == 1);
    CHECK(report.break_links_found == 0);
}

TEST_CASE("random targets are learned exactly with the promised invariants") {
    Rng rng(79);
    for (int i = 0; i < 60; ++i) {
        PiecewiseFunction target = testutil::random_piecewise(rng, 8, 5, 6, 3);
        auto teacher = make_simulated_teacher(target);
        LearnOptions options;
        options.observer = [&](const LearnEvent& ev) {
            // each found edge is a genuine break link contributing a new point
            CHECK(is_break_link(target, ev.edge));
            CHECK(ev.store.neighbor_chain_ok());
            // consistency with the store after every insertion
            PiecewiseFunction rep = construct_representation(ev.store);
            for (std::size_t k = 0; k < ev.store.size(); ++k)
                CHECK(rep.evaluate(ev.store[k].value) == ev.store[k].label);
            // locality of the hunt: membership cost is logarithmic in the
            // branch distance of the found edge
            Dir dir = ev.counterexample < ev.origin ? Dir::left : Dir::right;
            Int offset = branch_offset_of(node_of(ev.origin), dir, ev.edge.first);
            std::size_t bits = offset == 0 ? 1 : bit_length(offset);
            CHECK(ev.search_mq <= 4 * (bits + 2));
        };
        LearnerReport report = learn(teacher.mq, teacher.eq, options);
        CHECK(report.result == target);
        CHECK(report.eq_count <= full_break_link_set(target).size() + 1);
    }
}

TEST_CASE("mirrored teachers produce mirrored transcripts") {
    Rng rng(83);
    for (int i = 0; i < 20; ++i) {
        PiecewiseFunction target = testutil::random_piecewise(rng, 6, 4, 5);
        PiecewiseFunction mirrored = testutil::mirror(target);

        auto plain = make_simulated_teacher(target);
        std::vector<Rational> plain_inputs;
        plain.mq.set_transcript_sink(
            [&](const TranscriptEntry& t) { plain_inputs.push_back(Rational::parse(t.input)); });
        LearnerReport plain_report = learn(plain.mq, plain.eq);

        // mirror adapter: queries are negated, hypotheses mirrored, so a
        // direction-symmetric learner must behave identically
        auto inner = make_simulated_teacher(target);
        MembershipOracle mirror_mq(
            [&inner](const Rational& q) { return inner.mq(-q); });
        EquivalenceOracle mirror_eq(
            [&inner](const PiecewiseFunction& hyp) -> std::optional<Rational> {
                auto ce = inner.eq(testutil::mirror(hyp));
                if (!ce)
                    return std::nullopt;
                return -*ce;
            });
        std::vector<Rational> mirror_inputs;
        mirror_mq.set_transcript_sink(
            [&](const TranscriptEntry& t) { mirror_inputs.push_back(Rational::parse(t.input)); });
        LearnerReport mirror_report = learn(mirror_mq, mirror_eq);

        CHECK(mirror_report.result == mirrored);
        CHECK(mirror_report.mq_count == plain_report.mq_count);
        CHECK(mirror_report.eq_count == plain_report.eq_count);
        REQUIRE(mirror_inputs.size() == plain_inputs.size());
        for (std::size_t k = 0; k < plain_inputs.size(); ++k)
            CHECK(mirror_inputs[k] == -plain_inputs[k]);
    }
}

TEST_CASE("a broken equivalence oracle is reported, not believed") {
    PiecewiseFunction g1 = testutil::gamma1();
    MembershipOracle mq([g1](const Rational& q) { return g1.evaluate(q); });
    EquivalenceOracle lying_eq([](const PiecewiseFunction&) -> std::optional<Rational> {
        return Rational(0, 1);  // always claims 0 disagrees
    });
    CHECK_THROWS_AS(learn(mq, lying_eq), TeacherInconsistency);
}

TEST_CASE("membership transcripts replay to the identical run") {
    PiecewiseFunction target = testutil::gamma1();
    auto teacher = make_simulated_teacher(target);
    std::map<std::string, Label> recorded;
    teacher.mq.set_transcript_sink(
        [&](const TranscriptEntry& t) { recorded[t.input] = t.output; });
    LearnerReport first = learn(teacher.mq, teacher.eq);

    MembershipOracle replay_mq([&recorded](const Rational& q) {
        auto it = recorded.find(q.to_string());
        REQUIRE(it != recorded.end());
        return it->second;
    });
    auto fresh = make_simulated_teacher(target);
    LearnerReport second = learn(replay_mq, fresh.eq);
    CHECK(second.result == first.result);
    CHECK(second.mq_count == first.mq_count);
    CHECK(second.eq_count == first.eq_count);
}
