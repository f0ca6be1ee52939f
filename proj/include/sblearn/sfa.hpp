#pragma once

#include "sblearn/piecewise.hpp"
#include "sblearn/teacher.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sblearn {

using State = std::string;
using Word = std::vector<Rational>;

inline std::string word_to_string(const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i)
            s += ' ';
        s += w[i].to_string();
    }
    return s;
}

/// Deterministic, total symbolic automaton: per state one interval partition
/// of the rationals whose labels name the successor states.
class Sfa {
  public:
    Sfa(std::vector<State> states, State initial, std::set<State> finals,
        std::map<State, PiecewiseFunction> guards)
        : states_(std::move(states)),
          initial_(std::move(initial)),
          finals_(std::move(finals)),
          guards_(std::move(guards)) {
        validate();
    }

    const std::vector<State>& states() const { return states_; }
    const State& initial() const { return initial_; }
    const std::set<State>& finals() const { return finals_; }
    bool is_final(const State& s) const { return finals_.count(s) > 0; }
    const PiecewiseFunction& guard(const State& s) const { return guards_.at(s); }
    const std::map<State, PiecewiseFunction>& guards() const { return guards_; }

    const State& step(const State& s, const Rational& symbol) const {
        return guard(s).evaluate(symbol);
    }

  private:
    std::vector<State> states_;
    State initial_;
    std::set<State> finals_;
    std::map<State, PiecewiseFunction> guards_;

    void validate() const {
        std::set<State> known(states_.begin(), states_.end());
        if (known.size() != states_.size())
            throw std::invalid_argument("sfa: duplicate state names");
        if (!known.count(initial_))
            throw std::invalid_argument("sfa: unknown initial state");
        for (const State& f : finals_)
            if (!known.count(f))
                throw std::invalid_argument("sfa: unknown final state " + f);
        for (const State& s : states_) {
            auto it = guards_.find(s);
            if (it == guards_.end())
                throw std::invalid_argument("sfa: state without guard partition: " + s);
            for (const Piece& p : it->second.pieces())
                if (!known.count(p.label))
                    throw std::invalid_argument("sfa: guard of " + s +
                                                " targets unknown state " + p.label);
        }
        if (guards_.size() != states_.size())
            throw std::invalid_argument("sfa: guard for unknown state");
    }
};

struct RunResult {
    bool accepted = false;
    std::vector<State> visited;  // includes the initial state
};

inline RunResult run(const Sfa& a, const Word& w) {
    RunResult res;
    State current = a.initial();
    res.visited.push_back(current);
    for (const Rational& symbol : w) {
        if (symbol.is_infinite())
            throw std::invalid_argument("run: word symbols must be finite");
        current = a.step(current, symbol);
        res.visited.push_back(current);
    }
    res.accepted = a.is_final(current);
    return res;
}

enum class Combine { difference, intersection, set_union };

namespace detail {

struct RefinedCell {
    Interval interval;
    Label first;
    Label second;
};

// Common refinement of two partitions: the maximal cells on which both
// functions are constant, with the pair of labels.
inline std::vector<RefinedCell> refine_partitions(const PiecewiseFunction& f,
                                                  const PiecewiseFunction& g) {
    std::vector<RefinedCell> out;
    std::size_t i = 0, j = 0;
    Rational left = Rational::neg_infinity();
    bool left_closed = false;
    while (i < f.pieces().size() && j < g.pieces().size()) {
        const Interval& fi = f.pieces()[i].interval;
        const Interval& gj = g.pieces()[j].interval;
        // earlier end boundary: (v, open) ends before (v, closed)
        bool f_ends_last = gj.hi < fi.hi || (fi.hi == gj.hi && fi.hi_closed && !gj.hi_closed);
        bool g_ends_last = fi.hi < gj.hi || (fi.hi == gj.hi && !fi.hi_closed && gj.hi_closed);
        const Interval& end = f_ends_last ? gj : fi;
        out.push_back({Interval(left, end.hi, left_closed, end.hi_closed), f.pieces()[i].label,
                       g.pieces()[j].label});
        left = end.hi;
        left_closed = !end.hi_closed;
        if (!f_ends_last)
            ++i;
        if (!g_ends_last)
            ++j;
    }
    return out;
}

}  // namespace detail

/// Pair-state product; per pair state the guard partition is the common
/// refinement of the component partitions.  Only reachable pairs are built.
inline Sfa product(const Sfa& a, const Sfa& b, Combine mode) {
    auto pair_name = [](const State& s, const State& t) { return "(" + s + "," + t + ")"; };
    std::vector<State> states;
    std::set<State> finals;
    std::map<State, PiecewiseFunction> guards;
    std::set<std::pair<State, State>> seen;
    std::deque<std::pair<State, State>> frontier;

    auto accepts = [&](bool fa, bool fb) {
        switch (mode) {
            case Combine::difference: return fa != fb;
            case Combine::intersection: return fa && fb;
            case Combine::set_union: return fa || fb;
        }
        return false;
    };

    frontier.emplace_back(a.initial(), b.initial());
    seen.insert(frontier.front());
    while (!frontier.empty()) {
        auto [s, t] = frontier.front();
        frontier.pop_front();
        State name = pair_name(s, t);
        states.push_back(name);
        if (accepts(a.is_final(s), b.is_final(t)))
            finals.insert(name);
        std::vector<Piece> pieces;
        for (detail::RefinedCell& cell : detail::refine_partitions(a.guard(s), b.guard(t))) {
            std::pair<State, State> succ{cell.first, cell.second};
            pieces.push_back({std::move(cell.interval), pair_name(succ.first, succ.second)});
            if (seen.insert(succ).second)
                frontier.push_back(std::move(succ));
        }
        guards.emplace(std::move(name), PiecewiseFunction(std::move(pieces)).canonicalize());
    }
    return Sfa(std::move(states), pair_name(a.initial(), b.initial()), std::move(finals),
               std::move(guards));
}

/// Shortest accepted word, or nothing when the language is empty.  Each
/// step takes the simplest rational of one satisfying guard cell; among
/// cells reaching the same new state the shallowest representative wins.
inline std::optional<Word> find_accepted_word(const Sfa& a) {
    struct Arrival {
        State from;
        Rational symbol;
    };
    std::map<State, Arrival> arrivals;
    std::deque<State> frontier;
    frontier.push_back(a.initial());
    std::set<State> seen{a.initial()};

    // the initial state never receives an arrival, so the chain is finite
    auto build_word = [&](State s) {
        Word w;
        while (s != a.initial()) {
            const Arrival& arr = arrivals.at(s);
            w.push_back(arr.symbol);
            s = arr.from;
        }
        std::reverse(w.begin(), w.end());
        return w;
    };

    if (a.is_final(a.initial()))
        return Word{};
    while (!frontier.empty()) {
        State s = frontier.front();
        frontier.pop_front();
        // best representative per successor: smallest tree depth, then value
        std::map<State, Rational> reps;
        for (const Piece& p : a.guard(s).pieces()) {
            Rational rep = simplest_rational_in(p.interval);
            auto it = reps.find(p.label);
            if (it == reps.end()) {
                reps.emplace(p.label, std::move(rep));
                continue;
            }
            Int da = sb_depth(rep), db = sb_depth(it->second);
            if (da < db || (da == db && rep < it->second))
                it->second = std::move(rep);
        }
        for (auto& [succ, rep] : reps) {
            if (!seen.insert(succ).second)
                continue;
            arrivals.emplace(succ, Arrival{s, rep});
            if (a.is_final(succ))
                return build_word(succ);
            frontier.push_back(succ);
        }
    }
    return std::nullopt;
}

/// Word-level membership oracle with a query counter.
class WordOracle {
  public:
    using Fn = std::function<bool(const Word&)>;

    explicit WordOracle(Fn fn) : fn_(std::move(fn)) {}

    bool operator()(const Word& w) {
        ++count_;
        bool out = fn_(w);
        if (sink_)
            sink_({"word_mq", word_to_string(w), out ? "true" : "false"});
        return out;
    }

    std::size_t count() const { return count_; }
    void set_transcript_sink(TranscriptSink sink) { sink_ = std::move(sink); }

  private:
    Fn fn_;
    std::size_t count_ = 0;
    TranscriptSink sink_;
};

class SfaEquivalenceOracle {
  public:
    using Fn = std::function<std::optional<Word>(const Sfa&)>;

    explicit SfaEquivalenceOracle(Fn fn) : fn_(std::move(fn)) {}

    std::optional<Word> operator()(const Sfa& hypothesis) {
        ++count_;
        auto out = fn_(hypothesis);
        if (sink_)
            sink_({"sfa_eq", "", out ? word_to_string(*out) : "equal"});
        return out;
    }

    std::size_t count() const { return count_; }
    void set_transcript_sink(TranscriptSink sink) { sink_ = std::move(sink); }

  private:
    Fn fn_;
    std::size_t count_ = 0;
    TranscriptSink sink_;
};

struct SfaTeacher {
    WordOracle mq;
    SfaEquivalenceOracle eq;
};

/// Oracle pair for a hidden automaton: membership runs the target, and
/// equivalence searches the symmetric-difference product for an accepted
/// word.
inline SfaTeacher make_sfa_teacher(Sfa target) {
    auto shared = std::make_shared<Sfa>(std::move(target));
    WordOracle mq([shared](const Word& w) { return run(*shared, w).accepted; });
    SfaEquivalenceOracle eq([shared](const Sfa& hyp) -> std::optional<Word> {
        std::optional<Word> witness = find_accepted_word(product(*shared, hyp, Combine::difference));
        if (witness && run(*shared, *witness).accepted == run(hyp, *witness).accepted)
            throw TeacherInconsistency("sfa teacher picked a non-counterexample");
        return witness;
    });
    return {std::move(mq), std::move(eq)};
}

/// One interval as an inequality shorthand over x.
inline std::string interval_formula(const Interval& iv) {
    if (iv.lo.is_infinite() && iv.hi.is_infinite())
        return "true";
    if (iv.lo.is_infinite())
        return "x " + std::string(iv.hi_closed ? "<=" : "<") + " " + iv.hi.to_string();
    if (iv.hi.is_infinite())
        return "x " + std::string(iv.lo_closed ? ">=" : ">") + " " + iv.lo.to_string();
    return iv.lo.to_string() + std::string(iv.lo_closed ? " <= x " : " < x ") +
           std::string(iv.hi_closed ? "<= " : "< ") + iv.hi.to_string();
}

/// Disjunction of the guard cells of one state that lead to the successor.
inline std::string guard_formula(const PiecewiseFunction& guard, const State& successor) {
    std::string out;
    for (const Piece& p : guard.pieces()) {
        if (p.label != successor)
            continue;
        if (!out.empty())
            out += " | ";
        out += interval_formula(p.interval);
    }
    return out;
}

inline std::string to_dot(const Sfa& a) {
    std::string out = "digraph sfa {\n  rankdir=LR;\n  __start [shape=point];\n";
    for (const State& s : a.states())
        out += "  \"" + s + "\" [shape=" + (a.is_final(s) ? "doublecircle" : "circle") + "];\n";
    out += "  __start -> \"" + a.initial() + "\";\n";
    for (const State& s : a.states()) {
        std::set<State> successors;
        for (const Piece& p : a.guard(s).pieces())
            successors.insert(p.label);
        for (const State& t : successors)
            out += "  \"" + s + "\" -> \"" + t + "\" [label=\"" +
                   guard_formula(a.guard(s), t) + "\"];\n";
    }
    out += "}\n";
    return out;
}

}  // namespace sblearn
