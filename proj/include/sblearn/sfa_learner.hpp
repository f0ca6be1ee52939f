#pragma once

#include "sblearn/learner.hpp"
#include "sblearn/sfa.hpp"

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sblearn {

struct SfaLearnerReport {
    Sfa result;
    std::size_t word_mq_count = 0;
    std::size_t sfa_eq_count = 0;
    std::size_t counterexample_rounds = 0;
    std::map<State, std::size_t> inner_mq_counts;  // rational-level queries per state
};

namespace detail {

/// Binary search for adjacent split points i, i+1 with g(i) != g(i+1),
/// given g(0) != g(n) where g(n) is known to the caller and never
/// evaluated here.  Uses 1 + ceil(log2 n) evaluations of g.
template <typename G>
std::size_t rs_split(std::size_t n, G&& g) {
    std::size_t lo = 0, hi = n;
    const bool g0 = g(0);
    while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (g(mid) == g0)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

/// Observation-table learner for deterministic SFAs.  Rows are access
/// words, columns are distinguishing suffixes, and each state's guard is
/// maintained by the piecewise learner over the evidence rationals, with
/// its equivalence side deferred to the outer automaton counterexamples.
class SfaLearnSession {
  public:
    SfaLearnSession(WordOracle& mq, SfaEquivalenceOracle& eq) : mq_(mq), eq_(eq) {
        suffixes_.push_back({});  // the empty suffix
        add_access_word({});
    }

    SfaLearnerReport run() {
        const std::size_t mq_base = mq_.count();
        const std::size_t eq_base = eq_.count();
        std::size_t rounds = 0;
        while (true) {
            synthesize();
            Sfa hypothesis = build_hypothesis();
            std::optional<Word> counterexample = eq_(hypothesis);
            if (!counterexample) {
                SfaLearnerReport report{std::move(hypothesis), mq_.count() - mq_base,
                                        eq_.count() - eq_base, rounds, {}};
                for (std::size_t i = 0; i < access_.size(); ++i)
                    report.inner_mq_counts[state_name(i)] = inner_counts_[i];
                return report;
            }
            ++rounds;
            process_counterexample(*counterexample, hypothesis);
        }
    }

    // table inspection for the test suite
    const std::deque<Word>& access_words() const { return access_; }
    const std::vector<Word>& suffixes() const { return suffixes_; }
    const std::deque<std::set<Rational>>& evidence() const { return evidence_; }

    bool table_is_reduced() {
        for (std::size_t i = 0; i < access_.size(); ++i)
            for (std::size_t j = i + 1; j < access_.size(); ++j)
                if (row_of(access_[i]) == row_of(access_[j]))
                    return false;
        return true;
    }

    bool table_is_closed() {
        for (std::size_t i = 0; i < access_.size(); ++i)
            for (const Rational& v : evidence_[i])
                if (!find_row(row_of(extend(access_[i], v))))
                    return false;
        return true;
    }

    bool table_is_prefix_closed() const {
        std::set<std::string> keys;
        for (const Word& u : access_)
            keys.insert(word_to_string(u));
        for (Word u : access_) {
            while (!u.empty()) {
                u.pop_back();
                if (!keys.count(word_to_string(u)))
                    return false;
            }
        }
        return true;
    }

    void set_observer(std::function<void(const Sfa&)> on_hypothesis) {
        on_hypothesis_ = std::move(on_hypothesis);
    }

  private:
    WordOracle& mq_;
    SfaEquivalenceOracle& eq_;
    std::deque<Word> access_;                  // prefix-closed, one per distinct row
    std::vector<Word> suffixes_;               // column words; index 0 is the empty word
    std::deque<std::set<Rational>> evidence_;  // observed one-step extensions per access word
    std::deque<BreakLinkStore> stores_;        // inner learner state per access word
    std::deque<std::size_t> inner_counts_;
    std::map<std::string, bool> cells_;        // word -> target membership
    std::function<void(const Sfa&)> on_hypothesis_;

    static State state_name(std::size_t i) { return "s" + std::to_string(i); }

    static Word extend(const Word& w, const Rational& q) {
        Word out = w;
        out.push_back(q);
        return out;
    }

    static Word concat(const Word& a, const Word& b) {
        Word out = a;
        out.insert(out.end(), b.begin(), b.end());
        return out;
    }

    bool cell(const Word& w) {
        std::string key = word_to_string(w);
        auto it = cells_.find(key);
        if (it == cells_.end())
            it = cells_.emplace(std::move(key), mq_(w)).first;
        return it->second;
    }

    std::vector<bool> row_of(const Word& w) {
        std::vector<bool> row;
        row.reserve(suffixes_.size());
        for (const Word& e : suffixes_)
            row.push_back(cell(concat(w, e)));
        return row;
    }

    std::optional<std::size_t> find_row(const std::vector<bool>& row) {
        for (std::size_t i = 0; i < access_.size(); ++i)
            if (row_of(access_[i]) == row)
                return i;
        return std::nullopt;
    }

    std::size_t add_access_word(Word w) {
        access_.push_back(std::move(w));
        evidence_.push_back({Rational(0, 1)});
        stores_.push_back({});
        inner_counts_.push_back(0);
        return access_.size() - 1;
    }

    // The inner concept for state i maps a rational to the state of the
    // one-step extension.  Unseen rows become new access words on the spot.
    std::size_t state_of(const Word& w) {
        std::vector<bool> row = row_of(w);
        if (auto i = find_row(row))
            return *i;
        return add_access_word(w);
    }

    MembershipOracle inner_oracle(std::size_t i) {
        return MembershipOracle([this, i](const Rational& q) {
            ++inner_counts_[i];
            return state_name(state_of(extend(access_[i], q)));
        });
    }

    // Closure plus per-state guard consistency, to a fixpoint.  Inner break
    // link hunts may create states; the loops re-read the sizes.
    void synthesize() {
        while (true) {
            bool changed = false;
            for (std::size_t i = 0; i < access_.size(); ++i) {
                std::size_t before = access_.size();
                for (const Rational& v : evidence_[i])
                    state_of(extend(access_[i], v));
                if (access_.size() != before)
                    changed = true;
            }
            for (std::size_t i = 0; i < access_.size(); ++i)
                if (settle_guard(i))
                    changed = true;
            if (!changed)
                return;
        }
    }

    // Replays the state's evidence through the piecewise learner until the
    // guard classifies all of it correctly.  Returns whether anything moved.
    bool settle_guard(std::size_t i) {
        bool changed = false;
        MembershipOracle imq = inner_oracle(i);
        if (stores_[i].empty()) {
            const Rational root(0, 1);
            stores_[i].insert(root, imq(root));
            changed = true;
        }
        bool settled = false;
        while (!settled) {
            settled = true;
            PiecewiseFunction guard = construct_representation(stores_[i]);
            for (const Rational& v : evidence_[i]) {
                Label want = state_name(state_of(extend(access_[i], v)));
                if (guard.evaluate(v) == want)
                    continue;
                // Algorithm 2's counterexample step with q* = v
                std::size_t size_before = stores_[i].size();
                Rational origin = find_closest_ancestor(v, stores_[i]);
                TreeEdge edge = find_break_link(origin, v, stores_[i], imq);
                for (const Rational& endpoint : {edge.first, edge.second})
                    if (!stores_[i].contains(endpoint))
                        stores_[i].insert(endpoint, imq(endpoint));
                if (stores_[i].size() == size_before)
                    throw TeacherInconsistency("sfa learner: guard refinement stalled");
                changed = true;
                settled = false;
                break;
            }
        }
        return changed;
    }

    Sfa build_hypothesis() {
        std::vector<State> states;
        std::set<State> finals;
        std::map<State, PiecewiseFunction> guards;
        for (std::size_t i = 0; i < access_.size(); ++i) {
            states.push_back(state_name(i));
            if (cell(access_[i]))
                finals.insert(state_name(i));
            guards.emplace(state_name(i), construct_representation(stores_[i]).canonicalize());
        }
        Sfa hyp(std::move(states), state_name(0), std::move(finals), std::move(guards));
        if (on_hypothesis_)
            on_hypothesis_(hyp);
        return hyp;
    }

    // Rivest-Schapire prefix split: O(log |w|) word queries find adjacent
    // split points whose access-word substitutions behave differently, then
    // the mismatch becomes either a new column or a new evidence rational.
    void process_counterexample(const Word& w, const Sfa& hypothesis) {
        if (w.empty())
            throw TeacherInconsistency("sfa learner: empty counterexample");
        std::map<State, std::size_t> index_of;
        for (std::size_t i = 0; i < access_.size(); ++i)
            index_of[state_name(i)] = i;
        RunResult trace = run(hypothesis, w);
        if (trace.accepted == cell(w))
            throw std::invalid_argument("process_counterexample: word is not a counterexample");

        auto g = [&](std::size_t i) {
            const Word& alpha = access_[index_of.at(trace.visited[i])];
            return cell(concat(alpha, Word(w.begin() + static_cast<std::ptrdiff_t>(i), w.end())));
        };
        std::size_t split = rs_split(w.size(), g);

        std::size_t u = index_of.at(trace.visited[split]);
        std::size_t u_next = index_of.at(trace.visited[split + 1]);
        const Rational& symbol = w[split];
        Word extension = extend(access_[u], symbol);
        if (auto resolved = find_row(row_of(extension)); resolved && *resolved == u_next) {
            // same row, different behavior on the tail: a new column splits it
            Word suffix(w.begin() + static_cast<std::ptrdiff_t>(split) + 1, w.end());
            for (const Word& existing : suffixes_)
                if (existing == suffix)
                    throw TeacherInconsistency("sfa learner: duplicate distinguishing suffix");
            suffixes_.push_back(std::move(suffix));
            for (auto& store : stores_)
                store = BreakLinkStore();  // labels must be re-resolved under the new rows
        }
        evidence_[u].insert(symbol);
    }
};

}  // namespace detail

/// Learns a deterministic SFA from the word-level membership oracle and the
/// automaton-level equivalence oracle; the returned automaton was certified
/// equal by the final equivalence query.
inline SfaLearnerReport learn_sfa(WordOracle& mq, SfaEquivalenceOracle& eq) {
    detail::SfaLearnSession session(mq, eq);
    return session.run();
}

}  // namespace sblearn
