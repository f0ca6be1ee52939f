#pragma once

#include "sblearn/learner.hpp"
#include "sblearn/sfa_learner.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace sblearn {

using Json = nlohmann::json;

// Rationals travel as decimal strings so no precision is lost.

inline Json to_json(const Rational& q) {
    return Json{{"num", q.num().str()}, {"den", q.den().str()}};
}

inline Rational rational_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("num") || !j.contains("den") || !j["num"].is_string() ||
        !j["den"].is_string())
        throw std::invalid_argument(R"(rational json: expected {"num": "...", "den": "..."})");
    try {
        return Rational(Int(j["num"].get<std::string>()), Int(j["den"].get<std::string>()));
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("rational json: num/den must be decimal integers");
    }
}

inline Json to_json(const PiecewiseFunction& f) {
    Json pieces = Json::array();
    for (const Piece& p : f.pieces())
        pieces.push_back(Json{{"lo", to_json(p.interval.lo)},
                              {"hi", to_json(p.interval.hi)},
                              {"lo_closed", p.interval.lo_closed},
                              {"hi_closed", p.interval.hi_closed},
                              {"label", p.label}});
    return Json{{"pieces", std::move(pieces)}};
}

inline PiecewiseFunction piecewise_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("pieces") || !j["pieces"].is_array())
        throw std::invalid_argument(R"(piecewise json: expected {"pieces": [...]})");
    std::vector<Piece> pieces;
    for (const Json& pj : j["pieces"]) {
        if (!pj.is_object() || !pj.contains("lo") || !pj.contains("hi") ||
            !pj.contains("lo_closed") || !pj.contains("hi_closed") || !pj.contains("label") ||
            !pj["lo_closed"].is_boolean() || !pj["hi_closed"].is_boolean() ||
            !pj["label"].is_string())
            throw std::invalid_argument("piecewise json: malformed piece");
        pieces.push_back({Interval(rational_from_json(pj["lo"]), rational_from_json(pj["hi"]),
                                   pj["lo_closed"].get<bool>(), pj["hi_closed"].get<bool>()),
                          pj["label"].get<std::string>()});
    }
    return PiecewiseFunction(std::move(pieces));  // validates the partition
}

inline Json to_json(const Sfa& a) {
    Json guards = Json::object();
    for (const auto& [state, guard] : a.guards())
        guards[state] = to_json(guard);
    return Json{{"states", a.states()},
                {"initial", a.initial()},
                {"finals", a.finals()},
                {"guards", std::move(guards)}};
}

inline Sfa sfa_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("states") || !j.contains("initial") ||
        !j.contains("finals") || !j.contains("guards") || !j["states"].is_array() ||
        !j["initial"].is_string() || !j["finals"].is_array() || !j["guards"].is_object())
        throw std::invalid_argument(
            R"(sfa json: expected {"states", "initial", "finals", "guards"})");
    std::vector<State> states = j["states"].get<std::vector<State>>();
    std::set<State> finals;
    for (const Json& f : j["finals"])
        finals.insert(f.get<State>());
    std::map<State, PiecewiseFunction> guards;
    for (const auto& [state, gj] : j["guards"].items())
        guards.emplace(state, piecewise_from_json(gj));
    return Sfa(std::move(states), j["initial"].get<State>(), std::move(finals),
               std::move(guards));
}

inline Json to_json(const LearnerReport& r) {
    return Json{{"mq", r.mq_count},
                {"eq", r.eq_count},
                {"break_links_found", r.break_links_found},
                {"iterations", r.iterations},
                {"result", to_json(r.result)}};
}

inline Json to_json(const SfaLearnerReport& r) {
    return Json{{"word_mq", r.word_mq_count},
                {"sfa_eq", r.sfa_eq_count},
                {"counterexample_rounds", r.counterexample_rounds},
                {"inner_mq", r.inner_mq_counts},
                {"result", to_json(r.result)}};
}

inline Json to_json(const TranscriptEntry& t) {
    return Json{{"kind", t.kind}, {"input", t.input}, {"output", t.output}};
}

inline Word word_from_json(const Json& j) {
    if (!j.is_array())
        throw std::invalid_argument("word json: expected an array of rationals");
    Word w;
    for (const Json& q : j)
        w.push_back(rational_from_json(q));
    return w;
}

inline Json to_json(const Word& w) {
    Json out = Json::array();
    for (const Rational& q : w)
        out.push_back(to_json(q));
    return out;
}

}  // namespace sblearn
