#pragma once

#include "sblearn/piecewise.hpp"

#include <random>
#include <set>
#include <vector>

namespace sblearn {

inline Int random_bits(std::mt19937_64& rng, unsigned bits) {
    Int x = 0;
    for (unsigned i = 0; i < bits; i += 32) {
        x <<= 32;
        x += static_cast<std::uint32_t>(rng());
    }
    return x & ((Int(1) << bits) - 1);
}

inline Rational random_rational(std::mt19937_64& rng, unsigned max_bits,
                                bool allow_negative = true) {
    while (true) {
        Int num = random_bits(rng, 1 + static_cast<unsigned>(rng() % max_bits));
        Int den = random_bits(rng, 1 + static_cast<unsigned>(rng() % max_bits));
        if (den == 0)
            continue;
        if (allow_negative && (rng() & 1))
            num = -num;
        return Rational(std::move(num), std::move(den));
    }
}

inline SbEncoding random_encoding(std::mt19937_64& rng, unsigned max_runs,
                                  unsigned max_run_bits) {
    SbEncoding enc;
    enc.sign = (rng() & 1) ? 1 : -1;
    unsigned n = 1 + static_cast<unsigned>(rng() % max_runs);
    for (unsigned i = 0; i < n; ++i)
        enc.runs.push_back(1 +
                           random_bits(rng, 1 + static_cast<unsigned>(rng() % max_run_bits)));
    return enc;
}

namespace detail {

inline std::vector<Label> default_alphabet(unsigned size) {
    std::vector<Label> out;
    for (unsigned i = 0; i < size; ++i)
        out.emplace_back(1, static_cast<char>('A' + i));
    return out;
}

inline PiecewiseFunction piecewise_from_cuts(std::mt19937_64& rng,
                                             const std::set<Rational>& cuts,
                                             unsigned alphabet_size) {
    std::vector<Label> alphabet = default_alphabet(alphabet_size);
    std::vector<Piece> out;
    Rational left = Rational::neg_infinity();
    bool left_closed = false;
    Label prev;
    auto pick = [&](const Label& avoid) {
        Label label = alphabet[rng() % alphabet.size()];
        while (label == avoid)
            label = alphabet[rng() % alphabet.size()];
        return label;
    };
    for (const Rational& cut : cuts) {
        bool hi_closed = rng() & 1;
        Label label = pick(prev);
        out.push_back({Interval(left, cut, left_closed, hi_closed), label});
        prev = label;
        left = cut;
        left_closed = !hi_closed;
    }
    out.push_back({Interval(left, Rational::infinity(), left_closed, false), pick(prev)});
    return PiecewiseFunction(std::move(out));
}

}  // namespace detail

/// Random canonical piecewise function whose endpoints decode random
/// run-length encodings, so both shallow and deep tree positions occur.
inline PiecewiseFunction random_piecewise(std::mt19937_64& rng, unsigned max_pieces = 32,
                                          unsigned max_runs = 8, unsigned max_run_bits = 16,
                                          unsigned alphabet_size = 2) {
    unsigned pieces = 1 + static_cast<unsigned>(rng() % max_pieces);
    std::set<Rational> cuts;
    while (cuts.size() < pieces - 1)
        cuts.insert(sb_decode(random_encoding(rng, max_runs, max_run_bits)));
    return detail::piecewise_from_cuts(rng, cuts, alphabet_size);
}

/// Random canonical piecewise function with an exact piece count and plain
/// random endpoints of bounded bit size; the benchmark sweeps use this.
inline PiecewiseFunction random_piecewise_exact(std::mt19937_64& rng, unsigned pieces,
                                                unsigned endpoint_bits,
                                                unsigned alphabet_size = 2) {
    std::set<Rational> cuts;
    while (cuts.size() < pieces - 1)
        cuts.insert(random_rational(rng, endpoint_bits));
    return detail::piecewise_from_cuts(rng, cuts, alphabet_size);
}

}  // namespace sblearn
