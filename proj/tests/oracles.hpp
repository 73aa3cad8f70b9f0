// Independent reference implementations used as test oracles.
#ifndef AUTOSTRUCT_TESTS_ORACLES_HPP
#define AUTOSTRUCT_TESTS_ORACLES_HPP

#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "autostruct/relations.hpp"

namespace oracle {

using autostruct::Nfa;
using autostruct::State;
using autostruct::Symbol;
using autostruct::Word;

// Counts accepting paths by explicit depth-first enumeration.
inline unsigned long long count_paths(const Nfa& a, const Word& w) {
    std::vector<long> idx;
    for (const auto& s : w) {
        long k = -1;
        for (std::size_t i = 0; i < a.alphabet.size(); ++i)
            if (a.alphabet[i] == s) k = static_cast<long>(i);
        idx.push_back(k);
    }
    std::set<State> fin(a.final.begin(), a.final.end());
    unsigned long long total = 0;
    std::function<void(State, std::size_t)> go = [&](State q, std::size_t pos) {
        if (pos == idx.size()) {
            if (fin.count(q)) ++total;
            return;
        }
        for (const auto& t : a.transitions)
            if (t.src == q && static_cast<long>(t.sym) == idx[pos]) go(t.dst, pos + 1);
    };
    for (auto i : a.initial) go(i, 0);
    return total;
}

inline std::vector<Word> all_words(const std::vector<Symbol>& letters, std::size_t max_len, std::size_t min_len = 0) {
    std::vector<Word> out;
    std::vector<Word> layer{Word{}};
    for (std::size_t n = 0; n <= max_len; ++n) {
        if (n >= min_len) out.insert(out.end(), layer.begin(), layer.end());
        std::vector<Word> next;
        for (const auto& w : layer)
            for (const auto& l : letters) {
                auto v = w;
                v.push_back(l);
                next.push_back(std::move(v));
            }
        layer.swap(next);
    }
    return out;
}

inline Nfa random_nfa(std::mt19937& rng, const std::vector<Symbol>& alphabet, std::size_t max_states,
                      double density = 0.3) {
    std::uniform_int_distribution<std::size_t> ns(1, max_states);
    std::bernoulli_distribution coin(density), half(0.4);
    Nfa a = Nfa::over(alphabet);
    a.states = ns(rng);
    for (State q = 0; q < a.states; ++q) {
        if (half(rng) || q == 0) a.initial.push_back(q);
        if (half(rng)) a.final.push_back(q);
        for (std::uint32_t s = 0; s < alphabet.size(); ++s)
            for (State d = 0; d < a.states; ++d)
                if (coin(rng)) a.transitions.push_back({q, s, d});
    }
    a.canonicalize();
    return a;
}

// Trie automaton accepting exactly the convolutions of the given tuples.
inline Nfa tuple_set_automaton(const std::vector<std::vector<Word>>& tuples, std::size_t arity) {
    Nfa a = Nfa::over_tuples(arity);
    a.initial = {a.add_state()};
    std::map<std::pair<State, Symbol>, State> next;
    for (const auto& t : tuples) {
        State q = 0;
        for (const auto& s : autostruct::convolution(t)) {
            auto it = next.find({q, s});
            if (it == next.end()) {
                State d = a.add_state();
                a.add_transition(q, s, d);
                it = next.emplace(std::make_pair(q, s), d).first;
            }
            q = it->second;
        }
        a.final.push_back(q);
    }
    a.canonicalize();
    return a;
}

inline Nfa word_set_automaton(const std::vector<Symbol>& alphabet, const std::vector<Word>& words) {
    Nfa a = Nfa::over(alphabet);
    a.initial = {a.add_state()};
    std::map<std::pair<State, Symbol>, State> next;
    for (const auto& w : words) {
        State q = 0;
        for (const auto& s : w) {
            auto it = next.find({q, s});
            if (it == next.end()) {
                State d = a.add_state();
                a.add_transition(q, s, d);
                it = next.emplace(std::make_pair(q, s), d).first;
            }
            q = it->second;
        }
        a.final.push_back(q);
    }
    a.canonicalize();
    return a;
}

}  // namespace oracle

#endif
