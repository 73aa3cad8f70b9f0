// Explicit finite structures and a naive model checker for FO+∃∞.
#ifndef AUTOSTRUCT_TESTS_FO_ORACLE_HPP
#define AUTOSTRUCT_TESTS_FO_ORACLE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "autostruct/fo.hpp"
#include "oracles.hpp"

namespace oracle {

using autostruct::Formula;
using autostruct::LetterId;
using autostruct::Presentation;
using autostruct::Relation;
using autostruct::kPad;
using autostruct::AlphabetOrder;
using autostruct::intern;

struct FinitePres {
    std::vector<std::string> dom;
    std::set<std::pair<std::string, std::string>> r;
    std::set<std::string> u;
    Presentation p;
};

inline FinitePres random_finite(std::mt19937& rng) {
    std::vector<std::string> pool{"", "a", "b", "aa", "ab", "ba", "bb", "aaa", "aab", "aba", "abb", "baa", "bab", "bba", "bbb"};
    std::shuffle(pool.begin(), pool.end(), rng);
    std::uniform_int_distribution<std::size_t> size(1, 12);
    std::bernoulli_distribution edge(0.3), mark(0.5);
    FinitePres f;
    f.dom.assign(pool.begin(), pool.begin() + static_cast<long>(size(rng)));
    std::vector<Word> dw;
    std::vector<std::vector<Word>> rt, ut;
    for (const auto& x : f.dom) {
        dw.push_back(autostruct::chars_word(x));
        if (mark(rng)) f.u.insert(x), ut.push_back({autostruct::chars_word(x)});
        for (const auto& y : f.dom)
            if (edge(rng)) f.r.insert({x, y}), rt.push_back({autostruct::chars_word(x), autostruct::chars_word(y)});
    }
    f.p.order = AlphabetOrder({"a", "b"});
    f.p.domain = oracle::word_set_automaton(std::vector<Symbol>{Symbol::base("a"), Symbol::base("b")}, dw);
    f.p.relations["R"] = Relation{2, oracle::tuple_set_automaton(rt, 2)};
    f.p.relations["U"] = Relation{1, oracle::tuple_set_automaton(ut, 1)};
    return f;
}

// Naive model checking over an explicit finite structure.
inline bool holds(const FinitePres& m, const Formula& f, std::map<std::string, std::string>& env) {
    using K = Formula::Kind;
    auto llex_le = [](const std::string& x, const std::string& y) { return x.size() < y.size() || (x.size() == y.size() && x <= y); };
    switch (f.kind) {
        case K::True:
            return true;
        case K::False:
            return false;
        case K::Eq:
            return env.at(f.args[0]) == env.at(f.args[1]);
        case K::Atom: {
            const auto& x = env.at(f.args[0]);
            if (f.name == "U") return m.u.count(x) > 0;
            const auto& y = env.at(f.args[1]);
            if (f.name == "R") return m.r.count({x, y}) > 0;
            if (f.name == "lex") return x <= y;
            return llex_le(x, y);
        }
        case K::Not:
            return !holds(m, f.kids[0], env);
        case K::And:
            for (const auto& k : f.kids)
                if (!holds(m, k, env)) return false;
            return true;
        case K::Or:
            for (const auto& k : f.kids)
                if (holds(m, k, env)) return true;
            return false;
        case K::Implies:
            return !holds(m, f.kids[0], env) || holds(m, f.kids[1], env);
        case K::ExistsInf:
            return false;
        case K::Exists:
        case K::Forall: {
            auto saved = env.find(f.name) != env.end() ? std::optional<std::string>(env[f.name]) : std::nullopt;
            bool want = f.kind == K::Exists;
            bool result = !want;
            for (const auto& d : m.dom) {
                env[f.name] = d;
                if (holds(m, f.kids[0], env) == want) {
                    result = want;
                    break;
                }
            }
            if (saved) env[f.name] = *saved;
            else env.erase(f.name);
            return result;
        }
    }
    return false;
}

inline const std::vector<std::string> kSuite{
    "(R x y)",
    "(exists y (R x y))",
    "(forall y (R x y))",
    "(exists x (forall y (or (R x y) (= x y))))",
    "(exinf y (R x y))",
    "(not (exinf x (= x x)))",
    "(forall x (implies (U x) (exists y (and (R x y) (not (= x y))))))",
    "(and (lex x y) (not (llex x y)))",
    "(exists z (and (R x z) (R z y)))",
    "(forall x (forall y (implies (R x y) (R y x))))",
    "(exists x (exists y (exists z (and (R x y) (R y z) (not (R x z))))))",
    "(or (U x) (R x x))",
    "(implies (U x) (U y))",
    "(forall y (implies (llex y x) (U y)))",
    "(exists y (and (lex x y) (not (= x y)) (forall z (implies (R y z) (U z)))))",
    "(not (exists y (R y x)))",
    "(and (R x y) (R y x) (not (= x y)))",
    "(exists y (or (R x y) (exinf z (R y z))))",
    "(forall x (exists y (llex x y)))",
    "(and (U x) (not (U x)))",
};

inline std::vector<std::string> sorted_free(const Formula& f) {
    auto s = f.free_vars();
    return {s.begin(), s.end()};
}

// Does x have some y with R(x, y) and |y| in (|x| + n, |x| + 2n]?  Explicit layered search.
inline bool pumping_window(const Nfa& r, const std::string& x) {
    std::size_t n = r.states, lo = x.size() + n, hi = x.size() + 2 * n;
    auto fin = r.final_mask();
    std::set<State> cur(r.initial.begin(), r.initial.end());
    for (std::size_t i = 0; i < hi && !cur.empty(); ++i) {
        LetterId xl = i < x.size() ? intern(std::string(1, x[i])) : kPad;
        std::set<State> next;
        for (const auto& t : r.transitions) {
            if (!cur.count(t.src)) continue;
            const auto& e = r.alphabet[t.sym].entries;
            if (e[0] == xl && e[1] != kPad) next.insert(t.dst);
        }
        cur.swap(next);
        if (i + 1 > lo)
            for (auto q : cur)
                if (fin[q]) return true;
    }
    return false;
}

}  // namespace oracle

#endif
