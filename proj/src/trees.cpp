#include "autostruct/trees.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "autostruct/equiv.hpp"

namespace autostruct {

namespace {

const std::string kE = "E";

Symbol flat_base(const Symbol& s) {
    if (!s.tuple) return s;
    if (s.arity() == 1) return Symbol::base_id(s.entries[0]);
    return flat_symbol(s);
}

LetterId flat_entries(const std::vector<LetterId>& e) {
    if (std::all_of(e.begin(), e.end(), [](LetterId l) { return l == kPad; })) return kPad;
    return flat_base(Symbol::make_tuple(e)).letter();
}

LetterId tuple_letter(LetterId a, LetterId b) { return flat_symbol(Symbol::make_tuple({a, b})).letter(); }

/// Same states, each symbol replaced by f(index, symbol); arity 0 gives a base automaton.
template <class F>
Nfa map_columns(const Nfa& a, std::size_t arity, F f) {
    Nfa r = arity == 0 ? Nfa::over({}) : Nfa::over_tuples(arity);
    SymbolIndexer sym(r);
    std::vector<SymIdx> to(a.alphabet.size());
    for (SymIdx i = 0; i < a.alphabet.size(); ++i) to[i] = sym(f(i, a.alphabet[i]));
    r.states = a.states;
    r.initial = a.initial;
    r.final = a.final;
    for (const auto& t : a.transitions) r.transitions.push_back({t.src, to[t.sym], t.dst});
    r.canonicalize();
    return r;
}

Nfa flat_lang(const Nfa& a) {
    return map_columns(a, 0, [](SymIdx, const Symbol& s) { return flat_base(s); });
}

Nfa conv_roots(std::size_t k, std::string_view letter) { return flat_lang(conv_plus_dfa(k, letter)); }

Nfa lift_one(const Nfa& base, std::string_view counter, std::size_t min_count) {
    return from_one_track(counter_lift(as_one_track(base), {true}, counter, min_count));
}

Nfa lift_target(const Nfa& r) { return counter_lift(r, {false, true}, "$", 0); }

Nfa pair_of(const Nfa& a, const Nfa& b) { return tracks_product({&a, &b}); }

Nfa unite_all(const std::vector<Nfa>& parts) {
    Nfa r = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) r = unite(r, parts[i]);
    return trim(r);
}

Nfa b_star() { return letters_star({Symbol::base("b")}, {Symbol::base("b")}); }
Nfa b_plus() { return letters_plus({Symbol::base("b")}, {Symbol::base("b")}); }
Nfa epsilon_only() { return epsilon_automaton({Symbol::base("b")}); }

/// {(a^c, a^{c x}) : c ∈ N+^k, x ∈ N+^{m-k}}.
Nfa prefix_relation(std::size_t k, std::size_t m) {
    return map_columns(conv_plus_dfa(m, "a"), 2, [k](SymIdx, const Symbol& s) {
        std::vector<LetterId> head(s.entries.begin(), s.entries.begin() + static_cast<std::ptrdiff_t>(k));
        return Symbol::make_tuple({flat_entries(head), flat_base(s).letter()});
    });
}

/// b^{e1} ⊗ b^{e2} with e1 != e2, both positive.
Nfa off_diagonal() {
    LetterId b = intern("b");
    Symbol bb = Symbol::base_id(tuple_letter(b, b)), b_ = Symbol::base_id(tuple_letter(b, kPad)),
           _b = Symbol::base_id(tuple_letter(kPad, b));
    Nfa r = Nfa::over({bb, b_, _b});
    r.states = 4;
    r.initial = {0};
    r.final = {2, 3};
    r.transitions = {{0, 0, 1}, {1, 0, 1}, {1, 1, 2}, {2, 1, 2}, {1, 2, 3}, {3, 2, 3}};
    r.canonicalize();
    return r;
}

/// {(b^m, (b,b)^e) : e > m >= 1}.
Nfa upper_diagonal() {
    LetterId b = intern("b");
    Nfa r = Nfa::over_tuples(2);
    Symbol both = Symbol::make_tuple({b, tuple_letter(b, b)}), tail = Symbol::make_tuple({kPad, tuple_letter(b, b)});
    r.states = 3;
    r.initial = {0};
    r.final = {2};
    r.add_transition(0, both, 1);
    r.add_transition(1, both, 1);
    r.add_transition(1, tail, 2);
    r.add_transition(2, tail, 2);
    r.canonicalize();
    return r;
}

/// {(b^m, ♯^x ⊗ ε) : 1 <= x < m}.
Nfa short_sharps() {
    LetterId b = intern("b");
    Nfa r = Nfa::over_tuples(2);
    r.states = 3;
    r.initial = {0};
    r.final = {2};
    Symbol both = Symbol::make_tuple({b, tuple_letter(intern("#"), kPad)}), tail = Symbol::make_tuple({b, kPad});
    r.add_transition(0, both, 1);
    r.add_transition(1, both, 1);
    r.add_transition(1, tail, 2);
    r.add_transition(2, tail, 2);
    r.canonicalize();
    return r;
}

/// Second-track moves for ♯1^i ♯2^{x-i} (i >= 1) while the x track runs.
/// Phases 0: nothing emitted, 1: inside ♯1, 2: inside ♯2.
std::vector<std::pair<LetterId, std::uint32_t>> leaf_moves(std::uint32_t phase, bool running) {
    LetterId s1 = intern("#1"), s2 = intern("#2");
    if (!running) {
        if (phase == 0) return {};
        return {{kPad, phase}};
    }
    if (phase == 0) return {{s1, 1}};
    if (phase == 1) return {{s1, 1}, {s2, 2}};
    return {{s2, 2}};
}

/// {(a^{c x y}, ♯1^i ♯2^{x-i}) : 1 <= i <= x}; x is track k of the (k+2)-tuples.
Nfa sharp_leaves_of_a(std::size_t k) {
    Nfa d = conv_plus_dfa(k + 2, "a");
    Nfa r = Nfa::over_tuples(2);
    r.states = d.states * 3;
    auto id = [](State s, std::uint32_t ph) { return s * 3 + ph; };
    for (auto i : d.initial) r.initial.push_back(id(i, 0));
    for (auto f : d.final)
        for (std::uint32_t ph : {1u, 2u}) r.final.push_back(id(f, ph));
    for (const auto& t : d.transitions) {
        const Symbol& s = d.alphabet[t.sym];
        LetterId first = flat_base(s).letter();
        for (std::uint32_t ph = 0; ph < 3; ++ph)
            for (const auto& [second, nph] : leaf_moves(ph, s.entries[k] != kPad))
                r.add_transition(id(t.src, ph), Symbol::make_tuple({first, second}), id(t.dst, nph));
    }
    r.canonicalize();
    return trim(r);
}

/// {(♯^x ⊗ b^m, ♯1^i ♯2^{x-i}) : x >= 1, m >= 0, 1 <= i <= x}.
Nfa sharp_leaves_of_sb() {
    LetterId sh = intern("#"), b = intern("b");
    Nfa r = Nfa::over_tuples(2);
    // State: leaf phase, whether ♯^x ended, whether b^m ended.
    auto id = [](std::uint32_t ph, std::uint32_t sdone, std::uint32_t bdone) { return (ph * 2 + sdone) * 2 + bdone; };
    r.states = 12;
    r.initial = {id(0, 0, 0)};
    for (std::uint32_t ph : {1u, 2u})
        for (std::uint32_t sd : {0u, 1u})
            for (std::uint32_t bd : {0u, 1u}) r.final.push_back(id(ph, sd, bd));
    for (std::uint32_t ph = 0; ph < 3; ++ph)
        for (std::uint32_t sd = 0; sd < 2; ++sd)
            for (std::uint32_t bd = 0; bd < 2; ++bd)
                for (LetterId sl : {sh, kPad})
                    for (LetterId bl : {b, kPad}) {
                        if ((sd && sl != kPad) || (bd && bl != kPad) || (sl == kPad && bl == kPad)) continue;
                        std::uint32_t nsd = sl == kPad ? 1 : 0, nbd = bl == kPad ? 1 : 0;
                        for (const auto& [second, nph] : leaf_moves(ph, sl != kPad))
                            r.add_transition(id(ph, sd, bd), Symbol::make_tuple({tuple_letter(sl, bl), second}),
                                             id(nph, nsd, nbd));
                    }
    r.canonicalize();
    return trim(r);
}

/// Splits a relation by whether its first track lies in b*.
Nfa first_track_in_bstar(const Nfa& r, bool inside) {
    LetterId b = intern("b");
    Nfa out = Nfa::over_tuples(r.arity);
    out.alphabet = r.alphabet;
    out.states = r.states * 2;
    for (auto i : r.initial) out.initial.push_back(i * 2);
    for (auto f : r.final) out.final.push_back(f * 2 + (inside ? 0 : 1));
    for (const auto& t : r.transitions) {
        LetterId l = r.alphabet[t.sym].entries[0];
        bool keeps = l == kPad || l == b;
        for (State fl = 0; fl < 2; ++fl) out.transitions.push_back({t.src * 2 + fl, t.sym, t.dst * 2 + (keeps ? fl : 1)});
    }
    out.canonicalize();
    return trim(out);
}

/// {x : ∃y r(x, y)} as a base automaton.
Nfa first_track(const Nfa& r) {
    Nfa out = Nfa::over({});
    SymbolIndexer sym(out);
    out.states = r.states;
    out.initial = r.initial;
    std::vector<bool> fin = r.final_mask();
    std::vector<std::vector<State>> back(r.states);
    for (const auto& t : r.transitions) {
        LetterId l = r.alphabet[t.sym].entries[0];
        if (l == kPad) back[t.dst].push_back(t.src);
        else out.transitions.push_back({t.src, sym(Symbol::base_id(l)), t.dst});
    }
    std::vector<State> stack;
    for (State s = 0; s < r.states; ++s)
        if (fin[s]) stack.push_back(s);
    while (!stack.empty()) {
        State s = stack.back();
        stack.pop_back();
        for (auto p : back[s])
            if (!fin[p]) fin[p] = true, stack.push_back(p);
    }
    for (State s = 0; s < r.states; ++s)
        if (fin[s]) out.final.push_back(s);
    out.canonicalize();
    return trim(out);
}

/// Pairs of r whose first component lies in L(a).
Nfa restrict_first(const Nfa& r, const Nfa& a) {
    Nfa out = Nfa::over_tuples(r.arity);
    out.alphabet = r.alphabet;
    std::unordered_map<LetterId, std::vector<std::pair<State, State>>> amoves;
    for (const auto& t : a.transitions) amoves[a.alphabet[t.sym].letter()].push_back({t.src, t.dst});
    auto ro = out_edges(r);
    auto rf = r.final_mask(), af = a.final_mask();
    std::unordered_map<std::uint64_t, State> ids;
    std::deque<std::pair<State, State>> work;
    auto get = [&](State q, State s) {
        std::uint64_t key = (static_cast<std::uint64_t>(q) << 32) | s;
        auto [it, fresh] = ids.emplace(key, static_cast<State>(out.states));
        if (fresh) {
            ++out.states;
            work.push_back({q, s});
            if (rf[q] && af[s]) out.final.push_back(it->second);
        }
        return it->second;
    };
    for (auto q : r.initial)
        for (auto s : a.initial) out.initial.push_back(get(q, s));
    while (!work.empty()) {
        auto [q, s] = work.front();
        work.pop_front();
        State from = ids[(static_cast<std::uint64_t>(q) << 32) | s];
        for (const auto& [sym, dst] : ro[q]) {
            LetterId l = r.alphabet[sym].entries[0];
            if (l == kPad) {
                out.transitions.push_back({from, sym, get(dst, s)});
                continue;
            }
            auto it = amoves.find(l);
            if (it == amoves.end()) continue;
            for (const auto& [as, ad] : it->second)
                if (as == s) out.transitions.push_back({from, sym, get(dst, ad)});
        }
    }
    out.canonicalize();
    return trim(out);
}

/// {(r, v) : v ∈ L(a)} for a one-letter word r.
Nfa edges_from_letter(LetterId r, const Nfa& a) {
    Nfa out = Nfa::over_tuples(2);
    out.states = a.states + 2;
    State start = a.states, done = a.states + 1;
    out.initial = {start};
    out.final = a.final;
    out.final.push_back(done);
    for (const auto& t : a.transitions) {
        LetterId l = a.alphabet[t.sym].letter();
        out.add_transition(t.src, Symbol::make_tuple({kPad, l}), t.dst);
    }
    auto ini = a.initial_mask();
    for (const auto& t : a.transitions)
        if (ini[t.src]) out.add_transition(start, Symbol::make_tuple({r, a.alphabet[t.sym].letter()}), t.dst);
    if (accepts_epsilon(a)) out.add_transition(start, Symbol::make_tuple({r, kPad}), done);
    out.canonicalize();
    return trim(out);
}

/// {(x·u, v) : (u, v) ∈ L(s)}; the first track is delayed by one column.
Nfa shift_first(const Nfa& s, LetterId x) {
    std::vector<LetterId> ys{kPad};
    for (const auto& sym : s.alphabet)
        if (sym.entries[1] != kPad) ys.push_back(sym.entries[1]);
    std::sort(ys.begin() + 1, ys.end());
    ys.erase(std::unique(ys.begin() + 1, ys.end()), ys.end());
    auto so = out_edges(s);
    auto sf = s.final_mask();
    Nfa out = Nfa::over_tuples(2);
    SymbolIndexer sym(out);
    std::unordered_map<std::uint64_t, State> ids;
    std::deque<std::pair<State, LetterId>> work;
    auto get = [&](State q, LetterId buf) {
        std::uint64_t key = (static_cast<std::uint64_t>(q) << 32) | buf;
        auto [it, fresh] = ids.emplace(key, static_cast<State>(out.states));
        if (fresh) {
            ++out.states;
            work.push_back({q, buf});
        }
        return it->second;
    };
    const State start = 0;
    out.states = 1;
    out.initial = {start};
    for (auto q0 : s.initial)
        for (auto y : ys) out.transitions.push_back({start, sym(Symbol::make_tuple({x, y})), get(q0, y)});
    std::vector<std::pair<State, bool>> finals;
    while (!work.empty()) {
        auto [q, buf] = work.front();
        work.pop_front();
        State from = ids[(static_cast<std::uint64_t>(q) << 32) | buf];
        // The word may stop here: nothing buffered, or the buffered letter closes s.
        bool fin = buf == kPad && sf[q];
        for (const auto& [si, dst] : so[q]) {
            const auto& e = s.alphabet[si].entries;
            if (e[1] != buf) continue;
            if (e[0] == kPad && sf[dst]) fin = true;
            for (auto y : ys) {
                if (buf == kPad && y != kPad) continue;
                if (e[0] == kPad && y == kPad) continue;
                out.transitions.push_back({from, sym(Symbol::make_tuple({e[0], y})), get(dst, y)});
            }
        }
        if (fin) out.final.push_back(from);
    }
    out.canonicalize();
    return trim(out);
}

LetterId fresh_letter(const AlphabetOrder& ord, std::string base) {
    while (ord.contains(intern(base))) base += "'";
    return intern(base);
}

AlphabetOrder order_for(const Nfa& domain) { return AlphabetOrder::of(domain.alphabet); }

Presentation make_presentation(const Nfa& domain, Nfa edges) {
    Presentation p;
    p.domain = trim(domain);
    p.order = order_for(p.domain);
    p.relations[kE] = Relation{2, trim(std::move(edges))};
    return p;
}

/// Paths x1 → ... → xm with x1 ∈ L(start); entry m-1 holds the m-track automaton.
std::vector<Nfa> path_automata(const DagPresentation& d, const Nfa& start) {
    std::vector<Nfa> out;
    const Nfa& e = d.p.relation(kE).automaton;
    Compiled cur{{"x1"}, trim(as_one_track(start))};
    for (std::size_t m = 1; m <= d.height + 1; ++m) {
        if (is_empty(cur.aut)) break;
        out.push_back(cur.aut);
        std::string a = "x" + std::to_string(m), b = "x" + std::to_string(m + 1);
        std::vector<std::string> vars = cur.vars;
        vars.push_back(b);
        Compiled step = join(cur, Compiled{{a, b}, e});
        cur = Compiled{vars, trim(reorder_tracks(step, vars))};
    }
    if (!is_empty(cur.aut)) throw ValidationError("dag has a path longer than its height bound");
    return out;
}

LetterId path_letter(const std::vector<LetterId>& e) {
    if (e.size() == 1) return e[0];
    if (std::all_of(e.begin(), e.end(), [](LetterId l) { return l == kPad; })) return kPad;
    std::string s = "[";
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i) s += ",";
        s += e[i] == kPad ? std::string(kPadName) : letter_name(e[i]);
    }
    return intern(s + "]");
}

TreePresentation unfold_from(const DagPresentation& d, const Nfa& start, bool add_root) {
    auto paths = path_automata(d, start);
    std::vector<Nfa> dom, edges;
    for (std::size_t m = 0; m < paths.size(); ++m) {
        dom.push_back(map_columns(paths[m], 0, [](SymIdx, const Symbol& s) { return Symbol::base_id(path_letter(s.entries)); }));
        if (m == 0) continue;
        edges.push_back(map_columns(paths[m], 2, [m](SymIdx, const Symbol& s) {
            std::vector<LetterId> head(s.entries.begin(), s.entries.begin() + static_cast<std::ptrdiff_t>(m));
            return Symbol::make_tuple({path_letter(head), path_letter(s.entries)});
        }));
    }
    if (dom.empty()) throw ValidationError("no start node");
    TreePresentation t;
    t.height = paths.size() - 1;
    Nfa domain = unite_all(dom);
    Nfa e = edges.empty() ? Nfa::over_tuples(2) : unite_all(edges);
    if (add_root) {
        LetterId r = fresh_letter(order_for(domain), "r");
        e = unite(e, edges_from_letter(r, dom[0]));
        domain = unite(domain, word_automaton({Symbol::base_id(r)}, {Symbol::base_id(r)}));
        ++t.height;
    }
    t.p = make_presentation(domain, e);
    return t;
}

Nfa one_word(const Presentation& p, const Word& w) {
    std::vector<Symbol> alpha = p.domain.alphabet;
    for (const auto& s : w)
        if (std::find(alpha.begin(), alpha.end(), s) == alpha.end()) alpha.push_back(s);
    return word_automaton(alpha, w);
}

}  // namespace

void DagPresentation::validate() const {
    if (!validate_dag_height(p, height)) throw ValidationError("dag has a path longer than " + std::to_string(height));
    if (is_empty(roots_of(p))) throw ValidationError("dag has no root");
}

Nfa roots_of(const Presentation& p, const std::string& rel) {
    FoEngine e(p);
    Formula f = Formula::negate(Formula::exists("y", Formula::atom(rel, {"y", "x"})));
    return trim(from_one_track(e.eval(f, {"x"})));
}

Nfa successors(const Presentation& p, const Word& u, const std::string& rel) {
    return section(p.relation(rel).automaton, u, 0, p.domain.alphabet);
}

bool no_leaf_child(const Presentation& p, const Word& r) {
    return is_empty(difference(successors(p, r), first_track(p.relation(kE).automaton)));
}

Word tree_root(const TreePresentation& t) {
    Nfa r = roots_of(t.p);
    auto c = cardinality(r);
    if (c.infinite || c.value != 1) throw ValidationError("expected exactly one root, found " + c.str());
    return enumerate(r, 1).front();
}

TreePresentation unfold_dag(const DagPresentation& d, bool add_root) { return unfold_from(d, roots_of(d.p), add_root); }

TreePresentation unfold_at(const DagPresentation& d, const Word& v) {
    if (!accepts(d.p.domain, v)) throw std::invalid_argument("start word is not a node");
    return unfold_from(d, one_word(d.p, v), false);
}

TreePresentation extract_component(const TreePresentation& forest, const Word& w) {
    if (!accepts(roots_of(forest.p), w)) throw std::invalid_argument("'" + word_str(w) + "' is not a root");
    const Nfa& e = forest.p.relation(kE).automaton;
    Nfa level = one_word(forest.p, w), all = level;
    for (std::size_t h = 0; h < forest.height; ++h) {
        Compiled c = join_project(Compiled{{"x"}, as_one_track(level)}, Compiled{{"x", "y"}, e}, "x");
        level = trim(from_one_track(c.aut));
        if (is_empty(level)) break;
        all = unite(all, level);
    }
    TreePresentation t;
    t.height = forest.height;
    t.p.order = forest.p.order;
    t.p.domain = trim(all);
    t.p.relations[kE] = Relation{2, restrict_first(e, t.p.domain)};
    return t;
}

TreePresentation tree_from_equiv(const Presentation& e, const std::string& rel) {
    FoEngine eng(e);
    Formula rep = Formula::negate(
        Formula::exists("z", Formula::conj({Formula::atom(rel, {"x", "z"}), Formula::atom("llex", {"z", "x"}),
                                            Formula::negate(Formula::eq("x", "z"))})));
    Nfa reps = trim(from_one_track(eng.eval(rep, {"x"})));
    LetterId r = fresh_letter(e.order, "r");
    LetterId a = fresh_letter(e.order.extended({letter_name(r)}), "a");

    Nfa marked = reps;  // a·u for u ∈ reps
    {
        Nfa m = Nfa::over(reps.alphabet);
        m.add_symbol(Symbol::base_id(a));
        m.states = reps.states + 1;
        State start = reps.states;
        m.initial = {start};
        m.final = reps.final;
        m.transitions = reps.transitions;
        SymIdx ai = *m.find_symbol(Symbol::base_id(a));
        for (auto q : reps.initial) m.transitions.push_back({start, ai, q});
        m.canonicalize();
        marked = trim(m);
    }
    Nfa top = edges_from_letter(r, marked);
    Compiled members = join(Compiled{{"x"}, as_one_track(reps)}, Compiled{{"x", "y"}, e.relation(rel).automaton});
    Nfa below = shift_first(reorder_tracks(members, {"x", "y"}), a);

    Nfa domain = unite(unite(e.domain, marked), word_automaton({Symbol::base_id(r)}, {Symbol::base_id(r)}));
    TreePresentation t;
    t.height = 2;
    t.p.order = e.order.extended({letter_name(r), letter_name(a)});
    std::vector<Symbol> alpha;
    for (const auto& l : t.p.order.letters()) alpha.push_back(Symbol::base(l));
    t.p.domain = with_alphabet(trim(domain), alpha);
    t.p.relations[kE] = Relation{2, trim(unite(top, below))};
    return t;
}

TreePresentation build_forest_height1(const Polynomial& q1, const Polynomial& q2, std::size_t l, std::string_view letter,
                                      std::string_view leaf_prefix) {
    if (l == 0) throw std::invalid_argument("need at least one variable");
    Polynomial p = pair_code(q1.with_vars(l), q2.with_vars(l));
    if (p.is_zero()) throw ZeroPolynomial();
    Nfa a = poly_automaton_conv(p, l, letter);
    RunAutomaton ra = run_automaton(a, leaf_prefix);
    Nfa edges = map_columns(ra.run, 2, [&](SymIdx i, const Symbol& s) {
        return Symbol::make_tuple({flat_base(a.alphabet[ra.pi[i]]).letter(), s.letter()});
    });
    Nfa domain = unite(conv_roots(l, letter), trim(without_epsilon(ra.run)));
    TreePresentation t;
    t.height = 1;
    t.p = make_presentation(domain, trim(without_epsilon(edges)));
    return t;
}

DagPresentation build_D2(const Polynomial& p1, const Polynomial& p2, std::size_t k, std::size_t l) {
    if (k == 0 || l <= k) throw std::invalid_argument("need 1 <= k < l");
    if (p1.is_zero() || p2.is_zero()) throw ZeroPolynomial();
    if (p1.vars > l || p2.vars > l) throw std::invalid_argument("polynomials use more than l variables");
    Polynomial extra = Polynomial::variable(l + 1, l);
    TreePresentation f1 = build_forest_height1(p1.with_vars(l + 1) + extra, p2.with_vars(l + 1) + extra, l + 1, "a", "g");
    TreePresentation f2 = build_forest_height1(Polynomial::variable(2, 0), Polynomial::variable(2, 1), 2, "b", "h");
    // No edge reaches b^{1,1}; without its tree the roots are exactly ⊗_k(a+) ∪ b*.
    Word diag = conv_root_word({1, 1}, "b");
    Nfa unused = unite(one_word(f2.p, diag), successors(f2.p, diag));
    Nfa f2_dom = difference(f2.p.domain, unused);
    Nfa vf = unite(f1.p.domain, f2_dom);
    Nfa ef = unite(f1.p.relation(kE).automaton, restrict_first(f2.p.relation(kE).automaton, f2_dom));
    Nfa roots = conv_roots(k, "a"), off = off_diagonal();

    Nfa domain = unite_all({roots, b_star(), lift_one(vf, "$", 0)});
    Nfa edges = unite_all({
        counter_lift(ef, {true, true}, "$", 0),
        lift_target(prefix_relation(k, l + 1)),
        lift_target(pair_of(roots, off)),
        lift_target(pair_of(epsilon_only(), off)),
        lift_target(pair_of(b_plus(), off)),
        lift_target(upper_diagonal()),
    });
    DagPresentation d;
    d.p = make_presentation(domain, edges);
    d.height = 2;
    d.root_tracks = k;
    return d;
}

DagPresentation tower_step(const DagPresentation& di, std::size_t i) {
    if (di.height != i) throw std::invalid_argument("tower step expects a dag of height " + std::to_string(i));
    if (di.root_tracks < 3) throw ValidationError("a-roots need at least three tracks");
    std::size_t k = di.root_tracks - 2;
    if (!equivalent(roots_of(di.p), gadget_roots(k + 2))) throw ValidationError("roots are not ⊗_k(a+) ∪ b*");

    const Nfa& e = di.p.relation(kE).automaton;
    Nfa from_b = first_track_in_bstar(e, true), keep = first_track_in_bstar(e, false);
    Nfa v_rest = from_one_track(first_track_in_bstar(as_one_track(di.p.domain), false));
    Nfa sb_star = lift_one(b_star(), "#", 1), sb_plus = lift_one(b_plus(), "#", 1);
    Nfa sharps = concat(letters_plus({Symbol::base("#1"), Symbol::base("#2")}, {Symbol::base("#1")}),
                        letters_star({Symbol::base("#1"), Symbol::base("#2")}, {Symbol::base("#2")}));

    // D': b^m is replaced by ♯^x ⊗ b^m, and x new leaves hang below a^{cxy} and ♯^x ⊗ b^m.
    Nfa v_prime = unite_all({v_rest, sb_star, sharps});
    Nfa e_prime = unite_all({keep, sharp_leaves_of_a(k), counter_lift(from_b, {true, false}, "#", 1), sharp_leaves_of_sb()});

    Nfa roots = conv_roots(k, "a");
    Nfa domain = unite_all({roots, b_star(), lift_one(v_prime, "$", 0)});
    Nfa edges = unite_all({
        counter_lift(e_prime, {true, true}, "$", 0),
        lift_target(prefix_relation(k, k + 2)),
        lift_target(pair_of(roots, sb_plus)),
        lift_target(pair_of(epsilon_only(), sb_star)),
        lift_target(pair_of(b_plus(), sb_plus)),
        lift_target(short_sharps()),
    });
    DagPresentation d;
    d.p = make_presentation(domain, edges);
    d.height = i + 1;
    d.root_tracks = k;
    return d;
}

DagPresentation build_tower(const Polynomial& p1, const Polynomial& p2, std::size_t n, std::size_t l) {
    if (n < 2) throw std::invalid_argument("tower height must be at least 2");
    DagPresentation d = build_D2(p1, p2, 2 * n - 3, l);
    for (std::size_t i = 2; i < n; ++i) d = tower_step(d, i);
    return d;
}

Word conv_root_word(const std::vector<unsigned>& e, std::string_view letter) {
    Word w;
    for (const auto& s : conv_power_word(e, letter)) w.push_back(flat_base(s));
    return w;
}

Word a_root(const std::vector<unsigned>& c) { return conv_root_word(c, "a"); }

Word b_root(std::size_t m) { return Word(m, Symbol::base("b")); }

Nfa gadget_roots(std::size_t k) { return unite(conv_roots(k, "a"), b_star()); }

namespace {

/** \brief One side of a bounded isomorphism check, with cached per-node automata. */
class TreeView {
public:
    explicit TreeView(const TreePresentation& t)
        : t_(t), e_(t.p.relation(kE).automaton), inner_(first_track(e_)) {}

    const Nfa& kids(const Word& u) {
        auto it = kids_.find(u);
        if (it == kids_.end()) it = kids_.emplace(u, successors(t_.p, u)).first;
        return it->second;
    }
    ExtendedCount child_count(const Word& u) { return cardinality(kids(u)); }
    const AlphabetOrder& order() const { return t_.p.order; }

    /// κ -> number of children of u with exactly κ children, for κ <= cap; [cap+1] more, [cap+2] infinitely many.
    std::vector<ExtendedCount> kappa_counts(const Word& u, std::size_t cap) {
        const Nfa& k = kids(u);
        Presentation q;
        q.order = t_.p.order;
        q.domain = k;
        q.relations[kE] = Relation{2, restrict_first(e_, k)};
        std::vector<ExtendedCount> out(cap + 3);
        out[0] = cardinality(difference(k, inner_));
        if (is_empty(q.relations[kE].automaton)) {
            for (std::size_t i = 1; i < out.size(); ++i) out[i] = ExtendedCount::finite(0);
            return out;
        }
        ClassCounter cc(q, cap);
        for (std::size_t i = 1; i < out.size(); ++i) out[i] = cc.words_with_label(i);
        return out;
    }

private:
    const TreePresentation& t_;
    const Nfa& e_;
    Nfa inner_;
    std::map<Word, Nfa> kids_;
};

enum class Outcome { Iso, NonIso, Unknown };

class BoundedIso {
public:
    BoundedIso(const TreePresentation& a, const TreePresentation& b, std::size_t cap_k, std::size_t mult_cap, std::size_t reps)
        : views_{TreeView(a), TreeView(b)}, cap_k_(cap_k), mult_cap_(mult_cap), reps_(reps) {}

    Outcome compare(int sa, const Word& a, int sb, const Word& b, std::size_t h, const std::string& where) {
        auto ca = views_[sa].child_count(a), cb = views_[sb].child_count(b);
        if (!(ca == cb)) return refute(where + ": children", ca, cb);
        if (h <= 1) return Outcome::Iso;

        std::size_t cap = cap_k_;
        for (auto [s, u] : {std::pair{sa, &a}, std::pair{sb, &b}})
            for (auto k : discovered_kappas(s, *u)) cap = std::max(cap, k);
        auto ka = views_[sa].kappa_counts(a, cap), kb = views_[sb].kappa_counts(b, cap);
        for (std::size_t k = 0; k <= cap; ++k)
            if (!(ka[k] == kb[k])) return refute(where + ": children with " + std::to_string(k) + " children", ka[k], kb[k]);
        if (!(ka[cap + 2] == kb[cap + 2])) return refute(where + ": children with inf children", ka[cap + 2], kb[cap + 2]);
        bool resolved = ka[cap + 1] == ExtendedCount::finite(0) && kb[cap + 1] == ExtendedCount::finite(0);
        if (h == 2) return resolved ? Outcome::Iso : Outcome::Unknown;

        if (ca.infinite || ca.value > reps_) return Outcome::Unknown;
        // Partition both child lists into isomorphism types.
        struct Type {
            int side;
            Word rep;
            std::size_t count[2] = {0, 0};
        };
        std::vector<Type> types;
        bool unsure = false;
        for (auto [s, u] : {std::pair{sa, &a}, std::pair{sb, &b}}) {
            int slot = (s == sa && u == &a) ? 0 : 1;
            std::size_t n = static_cast<std::size_t>(ca.value);
            for (const auto& x : enumerate(views_[s].kids(*u), n, &views_[s].order())) {
                Type* found = nullptr;
                for (auto& t : types) {
                    Outcome o = compare(t.side, t.rep, s, x, h - 1, where + "/" + word_str(x));
                    if (o == Outcome::Iso) {
                        found = &t;
                        break;
                    }
                    if (o == Outcome::Unknown) unsure = true;
                }
                if (!found) {
                    types.push_back(Type{s, x});
                    found = &types.back();
                }
                ++found->count[slot];
            }
        }
        if (unsure) return Outcome::Unknown;
        bool capped = false;
        for (const auto& t : types) {
            if (t.count[0] == t.count[1]) continue;
            if (t.count[0] >= mult_cap_ && t.count[1] >= mult_cap_) {
                capped = true;
                continue;
            }
            return refute(where + ": children isomorphic to " + word_str(t.rep), ExtendedCount::finite(t.count[0]),
                          ExtendedCount::finite(t.count[1]));
        }
        return capped ? Outcome::Unknown : Outcome::Iso;
    }

    const IsoVerdict& certificate() const { return cert_; }

private:
    Outcome refute(std::string stat, ExtendedCount l, ExtendedCount r) {
        cert_ = IsoVerdict::differ(std::move(stat), std::move(l), std::move(r));
        return Outcome::NonIso;
    }

    /// Child counts of up to reps children with pairwise different counts, among the first reps^2.
    std::vector<std::size_t> discovered_kappas(int s, const Word& u) {
        std::vector<std::size_t> out;
        for (const auto& x : enumerate(views_[s].kids(u), reps_ * reps_, &views_[s].order())) {
            auto c = views_[s].child_count(x);
            if (c.infinite) continue;
            auto k = static_cast<std::size_t>(c.value);
            if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
            if (out.size() >= reps_) break;
        }
        return out;
    }

    TreeView views_[2];
    std::size_t cap_k_, mult_cap_, reps_;
    IsoVerdict cert_;
};

}  // namespace

std::vector<ExtendedCount> child_degree_census(const TreePresentation& t, const Word& u, std::size_t cap) {
    return TreeView(t).kappa_counts(u, cap);
}

IsoVerdict iso_height1(const TreePresentation& t1, const TreePresentation& t2) {
    if (t1.height > 1 || t2.height > 1) throw std::invalid_argument("iso_height1 needs trees of height at most 1");
    auto c1 = cardinality(successors(t1.p, tree_root(t1))), c2 = cardinality(successors(t2.p, tree_root(t2)));
    if (c1 == c2) return IsoVerdict::isomorphic();
    return IsoVerdict::differ("children of the root", c1, c2);
}

IsoVerdict iso_bounded(const TreePresentation& t1, const TreePresentation& t2, std::size_t n, std::size_t cap_k,
                       std::size_t mult_cap, std::size_t reps) {
    Word r1 = tree_root(t1), r2 = tree_root(t2);
    BoundedIso b(t1, t2, cap_k, mult_cap, reps);
    switch (b.compare(0, r1, 1, r2, n, "root")) {
        case Outcome::Iso:
            return IsoVerdict::isomorphic();
        case Outcome::NonIso:
            return b.certificate();
        case Outcome::Unknown:
            break;
    }
    return IsoVerdict::consistent({{"K", cap_k}, {"L", mult_cap}, {"M", reps}});
}

std::string ahu_canonical(const FiniteTree& t) {
    std::size_t n = t.nodes;
    if (n == 0) throw ValidationError("empty tree");
    if (t.edges.size() != n - 1) throw ValidationError("a tree on n nodes has n-1 edges");
    std::vector<std::vector<std::size_t>> kids(n);
    std::vector<int> parents(n, 0);
    for (auto [u, v] : t.edges) {
        if (u >= n || v >= n) throw ValidationError("edge endpoint out of range");
        kids[u].push_back(v);
        ++parents[v];
    }
    std::size_t root = n;
    for (std::size_t v = 0; v < n; ++v) {
        if (parents[v] > 1) throw ValidationError("node with two parents");
        if (parents[v] == 0) {
            if (root != n) throw ValidationError("more than one root");
            root = v;
        }
    }
    if (root == n) throw ValidationError("no root");
    std::vector<std::size_t> order{root};
    for (std::size_t i = 0; i < order.size(); ++i)
        for (auto c : kids[order[i]]) order.push_back(c);
    if (order.size() != n) throw ValidationError("not connected");
    std::vector<std::string> code(n);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::vector<std::string> parts;
        for (auto c : kids[*it]) parts.push_back(std::move(code[c]));
        std::sort(parts.begin(), parts.end());
        std::string s = "(";
        for (auto& p : parts) s += p;
        code[*it] = s + ")";
    }
    return code[root];
}

FiniteTree explicit_tree(const TreePresentation& t) {
    auto size = cardinality(t.p.domain);
    if (size.infinite) throw ValidationError("tree is infinite");
    auto n = static_cast<std::size_t>(size.value);
    auto words = enumerate(t.p.domain, n);
    std::map<Word, std::size_t> id;
    for (std::size_t i = 0; i < words.size(); ++i) id[words[i]] = i;
    FiniteTree f;
    f.nodes = n;
    for (const auto& cw : enumerate(t.p.relation(kE).automaton, n * n + 1)) {
        auto uv = deconvolution(cw, 2);
        auto a = id.find(uv[0]), b = id.find(uv[1]);
        if (a == id.end() || b == id.end()) throw ValidationError("edge leaves the domain");
        f.edges.push_back({a->second, b->second});
    }
    return f;
}

std::string ahu_canonical(const TreePresentation& t) { return ahu_canonical(explicit_tree(t)); }

}  // namespace autostruct
