#include "autostruct/linorder.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace autostruct {

namespace {

constexpr std::string_view kDollar = "$";
const std::vector<std::string> kGamma{"a", "b1", "b2", "b3", "#"};

std::string dollar_letter(std::size_t j) { return "$_" + std::to_string(j); }

Symbol L(std::string_view s) { return Symbol::base(s); }

std::vector<Symbol> symbols(const std::vector<std::string>& names) {
    std::vector<Symbol> out;
    for (const auto& n : names) out.push_back(L(n));
    return out;
}

Nfa norm(const Nfa& a, std::size_t level) { return with_alphabet(trim(a), sigma_alphabet(level)); }

Nfa literal(std::string_view text) {
    Word w = sigma_word(text);
    std::vector<Symbol> alpha(w.begin(), w.end());
    std::sort(alpha.begin(), alpha.end());
    alpha.erase(std::unique(alpha.begin(), alpha.end()), alpha.end());
    return word_automaton(alpha, w);
}

Nfa cat(const std::vector<Nfa>& parts) {
    Nfa r = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) r = concat(r, parts[i]);
    return r;
}

Nfa dfa(const Nfa& a) { return trim(minimize(trim(a))); }

Nfa blocks(std::size_t k, std::string_view letter) { return sharp_blocks_dfa(k, letter); }

// b^+ # for beta_plus, else b #.
Nfa beta_root(bool plus_b1) {
    if (!plus_b1) return literal("b1#");
    return blocks(1, "b1");
}

Nfa any_word(std::size_t level) {
    auto s = sigma_alphabet(level);
    return letters_star(s, s);
}

bool letters_within(const Nfa& a, const std::vector<std::string>& allowed) {
    Nfa t = trim(a);
    std::set<LetterId> ok;
    for (const auto& n : allowed) ok.insert(intern(n));
    for (const auto& tr : t.transitions)
        if (!ok.count(t.alphabet[tr.sym].letter())) return false;
    return true;
}

// Words r with u $ r accepted for some $-free u; initial states are those entered on the first $.
Nfa tails_after_first_dollar(const Nfa& a) {
    LetterId dollar = intern(kDollar);
    auto out = out_edges(a);
    std::vector<bool> seen(a.states, false);
    std::deque<State> work;
    for (auto q : a.initial)
        if (!seen[q]) seen[q] = true, work.push_back(q);
    std::set<State> starts;
    while (!work.empty()) {
        State q = work.front();
        work.pop_front();
        for (const auto& [s, d] : out[q]) {
            if (a.alphabet[s].letter() == dollar)
                starts.insert(d);
            else if (!seen[d])
                seen[d] = true, work.push_back(d);
        }
    }
    Nfa r = a;
    r.initial.assign(starts.begin(), starts.end());
    r.canonicalize();
    return trim(r);
}

// Number of # before the first $ in the a-branch of a.
std::size_t a_blocks(const Nfa& a, std::size_t level) {
    Nfa branch = trim(intersect(a, concat(literal("a"), any_word(level))));
    auto ws = enumerate(branch, 1);
    if (ws.empty()) throw ValidationError("automaton has no a-rooted word");
    std::size_t k = 0;
    for (const auto& s : ws.front()) {
        if (letter_name(s.letter()) == kDollar) return k;
        if (letter_name(s.letter()) == kSharp) ++k;
    }
    throw ValidationError("a-rooted word without $");
}

Nfa restrict_to_prefix(const Nfa& a, const Nfa& prefix, std::size_t level) {
    return trim(intersect(a, dfa(concat(prefix, any_word(level)))));
}

}  // namespace

AlphabetOrder sigma_order(std::size_t i) {
    std::vector<std::string> l{std::string(kDollar)};
    for (std::size_t j = 1; j < i; ++j) l.push_back(dollar_letter(j));
    for (const char* s : {"0", "#", "a", "b1", "b2", "b3", "1"}) l.push_back(s);
    return AlphabetOrder(std::move(l));
}

std::vector<Symbol> sigma_alphabet(std::size_t i) { return symbols(sigma_order(i).letters()); }

Word sigma_word(std::string_view text, std::size_t i) { return parse_base_word(text, sigma_order(i).letters()); }

OrderPresentation sq_order_presentation(const Nfa& a, const AlphabetOrder& ord) {
    OrderPresentation o;
    o.runs = run_automaton(trim(a), "t");
    o.source_order = ord;
    const Nfa& run = o.runs.run;
    const Nfa& src = o.runs.source;
    const std::size_t nt = run.alphabet.size();
    std::vector<std::size_t> prank(nt);
    for (std::size_t t = 0; t < nt; ++t) prank[t] = ord.rank(src.alphabet[o.runs.pi[t]].letter());
    std::vector<LetterId> tid(nt);
    for (std::size_t t = 0; t < nt; ++t) tid[t] = run.alphabet[t].letter();

    auto out = out_edges(run);
    auto fin = run.final_mask();
    const State end = static_cast<State>(run.states);
    enum Cmp : std::uint8_t { EqEq, EqLess, EqGreater, Less };

    Nfa rel = Nfa::over_tuples(2);
    SymbolIndexer sym(rel);
    std::unordered_map<std::uint64_t, State> ids;
    std::deque<std::tuple<State, State, Cmp>> work;
    auto key = [&](State p, State q, Cmp c) {
        return ((static_cast<std::uint64_t>(p) * (end + 1) + q) << 2) | c;
    };
    auto ended = [&](State p) { return p == end || fin[p]; };
    auto get = [&](State p, State q, Cmp c) {
        auto [it, fresh] = ids.emplace(key(p, q, c), static_cast<State>(rel.states));
        if (fresh) {
            ++rel.states;
            work.push_back({p, q, c});
            if (ended(p) && ended(q) && c != EqGreater) rel.final.push_back(it->second);
        }
        return it->second;
    };
    for (auto p : run.initial)
        for (auto q : run.initial) rel.initial.push_back(get(p, q, EqEq));
    while (!work.empty()) {
        auto [p, q, c] = work.front();
        work.pop_front();
        State from = ids[key(p, q, c)];
        if (p != end && q != end)
            for (const auto& [s, d] : out[p])
                for (const auto& [s2, d2] : out[q]) {
                    Cmp nc = c;
                    if (c != Less) {
                        if (prank[s] < prank[s2])
                            nc = Less;
                        else if (prank[s] > prank[s2])
                            continue;
                        else if (c == EqEq)
                            nc = s < s2 ? EqLess : s > s2 ? EqGreater : EqEq;
                    }
                    rel.transitions.push_back({from, sym(Symbol::make_tuple({tid[s], tid[s2]})), get(d, d2, nc)});
                }
        // The first word has ended: its projection is a proper prefix unless already smaller.
        if (ended(p) && q != end)
            for (const auto& [s2, d2] : out[q])
                rel.transitions.push_back({from, sym(Symbol::make_tuple({kPad, tid[s2]})), get(end, d2, Less)});
        if (ended(q) && p != end && c == Less)
            for (const auto& [s, d] : out[p])
                rel.transitions.push_back({from, sym(Symbol::make_tuple({tid[s], kPad})), get(d, end, Less)});
    }
    rel.canonicalize();

    std::vector<std::string> names;
    for (std::size_t t = 0; t < nt; ++t) names.push_back(letter_name(tid[t]));
    o.p.order = AlphabetOrder(names);
    o.p.domain = run;
    o.p.relations["leq"] = Relation{2, trim(rel)};
    return o;
}

Nfa poly_interval(const Polynomial& q1, const Polynomial& q2, std::size_t k, std::string_view letter) {
    Polynomial c = pair_code(q1.with_vars(std::max(k, q1.vars)), q2.with_vars(std::max(k, q2.vars)));
    if (c.is_zero()) throw ZeroPolynomial();
    Nfa a = poly_automaton_sharp(c, k, letter);
    State qd = a.add_state();
    std::vector<State> old_final = a.final;
    for (auto f : old_final) a.add_transition(f, L(kDollar), qd);
    a.final = {qd};
    a.canonicalize();
    return trim(a);
}

Nfa shuffle_language(const Nfa& d) {
    std::vector<Symbol> bits{L("0"), L("1")};
    Nfa lead = concat(letters_star(bits, bits), word_automaton(bits, {L("1")}));
    return plus(concat(lead, d));
}

Nfa shuffle_automaton(const Nfa& a, const Nfa& e, const Nfa& d, const Nfa& f) {
    if (!letters_within(e, kGamma) || !letters_within(d, kGamma))
        throw ValidationError("E and D must be words over a, b1, b2, b3, #");
    Nfa dollar = literal("$");
    if (!includes(cat({e, d, dollar, f}), a)) throw ValidationError("automaton language is not inside E D $ F");

    const State n = static_cast<State>(a.states);
    Nfa p = Nfa::over(a.alphabet);
    for (const auto& g : kGamma) p.add_symbol(L(g));
    for (const char* s : {"$", "0", "1"}) p.add_symbol(L(s));
    auto idx = [&](std::string_view s) { return *p.find_symbol(L(s)); };
    std::set<SymIdx> gamma;
    for (const auto& g : kGamma) gamma.insert(idx(g));
    p.states = 3 * n;
    // (q,1) = q, (q,loop) = n + q, (q,2) = 2n + q.
    for (const auto& t : a.transitions) {
        SymIdx s = *p.find_symbol(a.alphabet[t.sym]);
        if (gamma.count(s)) p.transitions.push_back({t.src, s, t.dst});
        p.transitions.push_back({2 * n + t.src, s, 2 * n + t.dst});
    }
    for (State q = 0; q < n; ++q) {
        p.transitions.push_back({q, idx("$"), n + q});
        for (auto s : gamma) p.transitions.push_back({n + q, s, n + q});
        p.transitions.push_back({n + q, idx("0"), n + q});
        p.transitions.push_back({n + q, idx("1"), n + q});
        p.transitions.push_back({n + q, idx("1"), 2 * n + q});
    }
    p.initial = a.initial;
    for (auto q : a.final) p.final.push_back(2 * n + q);
    p.canonicalize();

    Nfa everything = letters_star(p.alphabet, p.alphabet);
    Nfa shape = dfa(cat({e, dollar, shuffle_language(d), dollar, everything}));
    return trim(intersect(trim(p), shape));
}

std::pair<Word, Word> shuffle_neighbors(const Word& w) {
    LetterId one = intern("1"), zero = intern("0");
    std::size_t j = w.size();
    for (std::size_t i = 0; i < w.size(); ++i)
        if (w[i].letter() == one) j = i;
    if (j == w.size()) throw std::invalid_argument("word has no 1");
    Word x(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(j));
    Word u(w.begin() + static_cast<std::ptrdiff_t>(j) + 1, w.end());
    for (const auto& s : u)
        if (s.letter() == zero) throw std::invalid_argument("colour contains 0");
    Word lo = x, hi = x;
    lo.push_back(Symbol::base_id(zero));
    lo.push_back(Symbol::base_id(one));
    hi.push_back(Symbol::base_id(one));
    hi.push_back(Symbol::base_id(one));
    lo.insert(lo.end(), u.begin(), u.end());
    hi.insert(hi.end(), u.begin(), u.end());
    return {lo, hi};
}

Word shuffle_between(const Word& w1, const Word& w2, const Word& u, const AlphabetOrder& ord) {
    if (lex_compare(w1, w2, ord) >= 0) throw std::invalid_argument("need w1 <lex w2");
    Symbol zero = L("0"), one = L("1");
    Word z = w1;
    std::size_t m = std::min(w1.size(), w2.size()), i = 0;
    while (i < m && w1[i] == w2[i]) ++i;
    if (i == w1.size()) {
        std::size_t j = 0;
        while (i + j < w2.size() && w2[i + j] == zero) ++j;
        z.insert(z.end(), j + 1, zero);
    }
    z.push_back(one);
    z.insert(z.end(), u.begin(), u.end());
    return z;
}

Nfa dollar_chains(std::size_t j) {
    auto s = sigma_alphabet(j + 1);
    Nfa r = empty_automaton(s);
    for (std::size_t m = 1; m <= j; ++m) r = unite(r, letters_plus(s, {L(dollar_letter(m))}));
    return dfa(r);
}

Nfa lo_shape(std::size_t k, bool plus_b1, std::size_t i) {
    Nfa roots = unite(unite(blocks(k, "a"), beta_root(plus_b1)), literal("b2#"));
    std::vector<Symbol> bits{L("0"), L("1")};
    Nfa first = unite(word_automaton(bits, {L("0")}), word_automaton(bits, {L("1")}));
    return norm(dfa(cat({roots, literal("$"), first, any_word(i)})), i);
}

Nfa build_base_A1(const Polynomial& p1, const Polynomial& p2, std::size_t n, std::size_t l) {
    if (n == 0 || l <= n) throw std::invalid_argument("need 1 <= n < l");
    if (p1.is_zero() || p2.is_zero()) throw ZeroPolynomial();
    if (p1.vars > l || p2.vars > l) throw std::invalid_argument("polynomials use more than l variables");
    Polynomial extra = Polynomial::variable(l + 1, l);
    Polynomial x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
    Nfa a1 = poly_interval(p1.with_vars(l + 1) + extra, p2.with_vars(l + 1) + extra, l + 1, "a");
    Nfa a2 = poly_interval(x1 + x2, x1 + x2, 2, "b1");
    Nfa a3 = poly_interval(x1 + x2, x1, 2, "b2");
    Nfa a4 = poly_interval(x1, x1 + x2, 2, "b3");
    Nfa a34 = unite(a3, a4);
    Nfa roots_a = blocks(n, "a"), roots_b1 = blocks(1, "b1"), roots_b2 = literal("b2#");

    Nfa a01 = unite(a1, concat_unambiguous(roots_a, a34));
    Nfa a02 = unite(a2, concat_unambiguous(roots_b1, a34));
    Nfa a03 = concat_unambiguous(roots_b2, a34);
    Nfa d34 = unite(blocks(2, "b2"), blocks(2, "b3"));
    Nfa eps = epsilon_automaton(sigma_alphabet(1));

    Nfa s1 = shuffle_automaton(a01, roots_a, unite(blocks(l - n + 1, "a"), d34), eps);
    Nfa s2 = shuffle_automaton(a02, roots_b1, unite(blocks(1, "b1"), d34), eps);
    Nfa s3 = shuffle_automaton(a03, roots_b2, d34, eps);
    return norm(unite(unite(s1, s2), s3), 1);
}

Nfa lo_tower_step(const Nfa& ai, std::size_t i) {
    if (i == 0) throw std::invalid_argument("levels start at 1");
    const std::size_t level = i + 1;
    Nfa a = norm(ai, level);
    const std::size_t k1 = a_blocks(a, level);
    if (k1 < 2) throw ValidationError("a-roots need at least two blocks for a further step");
    const std::size_t k = k1 - 1;
    const bool plus_b1 = i == 1;
    if (!includes(lo_shape(k1, plus_b1, level), a)) throw ValidationError("automaton does not have the level shape");

    Nfa dollar = literal("$");
    Nfa s = dollar_chains(i);
    Nfa f = unite(s, tails_after_first_dollar(a));
    Nfa ra = blocks(k1, "a"), rb1 = beta_root(plus_b1), rb2 = literal("b2#");
    auto chain = [&](const Nfa& root) { return dfa(cat({root, dollar, s})); };
    Nfa b1 = unite(restrict_to_prefix(a, ra, level), chain(ra));
    Nfa b2 = unite(restrict_to_prefix(a, rb1, level), chain(rb1));
    Nfa b3 = unite(restrict_to_prefix(a, rb2, level), chain(rb2));

    Nfa ek = blocks(k, "a"), eb1 = literal("b1#");
    Nfa c1, c2, c3, d1, d2, d3;
    if (i % 2 == 1) {
        c1 = unite(b1, concat_unambiguous(ek, b2));
        c2 = concat_unambiguous(eb1, b2);
        c3 = concat_unambiguous(rb2, unite(b2, b3));
        d1 = unite(blocks(1, "a"), rb1);
        d2 = rb1;
        d3 = unite(rb1, rb2);
    } else {
        c1 = unite(b1, concat_unambiguous(ek, b3));
        c2 = concat_unambiguous(eb1, unite(b2, b3));
        c3 = concat_unambiguous(rb2, b3);
        d1 = unite(blocks(1, "a"), rb2);
        d2 = unite(rb1, rb2);
        d3 = rb2;
    }
    Nfa s1 = shuffle_automaton(c1, ek, d1, f);
    Nfa s2 = shuffle_automaton(c2, eb1, d2, f);
    Nfa s3 = shuffle_automaton(c3, rb2, d3, f);
    return norm(unite(unite(s1, s2), s3), level + 1);
}

std::vector<Nfa> build_lo_tower(const Polynomial& p1, const Polynomial& p2, std::size_t n, std::size_t l) {
    std::vector<Nfa> out{build_base_A1(p1, p2, n, l)};
    for (std::size_t i = 1; i < n; ++i) out.push_back(lo_tower_step(out.back(), i));
    return out;
}

OrderPresentation extract_fiber_order(const Nfa& a, const Word& u, const AlphabetOrder& ord) {
    Nfa forms = unite(unite(plus(blocks(1, "a")), blocks(1, "b1")), literal("b2#"));
    if (!accepts(forms, u)) throw std::invalid_argument("prefix must be a^c, b1^m # or b2 #");
    std::vector<Symbol> alpha = symbols(ord.letters());
    Nfa everything = letters_star(alpha, alpha);
    Nfa restricted = trim(intersect(a, dfa(concat(word_automaton(alpha, u), everything))));
    if (is_empty(restricted)) throw std::invalid_argument("no word of the automaton starts with the prefix");
    Nfa after = cat({word_automaton(alpha, u), literal("$"), everything});
    if (!includes(after, restricted)) throw std::invalid_argument("prefix is not a complete root");
    return sq_order_presentation(restricted, ord);
}

namespace {

Nfa block_in(const Nfa& domain, const Nfa& leq, const Word& x) {
    const auto& alpha = domain.alphabet;
    Nfa any = letters_star(alpha, alpha);
    Nfa up = section(leq, x, 0, alpha);
    Nfa down = section(leq, x, 1, alpha);
    Nfa leq_t = reorder_tracks(Compiled{{"z", "y"}, leq}, {"y", "z"});
    // y in up (down) belongs to the block iff finitely many z lie between x and y.
    Nfa far_up = from_one_track(infinity_projection(trim(intersect(leq_t, tracks_product({&any, &up})))));
    Nfa far_down = from_one_track(infinity_projection(trim(intersect(leq, tracks_product({&any, &down})))));
    return trim(unite(difference(up, far_up), difference(down, far_down)));
}

bool has_runs(const OrderPresentation& o) { return !o.runs.pi.empty() && !o.source_order.letters().empty(); }

/// Run words whose projection lies in m.
Nfa preimage(const RunAutomaton& r, const Nfa& m) {
    Nfa out = Nfa::over(r.run.alphabet);
    out.states = m.states;
    out.initial = m.initial;
    out.final = m.final;
    std::vector<std::vector<SymIdx>> by_source(r.source.alphabet.size());
    for (SymIdx t = 0; t < r.pi.size(); ++t) by_source[r.pi[t]].push_back(t);
    for (const auto& tr : m.transitions) {
        auto s = r.source.find_symbol(m.alphabet[tr.sym]);
        if (!s) continue;
        for (SymIdx t : by_source[*s]) out.transitions.push_back({tr.src, t, tr.dst});
    }
    out.canonicalize();
    return trim(intersect(r.run, out));
}

struct Quotient {
    Nfa domain;
    Nfa lex;
};

Quotient quotient_of(const OrderPresentation& o) {
    Quotient q;
    q.domain = dfa(o.runs.source);
    q.lex = order_relation_automaton(q.domain, OrderKind::Lex, o.source_order);
    return q;
}

template <class Block, class Weight>
BlockProfile profile_over(const std::vector<Word>& elems, std::size_t bound, std::size_t cap, Block block,
                          Weight weight) {
    BlockProfile prof;
    prof.bound = bound;
    prof.cap = cap;
    std::set<Word> covered;
    for (const auto& x : elems) {
        if (covered.count(x)) continue;
        Nfa blk = block(x);
        ExtendedCount n = cardinality(blk);
        covered.insert(x);
        if (n.infinite) {
            ++prof.infinite;
            for (const auto& e : elems)
                if (!covered.count(e) && accepts(blk, e)) covered.insert(e);
            continue;
        }
        auto members = enumerate(blk, static_cast<std::size_t>(n.value) + 1);
        BigNat size = 0;
        for (const auto& w : members) size += weight(w);
        for (auto& w : members) covered.insert(std::move(w));
        if (size > cap)
            ++prof.over_cap;
        else
            ++prof.blocks[static_cast<std::size_t>(size)];
    }
    return prof;
}

}  // namespace

Nfa block_of_generic(const OrderPresentation& o, const Word& x) {
    return block_in(o.p.domain, o.p.relation("leq").automaton, x);
}

Nfa block_of(const OrderPresentation& o, const Word& x) {
    if (!has_runs(o)) return block_of_generic(o, x);
    Quotient q = quotient_of(o);
    return preimage(o.runs, block_in(q.domain, q.lex, o.project(x)));
}

BlockProfile block_profile_generic(const OrderPresentation& o, std::size_t bound, std::size_t cap,
                                   std::size_t max_elements) {
    auto elems = enumerate(o.p.domain, max_elements, &o.p.order, bound);
    return profile_over(
        elems, bound, cap, [&](const Word& x) { return block_of_generic(o, x); },
        [](const Word&) { return BigNat(1); });
}

BlockProfile block_profile(const OrderPresentation& o, std::size_t bound, std::size_t cap, std::size_t max_elements) {
    if (!has_runs(o)) return block_profile_generic(o, bound, cap, max_elements);
    Quotient q = quotient_of(o);
    // Every run word has the length of its projection, so the bound carries over.
    auto elems = enumerate(q.domain, max_elements, &o.source_order, bound);
    return profile_over(
        elems, bound, cap, [&](const Word& x) { return block_in(q.domain, q.lex, x); },
        [&](const Word& w) { return count_accepting_runs(o.runs.source, w); });
}

}  // namespace autostruct
