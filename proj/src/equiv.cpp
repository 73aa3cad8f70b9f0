#include "autostruct/equiv.hpp"
#include "autostruct/graph.hpp"

#include <algorithm>
#include <deque>
#include <tuple>
#include <stdexcept>
#include <unordered_map>

namespace autostruct {

std::string kind_name(IsoVerdict::Kind k) {
    switch (k) {
        case IsoVerdict::Kind::Isomorphic:
            return "Isomorphic";
        case IsoVerdict::Kind::NonIsomorphic:
            return "NonIsomorphic";
        case IsoVerdict::Kind::ConsistentUpTo:
            return "ConsistentUpTo";
    }
    return "?";
}

std::string IsoVerdict::str() const {
    std::string s = kind_name(kind);
    if (kind == Kind::NonIsomorphic) s += " " + statistic + ": " + left.str() + " vs " + right.str();
    if (kind == Kind::ConsistentUpTo) {
        std::string sep = " ";
        for (const auto& [k, v] : bounds) s += sep + k + "=" + std::to_string(v), sep = ",";
    }
    return s;
}

ExtendedCount SizeCensus::at(std::size_t n) const {
    auto it = finite.find(n);
    if (it == finite.end()) throw std::out_of_range("size " + std::to_string(n) + " not in census");
    return it->second;
}

namespace {

struct VecHash {
    std::size_t operator()(const std::vector<std::pair<State, std::uint32_t>>& v) const noexcept {
        std::size_t h = v.size();
        for (const auto& [s, c] : v) h = (h ^ (static_cast<std::size_t>(s) * 31 + c)) * 0x100000001b3ULL;
        return h;
    }
};

}  // namespace

ClassCounter::ClassCounter(const Presentation& p, std::size_t cap_n, const std::string& rel)
    : p_(p), rel_(rel), cap_n_(cap_n) {
    const auto& r = p.relation(rel);
    if (r.arity != 2) throw ValidationError("relation '" + rel + "' must be binary");
    Nfa d = trim(determinize(r.automaton));
    const std::uint32_t over = static_cast<std::uint32_t>(cap_n + 1);
    const std::size_t inf_label = cap_n + 2;
    std::vector<std::vector<std::pair<SymIdx, State>>> out(d.states);
    for (const auto& t : d.transitions) out[t.src].push_back({t.sym, t.dst});
    auto fin = d.final_mask();

    // Number of continuations of the second track alone, capped; -1 for infinitely many.
    std::vector<std::vector<std::uint32_t>> tail_adj(d.states);
    for (State s = 0; s < d.states; ++s)
        for (const auto& [sym, dst] : out[s])
            if (d.alphabet[sym].entries[0] == kPad) tail_adj[s].push_back(dst);
    Sccs tail_scc = strongly_connected(tail_adj);
    std::vector<State> by_comp(d.states);
    for (State s = 0; s < d.states; ++s) by_comp[s] = s;
    std::sort(by_comp.begin(), by_comp.end(), [&](State x, State y) { return tail_scc.comp[x] < tail_scc.comp[y]; });
    // On a trimmed automaton every tail cycle leads to acceptance.
    std::vector<long long> tail(d.states, 0);
    for (auto s : by_comp) {
        if (tail_scc.cyclic[tail_scc.comp[s]]) {
            tail[s] = -1;
            continue;
        }
        long long total = fin[s] ? 1 : 0;
        for (auto t : tail_adj[s]) {
            if (tail[t] == -1) {
                total = -1;
                break;
            }
            total = std::min<long long>(total + tail[t], over);
        }
        tail[s] = total;
    }

    std::vector<std::unordered_map<LetterId, std::vector<State>>> step(d.states);
    for (State s = 0; s < d.states; ++s)
        for (const auto& [sym, dst] : out[s]) {
            LetterId l = d.alphabet[sym].entries[0];
            if (l != kPad) step[s][l].push_back(dst);
        }

    using Vec = std::vector<std::pair<State, std::uint32_t>>;
    std::unordered_map<Vec, State, VecHash> ids;
    std::vector<const Vec*> vecs;
    auto label_of = [&](const Vec& v) -> std::size_t {
        std::uint64_t sum = 0;
        for (const auto& [s, c] : v) {
            if (tail[s] == -1) return inf_label;
            sum = std::min<std::uint64_t>(sum + static_cast<std::uint64_t>(c) * static_cast<std::uint64_t>(tail[s]), over);
        }
        return static_cast<std::size_t>(sum);
    };
    std::size_t cap = 8 * state_cap();
    auto get = [&](Vec v) {
        auto [it, fresh] = ids.emplace(std::move(v), static_cast<State>(vecs.size()));
        if (fresh) {
            if (vecs.size() >= cap) throw StateCapExceeded("class counting exceeded " + std::to_string(cap) + " states");
            labels_.push_back(label_of(it->first));
            edges_.emplace_back();
            vecs.push_back(&it->first);
        }
        return it->second;
    };
    Vec init;
    for (auto q : d.initial) init.push_back({q, 1});
    get(init);
    std::vector<std::tuple<LetterId, State, std::uint32_t>> moves;
    for (State cur = 0; cur < vecs.size(); ++cur) {
        moves.clear();
        for (const auto& [s, c] : *vecs[cur])
            for (const auto& [l, dsts] : step[s])
                for (auto dst : dsts) moves.emplace_back(l, dst, c);
        std::sort(moves.begin(), moves.end());
        std::vector<std::pair<LetterId, State>> row;
        for (std::size_t i = 0; i < moves.size();) {
            LetterId l = std::get<0>(moves[i]);
            Vec v;
            for (; i < moves.size() && std::get<0>(moves[i]) == l; ++i) {
                auto [ml, dst, c] = moves[i];
                if (!v.empty() && v.back().first == dst) v.back().second = std::min<std::uint32_t>(v.back().second + c, over);
                else v.push_back({dst, c});
            }
            row.push_back({l, get(std::move(v))});
        }
        edges_[cur] = std::move(row);
    }
    count_labels();
}

void ClassCounter::count_labels() {
    std::size_t n = labels_.size();
    counts_.assign(cap_n_ + 3, ExtendedCount::finite(0));
    if (n == 0) return;
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (State s = 0; s < n; ++s)
        for (const auto& [l, d] : edges_[s]) adj[s].push_back(d);
    Sccs scc = strongly_connected(adj);
    // Words reaching a state after passing a cycle come in infinite families.
    std::vector<bool> after(n, false);
    std::vector<State> stack;
    for (State s = 0; s < n; ++s)
        if (scc.cyclic[scc.comp[s]]) after[s] = true, stack.push_back(s);
    while (!stack.empty()) {
        State q = stack.back();
        stack.pop_back();
        for (auto d : adj[q])
            if (!after[d]) after[d] = true, stack.push_back(d);
    }
    std::vector<State> order(n);
    for (State s = 0; s < n; ++s) order[s] = s;
    std::sort(order.begin(), order.end(), [&](State x, State y) { return scc.comp[x] > scc.comp[y]; });
    std::vector<BigNat> paths(n);
    paths[0] = 1;
    for (auto s : order) {
        if (after[s]) {
            counts_[labels_[s]] = ExtendedCount::inf();
            continue;
        }
        if (!counts_[labels_[s]].infinite) counts_[labels_[s]].value += paths[s];
        for (auto d : adj[s])
            if (!after[d]) paths[d] += paths[s];
    }
}

ExtendedCount ClassCounter::words_with_label(std::size_t label) const { return counts_.at(label); }

ExtendedCount ClassCounter::classes_of_size(std::size_t n) const {
    if (n == 0 || n > cap_n_) throw std::out_of_range("class size outside 1.." + std::to_string(cap_n_));
    auto c = words_with_label(n);
    if (c.infinite) return c;
    if (c.value % n != 0) throw std::logic_error("members of size-n classes not divisible by n");
    return ExtendedCount::finite(c.value / n);
}

Nfa ClassCounter::label_automaton(std::size_t label) const {
    Nfa r = Nfa::over(p_.domain.alphabet);
    std::unordered_map<LetterId, SymIdx> pos;
    for (SymIdx i = 0; i < r.alphabet.size(); ++i) pos[r.alphabet[i].letter()] = i;
    r.states = labels_.size();
    if (r.states) r.initial = {0};
    for (State s = 0; s < r.states; ++s) {
        if (labels_[s] == label) r.final.push_back(s);
        for (const auto& [l, d] : edges_[s]) r.transitions.push_back({s, pos.at(l), d});
    }
    r.canonicalize();
    return trim(r);
}

Nfa ClassCounter::infinite_members() const { return label_automaton(cap_n_ + 2); }

Nfa ClassCounter::members_of_size(std::size_t n) const {
    if (n == 0 || n > cap_n_) throw std::out_of_range("class size outside 1.." + std::to_string(cap_n_));
    return label_automaton(n);
}

ExtendedCount ClassCounter::infinite_classes() const {
    if (words_with_label(cap_n_ + 2) == ExtendedCount::finite(0)) return ExtendedCount::finite(0);
    Presentation q = p_;
    q.relations["Inf"] = Relation{1, as_one_track(infinite_members())};
    auto f = Formula::parse("(and (Inf x) (not (exists y (and (" + rel_ + " x y) (llex y x) (not (= x y))))))");
    FoEngine e(q);
    return cardinality(e.compile(f).aut);
}

ExtendedCount class_size_count(const Presentation& p, std::size_t n) { return ClassCounter(p, n).classes_of_size(n); }

ExtendedCount infinite_class_count(const Presentation& p) { return ClassCounter(p, 1).infinite_classes(); }

SizeCensus size_census(const Presentation& p, std::size_t max_n) {
    ClassCounter c(p, max_n);
    SizeCensus s;
    for (std::size_t n = 1; n <= max_n; ++n) s.finite[n] = c.classes_of_size(n);
    s.infinite = c.infinite_classes();
    return s;
}

ExtendedCount class_size_count_formula(const Presentation& p, std::size_t n, std::size_t cap) {
    if (n == 0) throw std::invalid_argument("class size must be positive");
    if (n > cap) throw StateCapExceeded("exactly-" + std::to_string(n) + " formula exceeds cap " + std::to_string(cap));
    auto at_least = [](std::size_t m) {
        std::vector<std::string> ys;
        for (std::size_t i = 0; i < m; ++i) ys.push_back("y" + std::to_string(i));
        std::vector<Formula> parts;
        for (std::size_t i = 0; i < m; ++i) {
            parts.push_back(Formula::atom("E", {"x", ys[i]}));
            for (std::size_t j = 0; j < i; ++j) parts.push_back(Formula::negate(Formula::eq(ys[j], ys[i])));
        }
        Formula f = Formula::conj(std::move(parts));
        for (auto it = ys.rbegin(); it != ys.rend(); ++it) f = Formula::exists(*it, std::move(f));
        return f;
    };
    Formula rep = Formula::parse("(not (exists z (and (E x z) (llex z x) (not (= x z)))))");
    Formula f = Formula::conj({rep, at_least(n), Formula::negate(at_least(n + 1))});
    FoEngine e(p);
    return cardinality(e.compile(f).aut);
}

Presentation equiv_from_poly(const Polynomial& poly, std::size_t k, std::string_view prefix) {
    if (poly.is_zero()) throw ZeroPolynomial();
    Nfa a = poly_automaton_conv(poly, k);
    RunAutomaton ra = run_automaton(a, prefix);
    Presentation p;
    std::vector<std::string> names;
    for (const auto& s : ra.run.alphabet) names.push_back(s.str());
    p.order = AlphabetOrder(names);
    p.domain = trim(without_epsilon(ra.run));

    // by_letter[q][σ] = indices of transitions q --σ--> .
    std::vector<std::map<SymIdx, std::vector<std::size_t>>> by_letter(a.states);
    for (std::size_t i = 0; i < a.transitions.size(); ++i) by_letter[a.transitions[i].src][a.transitions[i].sym].push_back(i);
    Nfa e = Nfa::over_tuples(2);
    SymbolIndexer sym(e);
    std::unordered_map<std::uint64_t, State> ids;
    std::deque<std::pair<State, State>> work;
    auto fin = a.final_mask();
    auto get = [&](State x, State y) {
        std::uint64_t key = (static_cast<std::uint64_t>(x) << 32) | y;
        auto [it, fresh] = ids.emplace(key, static_cast<State>(e.states));
        if (fresh) {
            ++e.states;
            work.push_back({x, y});
            if (fin[x] && fin[y]) e.final.push_back(it->second);
        }
        return it->second;
    };
    for (auto x : a.initial)
        for (auto y : a.initial) e.initial.push_back(get(x, y));
    while (!work.empty()) {
        auto [x, y] = work.front();
        work.pop_front();
        State from = ids[(static_cast<std::uint64_t>(x) << 32) | y];
        for (const auto& [letter, ts] : by_letter[x]) {
            auto it = by_letter[y].find(letter);
            if (it == by_letter[y].end()) continue;
            for (auto i : ts)
                for (auto j : it->second) {
                    Symbol s = Symbol::make_tuple({ra.run.alphabet[i].letter(), ra.run.alphabet[j].letter()});
                    e.transitions.push_back({from, sym(s), get(a.transitions[i].dst, a.transitions[j].dst)});
                }
        }
    }
    e.canonicalize();
    p.relations["E"] = Relation{2, trim(without_epsilon(e))};
    return p;
}

Nfa counter_lift(const Nfa& r, const std::vector<bool>& lifted, std::string_view counter, std::size_t min_count) {
    if (!r.tuple) throw std::invalid_argument("counter_lift expects a tuple automaton");
    if (lifted.size() != r.arity) throw std::invalid_argument("track mask has the wrong size");
    if (min_count > 1) throw std::invalid_argument("counter minimum must be 0 or 1");
    std::size_t k = r.arity;
    LetterId dollar = intern(counter);
    std::unordered_map<std::uint64_t, LetterId> flat;
    auto flat_letter = [&](LetterId c, LetterId x) {
        if (c == kPad && x == kPad) return kPad;
        std::uint64_t key = (static_cast<std::uint64_t>(c) << 32) | x;
        auto it = flat.find(key);
        if (it == flat.end()) it = flat.emplace(key, flat_symbol(Symbol::make_tuple({c, x})).letter()).first;
        return it->second;
    };
    // Phases: no counter column yet, counter running, counter ended, word ended with counter running.
    enum : State { kStart, kRun, kEnd, kTail };
    Nfa out = Nfa::over_tuples(k);
    out.states = r.states * 4;
    SymbolIndexer sym(out);
    auto id = [](State s, State ph) { return s * 4 + ph; };
    for (auto i : r.initial) out.initial.push_back(id(i, kStart));
    for (auto f : r.final) {
        if (min_count == 0) out.final.push_back(id(f, kStart));
        for (State ph : {kRun, kEnd, kTail}) out.final.push_back(id(f, ph));
    }
    std::vector<LetterId> e(k);
    auto column = [&](const std::vector<LetterId>& src, LetterId c) {
        for (std::size_t i = 0; i < k; ++i) e[i] = lifted[i] ? flat_letter(c, src[i]) : src[i];
        return sym(Symbol::make_tuple(e));
    };
    for (const auto& t : r.transitions) {
        const auto& src = r.alphabet[t.sym].entries;
        SymIdx with = column(src, dollar), without = column(src, kPad);
        out.transitions.push_back({id(t.src, kStart), with, id(t.dst, kRun)});
        out.transitions.push_back({id(t.src, kRun), with, id(t.dst, kRun)});
        if (min_count == 0) out.transitions.push_back({id(t.src, kStart), without, id(t.dst, kEnd)});
        out.transitions.push_back({id(t.src, kRun), without, id(t.dst, kEnd)});
        out.transitions.push_back({id(t.src, kEnd), without, id(t.dst, kEnd)});
    }
    for (std::size_t i = 0; i < k; ++i) e[i] = lifted[i] ? flat_letter(dollar, kPad) : kPad;
    SymIdx idle = sym(Symbol::make_tuple(e));
    for (auto f : r.final)
        for (State ph : {kStart, kRun, kTail}) out.transitions.push_back({id(f, ph), idle, id(f, kTail)});
    out.canonicalize();
    return trim(out);
}

namespace {

const std::string kDollar = "$";

Nfa lift_tracks(const Nfa& r) { return counter_lift(r, std::vector<bool>(r.arity, true), kDollar, 0); }

}  // namespace

Presentation counter_copies(const Presentation& p) {
    LetterId dollar = intern(kDollar);
    Presentation q;
    std::vector<std::string> names{flat_symbol(Symbol::make_tuple({dollar, kPad})).str()};
    for (const auto& l : p.order.letters()) {
        names.push_back(flat_symbol(Symbol::make_tuple({dollar, intern(l)})).str());
        names.push_back(flat_symbol(Symbol::make_tuple({kPad, intern(l)})).str());
    }
    q.order = AlphabetOrder(names);
    Nfa dom = from_one_track(lift_tracks(as_one_track(p.domain)));
    std::vector<Symbol> alpha;
    for (const auto& n : names) alpha.push_back(Symbol::base(n));
    q.domain = with_alphabet(dom, alpha);
    for (const auto& [name, rel] : p.relations) q.relations[name] = Relation{rel.arity, lift_tracks(rel.automaton)};
    return q;
}

Presentation disjoint_union(const std::vector<Presentation>& parts) {
    if (parts.empty()) throw std::invalid_argument("disjoint_union of nothing");
    Presentation r = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto& q = parts[i];
        if (!is_empty(intersect(r.domain, q.domain))) throw ValidationError("domains of a disjoint union overlap");
        r.order = r.order.extended(q.order.letters());
        r.domain = unite(r.domain, q.domain);
        for (const auto& [name, rel] : q.relations) {
            auto it = r.relations.find(name);
            if (it == r.relations.end()) {
                r.relations[name] = rel;
                continue;
            }
            if (it->second.arity != rel.arity) throw ValidationError("relation '" + name + "' has different arities");
            it->second.automaton = unite(it->second.automaton, rel.automaton);
        }
    }
    std::vector<Symbol> alpha;
    for (const auto& l : r.order.letters()) alpha.push_back(Symbol::base(l));
    r.domain = with_alphabet(r.domain, alpha);
    return r;
}

namespace {

std::vector<Presentation> good_parts(std::size_t k) {
    Polynomial x1 = Polynomial::variable(k, 0), x2 = Polynomial::variable(k, 1);
    return {counter_copies(equiv_from_poly(pair_code(x1 + x2, x1), k, "u")),
            counter_copies(equiv_from_poly(pair_code(x1, x1 + x2), k, "v"))};
}

}  // namespace

Presentation e_good_reduction(const Polynomial& p1, const Polynomial& p2, std::size_t k) {
    if (k < 2) throw std::invalid_argument("the reduction needs at least two variables");
    if (p1.is_zero() || p2.is_zero()) throw ZeroPolynomial();
    std::size_t kk = std::max({k, p1.vars, p2.vars});
    auto parts = good_parts(kk);
    parts.insert(parts.begin(), counter_copies(equiv_from_poly(pair_code(p1.with_vars(kk), p2.with_vars(kk)), kk, "s")));
    return disjoint_union(parts);
}

Presentation build_e_good() { return disjoint_union(good_parts(2)); }

ExtendedCount e_good_h(std::size_t n) {
    for (std::size_t s = 2; s * s < n; ++s)
        for (std::size_t y = 1; y < s; ++y) {
            std::size_t z = s - y;
            if (y != z && s * s + 3 * y + z == n) return ExtendedCount::inf();
        }
    return ExtendedCount::finite(0);
}

IsoVerdict iso_check_equiv(const Presentation& a, const Presentation& b, std::size_t n) {
    if (n == 0) throw std::invalid_argument("bound must be positive");
    auto da = cardinality(a.domain), db = cardinality(b.domain);
    bool finite = !da.infinite && !db.infinite;
    std::size_t bound = n;
    if (finite) bound = std::max({bound, static_cast<std::size_t>(da.value), static_cast<std::size_t>(db.value)});
    ClassCounter ca(a, bound), cb(b, bound);
    for (std::size_t m = 1; m <= bound; ++m) {
        auto ha = ca.classes_of_size(m), hb = cb.classes_of_size(m);
        if (!(ha == hb)) return IsoVerdict::differ("h(" + std::to_string(m) + ")", ha, hb);
    }
    auto ia = ca.infinite_classes(), ib = cb.infinite_classes();
    if (!(ia == ib)) return IsoVerdict::differ("h(inf)", ia, ib);
    if (finite) return IsoVerdict::isomorphic();
    return IsoVerdict::consistent({{"N", n}});
}

}  // namespace autostruct
