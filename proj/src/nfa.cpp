#include "autostruct/nfa.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <unordered_map>

namespace autostruct {

namespace {

template <class T>
void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

struct VecHash {
    std::size_t operator()(const std::vector<State>& v) const noexcept {
        std::size_t h = v.size();
        for (auto x : v) h = (h ^ x) * 0x100000001b3ULL + (h >> 31);
        return h;
    }
};

// Maps every symbol of b to its index in a merged alphabet that starts with a's symbols.
std::vector<Symbol> merge_alphabets(const Nfa& a, const Nfa& b, std::vector<SymIdx>& bmap) {
    std::vector<Symbol> merged = a.alphabet;
    std::unordered_map<Symbol, SymIdx, SymbolHash> pos;
    for (SymIdx i = 0; i < merged.size(); ++i) pos.emplace(merged[i], i);
    bmap.resize(b.alphabet.size());
    for (SymIdx i = 0; i < b.alphabet.size(); ++i) {
        auto [it, fresh] = pos.emplace(b.alphabet[i], static_cast<SymIdx>(merged.size()));
        if (fresh) merged.push_back(b.alphabet[i]);
        bmap[i] = it->second;
    }
    return merged;
}

void require_same_alphabet(const Nfa& a, const Nfa& b) {
    if (!a.same_kind(b)) throw AlphabetMismatch("alphabet kinds differ");
    auto x = a.alphabet, y = b.alphabet;
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    if (x != y) throw AlphabetMismatch("alphabets differ");
}

Nfa disjoint_union(const Nfa& a, const Nfa& b) {
    if (!a.same_kind(b)) throw AlphabetMismatch("alphabet kinds differ");
    std::vector<SymIdx> bmap;
    Nfa r;
    r.alphabet = merge_alphabets(a, b, bmap);
    r.tuple = a.tuple;
    r.arity = a.arity;
    r.states = a.states + b.states;
    auto off = static_cast<State>(a.states);
    r.initial = a.initial;
    r.final = a.final;
    for (auto s : b.initial) r.initial.push_back(s + off);
    for (auto s : b.final) r.final.push_back(s + off);
    r.transitions = a.transitions;
    for (const auto& t : b.transitions) r.transitions.push_back({t.src + off, bmap[t.sym], t.dst + off});
    r.canonicalize();
    return r;
}

Nfa synchronous_product(const Nfa& a, const Nfa& b) {
    if (!a.same_kind(b)) throw AlphabetMismatch("alphabet kinds differ");
    std::vector<SymIdx> bmap;
    Nfa r;
    r.alphabet = merge_alphabets(a, b, bmap);
    r.tuple = a.tuple;
    r.arity = a.arity;
    auto oa = out_edges(a);
    Adjacency ob(b.states);
    for (const auto& t : b.transitions) ob[t.src].push_back({bmap[t.sym], t.dst});
    for (auto& v : ob) std::sort(v.begin(), v.end());
    auto fa = a.final_mask();
    auto fb = b.final_mask();

    std::unordered_map<std::uint64_t, State> ids;
    std::deque<std::pair<State, State>> work;
    auto get = [&](State p, State q) {
        std::uint64_t key = (static_cast<std::uint64_t>(p) << 32) | q;
        auto [it, fresh] = ids.emplace(key, static_cast<State>(r.states));
        if (fresh) {
            ++r.states;
            work.push_back({p, q});
            if (fa[p] && fb[q]) r.final.push_back(it->second);
        }
        return it->second;
    };
    for (auto p : a.initial)
        for (auto q : b.initial) r.initial.push_back(get(p, q));
    while (!work.empty()) {
        auto [p, q] = work.front();
        work.pop_front();
        State src = ids[(static_cast<std::uint64_t>(p) << 32) | q];
        const auto& ea = oa[p];
        const auto& eb = ob[q];
        std::size_t j0 = 0;
        for (const auto& [sa, da] : ea) {
            while (j0 < eb.size() && eb[j0].first < sa) ++j0;
            for (std::size_t j = j0; j < eb.size() && eb[j].first == sa; ++j) {
                State dst = get(da, eb[j].second);
                r.transitions.push_back({src, sa, dst});
            }
        }
    }
    r.canonicalize();
    return r;
}

}  // namespace

Nfa Nfa::over(const std::vector<Symbol>& alphabet) {
    Nfa a;
    a.alphabet = alphabet;
    if (!alphabet.empty()) {
        a.tuple = alphabet.front().tuple;
        a.arity = alphabet.front().arity();
    }
    return a;
}

Nfa Nfa::over_tuples(std::size_t arity) {
    Nfa a;
    a.tuple = true;
    a.arity = arity;
    return a;
}

SymbolIndexer::SymbolIndexer(Nfa& a) : a_(a) {
    for (SymIdx i = 0; i < a.alphabet.size(); ++i) pos_.emplace(a.alphabet[i], i);
}

SymIdx SymbolIndexer::operator()(const Symbol& s) {
    auto [it, fresh] = pos_.emplace(s, static_cast<SymIdx>(a_.alphabet.size()));
    if (fresh) a_.alphabet.push_back(s);
    return it->second;
}

State Nfa::add_state() { return static_cast<State>(states++); }

SymIdx Nfa::add_symbol(const Symbol& s) {
    if (auto i = find_symbol(s)) return *i;
    alphabet.push_back(s);
    return static_cast<SymIdx>(alphabet.size() - 1);
}

std::optional<SymIdx> Nfa::find_symbol(const Symbol& s) const {
    for (SymIdx i = 0; i < alphabet.size(); ++i)
        if (alphabet[i] == s) return i;
    return std::nullopt;
}

void Nfa::canonicalize() {
    sort_unique(initial);
    sort_unique(final);
    sort_unique(transitions);
}

void Nfa::check() const {
    auto in_range = [&](State s) { return s < states; };
    for (auto s : initial)
        if (!in_range(s)) throw ValidationError("initial state out of range");
    for (auto s : final)
        if (!in_range(s)) throw ValidationError("final state out of range");
    for (std::size_t i = 0; i < transitions.size(); ++i) {
        const auto& t = transitions[i];
        if (!in_range(t.src) || !in_range(t.dst) || t.sym >= alphabet.size())
            throw ValidationError("transition index out of range");
        if (i && !(transitions[i - 1] < t)) throw ValidationError("transition list not canonical or has duplicates");
    }
    for (const auto& s : alphabet) {
        if (s.tuple != tuple || (tuple && s.arity() != arity)) throw ValidationError("symbol kind mismatch");
        if (s.tuple && s.all_pad()) throw ValidationError("all-pad tuple symbol");
    }
}

std::vector<bool> Nfa::initial_mask() const {
    std::vector<bool> m(states, false);
    for (auto s : initial) m[s] = true;
    return m;
}

std::vector<bool> Nfa::final_mask() const {
    std::vector<bool> m(states, false);
    for (auto s : final) m[s] = true;
    return m;
}

Adjacency out_edges(const Nfa& a) {
    Adjacency out(a.states);
    for (const auto& t : a.transitions) out[t.src].push_back({t.sym, t.dst});
    for (auto& v : out) std::sort(v.begin(), v.end());
    return out;
}

Adjacency in_edges(const Nfa& a) {
    Adjacency in(a.states);
    for (const auto& t : a.transitions) in[t.dst].push_back({t.sym, t.src});
    for (auto& v : in) std::sort(v.begin(), v.end());
    return in;
}

std::size_t state_cap() {
    if (const char* env = std::getenv("AUTOSTRUCT_STATE_CAP")) {
        char* end = nullptr;
        auto v = std::strtoull(env, &end, 10);
        if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return 200000;
}

bool is_deterministic(const Nfa& a) {
    if (a.initial.size() > 1) return false;
    for (std::size_t i = 1; i < a.transitions.size(); ++i) {
        const auto& p = a.transitions[i - 1];
        const auto& t = a.transitions[i];
        if (p.src == t.src && p.sym == t.sym) return false;
    }
    return true;
}

namespace {

std::vector<SymIdx> index_word(const Nfa& a, const Word& w) {
    std::unordered_map<Symbol, SymIdx, SymbolHash> pos;
    for (SymIdx i = 0; i < a.alphabet.size(); ++i) pos.emplace(a.alphabet[i], i);
    std::vector<SymIdx> r;
    r.reserve(w.size());
    for (const auto& s : w) {
        auto it = pos.find(s);
        r.push_back(it == pos.end() ? static_cast<SymIdx>(-1) : it->second);
    }
    return r;
}

}  // namespace

bool accepts(const Nfa& a, const Word& w) {
    if (!std::is_sorted(a.transitions.begin(), a.transitions.end())) {
        Nfa c = a;
        c.canonicalize();
        return accepts(c, w);
    }
    std::vector<SymIdx> iw;
    for (const auto& s : w) {
        auto i = a.find_symbol(s);
        if (!i) return false;
        iw.push_back(*i);
    }
    std::vector<State> cur(a.initial.begin(), a.initial.end()), next;
    for (auto s : iw) {
        next.clear();
        for (State q : cur) {
            auto lo = std::lower_bound(a.transitions.begin(), a.transitions.end(), Transition{q, s, 0});
            for (auto it = lo; it != a.transitions.end() && it->src == q && it->sym == s; ++it) next.push_back(it->dst);
        }
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        cur.swap(next);
        if (cur.empty()) return false;
    }
    auto fin = std::set<State>(a.final.begin(), a.final.end());
    for (auto q : cur)
        if (fin.count(q)) return true;
    return false;
}

BigNat count_accepting_runs_idx(const Nfa& a, const std::vector<SymIdx>& w) {
    if (w.empty()) throw EmptyWord();
    std::vector<std::vector<const Transition*>> by_sym(a.alphabet.size());
    for (const auto& t : a.transitions) by_sym[t.sym].push_back(&t);
    std::vector<BigNat> cur(a.states), next(a.states);
    for (auto s : a.initial) cur[s] += 1;
    for (auto s : w) {
        for (auto& x : next) x = 0;
        if (s < by_sym.size())
            for (const auto* t : by_sym[s])
                if (cur[t->src] != 0) next[t->dst] += cur[t->src];
        cur.swap(next);
    }
    BigNat total = 0;
    for (auto f : a.final) total += cur[f];
    return total;
}

BigNat count_accepting_runs(const Nfa& a, const Word& w) {
    if (w.empty()) throw EmptyWord();
    return count_accepting_runs_idx(a, index_word(a, w));
}

Nfa nfa_union(const Nfa& a, const Nfa& b) {
    require_same_alphabet(a, b);
    return disjoint_union(a, b);
}

Nfa nfa_product(const Nfa& a, const Nfa& b) {
    require_same_alphabet(a, b);
    return synchronous_product(a, b);
}

Nfa unite(const Nfa& a, const Nfa& b) { return disjoint_union(a, b); }
Nfa intersect(const Nfa& a, const Nfa& b) { return synchronous_product(a, b); }

Nfa determinize(const Nfa& a, std::size_t cap) {
    Nfa r;
    r.alphabet = a.alphabet;
    r.tuple = a.tuple;
    r.arity = a.arity;
    auto out = out_edges(a);
    auto fin = a.final_mask();
    std::unordered_map<std::vector<State>, State, VecHash> ids;
    std::vector<std::vector<State>> subsets;
    auto get = [&](std::vector<State> s) {
        auto [it, fresh] = ids.emplace(s, static_cast<State>(subsets.size()));
        if (fresh) {
            if (subsets.size() >= cap) throw StateCapExceeded("determinization exceeded " + std::to_string(cap) + " states");
            subsets.push_back(std::move(s));
        }
        return it->second;
    };
    auto init = a.initial;
    sort_unique(init);
    r.initial.push_back(get(init));
    std::vector<std::pair<SymIdx, State>> moves;
    for (State cur = 0; cur < subsets.size(); ++cur) {
        moves.clear();
        bool accepting = false;
        for (auto q : subsets[cur]) {
            accepting = accepting || fin[q];
            moves.insert(moves.end(), out[q].begin(), out[q].end());
        }
        if (accepting) r.final.push_back(cur);
        std::sort(moves.begin(), moves.end());
        moves.erase(std::unique(moves.begin(), moves.end()), moves.end());
        for (std::size_t i = 0; i < moves.size();) {
            std::size_t j = i;
            std::vector<State> tgt;
            while (j < moves.size() && moves[j].first == moves[i].first) tgt.push_back(moves[j++].second);
            State d = get(std::move(tgt));
            r.transitions.push_back({cur, moves[i].first, d});
            i = j;
        }
    }
    r.states = subsets.size();
    r.canonicalize();
    return r;
}

Nfa trim(const Nfa& a) {
    auto out = out_edges(a);
    auto in = in_edges(a);
    std::vector<bool> acc(a.states, false), coacc(a.states, false);
    std::vector<State> stack(a.initial.begin(), a.initial.end());
    for (auto s : stack) acc[s] = true;
    while (!stack.empty()) {
        auto q = stack.back();
        stack.pop_back();
        for (const auto& [s, d] : out[q])
            if (!acc[d]) acc[d] = true, stack.push_back(d);
    }
    stack.assign(a.final.begin(), a.final.end());
    for (auto s : stack) coacc[s] = true;
    while (!stack.empty()) {
        auto q = stack.back();
        stack.pop_back();
        for (const auto& [s, d] : in[q])
            if (!coacc[d]) coacc[d] = true, stack.push_back(d);
    }
    std::vector<State> id(a.states, static_cast<State>(-1));
    Nfa r;
    r.alphabet = a.alphabet;
    r.tuple = a.tuple;
    r.arity = a.arity;
    for (State q = 0; q < a.states; ++q)
        if (acc[q] && coacc[q]) id[q] = static_cast<State>(r.states++);
    for (auto s : a.initial)
        if (id[s] != static_cast<State>(-1)) r.initial.push_back(id[s]);
    for (auto s : a.final)
        if (id[s] != static_cast<State>(-1)) r.final.push_back(id[s]);
    for (const auto& t : a.transitions)
        if (id[t.src] != static_cast<State>(-1) && id[t.dst] != static_cast<State>(-1))
            r.transitions.push_back({id[t.src], t.sym, id[t.dst]});
    r.canonicalize();
    return r;
}

Nfa minimize(const Nfa& a, std::size_t cap) {
    Nfa d = trim(determinize(trim(a), cap));
    if (d.states == 0) return d;
    auto out = out_edges(d);
    auto fin = d.final_mask();
    std::vector<State> cls(d.states);
    for (State q = 0; q < d.states; ++q) cls[q] = fin[q] ? 1 : 0;
    std::size_t count = 0;
    for (;;) {
        std::map<std::pair<State, std::vector<std::pair<SymIdx, State>>>, State> sig;
        std::vector<State> next(d.states);
        for (State q = 0; q < d.states; ++q) {
            std::vector<std::pair<SymIdx, State>> row;
            for (const auto& [s, t] : out[q]) row.push_back({s, cls[t]});
            auto [it, fresh] = sig.emplace(std::make_pair(cls[q], std::move(row)), static_cast<State>(sig.size()));
            next[q] = it->second;
        }
        std::size_t n = sig.size();
        cls.swap(next);
        if (n == count) break;
        count = n;
    }
    Nfa r;
    r.alphabet = d.alphabet;
    r.tuple = d.tuple;
    r.arity = d.arity;
    r.states = count;
    for (auto s : d.initial) r.initial.push_back(cls[s]);
    for (auto s : d.final) r.final.push_back(cls[s]);
    for (const auto& t : d.transitions) r.transitions.push_back({cls[t.src], t.sym, cls[t.dst]});
    r.canonicalize();
    return r;
}

bool accepts_epsilon(const Nfa& a) {
    auto fin = a.final_mask();
    for (auto s : a.initial)
        if (fin[s]) return true;
    return false;
}

Nfa without_epsilon(const Nfa& a) {
    if (!accepts_epsilon(a)) return a;
    Nfa r = a;
    auto fin = a.final_mask();
    auto out = out_edges(a);
    std::vector<State> init;
    for (auto s : a.initial) {
        if (!fin[s]) {
            init.push_back(s);
            continue;
        }
        State c = r.add_state();
        init.push_back(c);
        for (const auto& [sym, d] : out[s]) r.transitions.push_back({c, sym, d});
    }
    r.initial = init;
    r.canonicalize();
    return r;
}

bool is_empty(const Nfa& a) { return trim(a).initial.empty(); }

Nfa with_alphabet(const Nfa& a, const std::vector<Symbol>& alphabet) {
    Nfa base = Nfa::over(alphabet);
    base.tuple = a.tuple;
    base.arity = a.arity;
    std::vector<SymIdx> map;
    Nfa r = a;
    r.alphabet = merge_alphabets(base, a, map);
    for (auto& t : r.transitions) t.sym = map[t.sym];
    r.canonicalize();
    return r;
}

Nfa relabel(const Nfa& a, const std::vector<Symbol>& new_symbols) {
    Nfa r;
    r.states = a.states;
    r.initial = a.initial;
    r.final = a.final;
    if (!new_symbols.empty()) {
        r.tuple = new_symbols.front().tuple;
        r.arity = new_symbols.front().arity();
    }
    std::unordered_map<Symbol, SymIdx, SymbolHash> pos;
    std::vector<SymIdx> map(a.alphabet.size());
    for (SymIdx i = 0; i < a.alphabet.size(); ++i) {
        auto [it, fresh] = pos.emplace(new_symbols[i], static_cast<SymIdx>(r.alphabet.size()));
        if (fresh) r.alphabet.push_back(new_symbols[i]);
        map[i] = it->second;
    }
    for (const auto& t : a.transitions) r.transitions.push_back({t.src, map[t.sym], t.dst});
    r.canonicalize();
    return r;
}

Nfa guarded_union(const Nfa& d, const Nfa& a) { return unite(determinize(d), a); }

Nfa guarded_product(const Nfa& d, const Nfa& a) { return trim(intersect(determinize(d), a)); }

namespace {

// Jump construction: the last letter of a word of a continues into b's initial states.
Nfa jump_concat(const Nfa& a, const Nfa& b) {
    if (!a.same_kind(b)) throw AlphabetMismatch("alphabet kinds differ");
    std::vector<SymIdx> bmap;
    Nfa r;
    r.alphabet = merge_alphabets(a, b, bmap);
    r.tuple = a.tuple;
    r.arity = a.arity;
    r.states = a.states + b.states;
    auto off = static_cast<State>(a.states);
    auto fa = a.final_mask();
    r.transitions = a.transitions;
    for (const auto& t : b.transitions) r.transitions.push_back({t.src + off, bmap[t.sym], t.dst + off});
    for (const auto& t : a.transitions)
        if (fa[t.dst])
            for (auto p : b.initial) r.transitions.push_back({t.src, t.sym, p + off});
    r.initial = a.initial;
    if (accepts_epsilon(a))
        for (auto p : b.initial) r.initial.push_back(p + off);
    for (auto f : b.final) r.final.push_back(f + off);
    if (accepts_epsilon(b)) r.final.insert(r.final.end(), a.final.begin(), a.final.end());
    r.canonicalize();
    return r;
}

}  // namespace

Nfa concat(const Nfa& a, const Nfa& b) { return jump_concat(a, b); }

bool concat_is_unambiguous(const Nfa& a, const Nfa& b) {
    // Two splits of one word give two runs of m that sit in different states at some point.
    Nfa m = trim(jump_concat(trim(determinize(a)), trim(determinize(b))));
    auto om = out_edges(m);
    std::set<std::pair<State, State>> seen;
    std::deque<std::pair<State, State>> work;
    for (auto p : m.initial)
        for (auto q : m.initial) work.push_back({p, q}), seen.insert({p, q});
    auto in = in_edges(m);
    std::set<std::pair<State, State>> coacc;
    {
        std::deque<std::pair<State, State>> w2;
        for (auto f : m.final)
            for (auto g : m.final) coacc.insert({f, g}), w2.push_back({f, g});
        while (!w2.empty()) {
            auto [p, q] = w2.front();
            w2.pop_front();
            for (const auto& [s1, p1] : in[p])
                for (const auto& [s2, q1] : in[q])
                    if (s1 == s2 && coacc.insert({p1, q1}).second) w2.push_back({p1, q1});
        }
    }
    while (!work.empty()) {
        auto [p, q] = work.front();
        work.pop_front();
        if (p != q && coacc.count({p, q})) return false;
        for (const auto& [s1, p1] : om[p])
            for (const auto& [s2, q1] : om[q])
                if (s1 == s2 && seen.insert({p1, q1}).second) work.push_back({p1, q1});
    }
    return true;
}

Nfa concat_unambiguous(const Nfa& d, const Nfa& a, bool verify) {
    if (verify && !concat_is_unambiguous(d, a)) throw AmbiguousConcat("concatenation is ambiguous");
    return jump_concat(trim(determinize(d)), a);
}

Nfa word_automaton(const std::vector<Symbol>& alphabet, const Word& w) {
    Nfa r = Nfa::over(alphabet);
    State q = r.add_state();
    r.initial.push_back(q);
    for (const auto& s : w) {
        State n = r.add_state();
        r.add_transition(q, s, n);
        q = n;
    }
    r.final.push_back(q);
    r.canonicalize();
    return r;
}

Nfa letters_plus(const std::vector<Symbol>& alphabet, const std::vector<Symbol>& letters) {
    Nfa r = Nfa::over(alphabet);
    State q0 = r.add_state(), q1 = r.add_state();
    r.initial.push_back(q0);
    r.final.push_back(q1);
    for (const auto& s : letters) {
        r.add_transition(q0, s, q1);
        r.add_transition(q1, s, q1);
    }
    r.canonicalize();
    return r;
}

Nfa letters_star(const std::vector<Symbol>& alphabet, const std::vector<Symbol>& letters) {
    Nfa r = Nfa::over(alphabet);
    State q0 = r.add_state();
    r.initial.push_back(q0);
    r.final.push_back(q0);
    for (const auto& s : letters) r.add_transition(q0, s, q0);
    r.canonicalize();
    return r;
}

Nfa epsilon_automaton(const std::vector<Symbol>& alphabet) {
    Nfa r = Nfa::over(alphabet);
    State q = r.add_state();
    r.initial.push_back(q);
    r.final.push_back(q);
    return r;
}

Nfa empty_automaton(const std::vector<Symbol>& alphabet) {
    Nfa r = Nfa::over(alphabet);
    r.initial.push_back(r.add_state());
    return r;
}

Nfa plus(const Nfa& a) {
    Nfa r = a;
    auto fin = a.final_mask();
    for (const auto& t : a.transitions)
        if (fin[t.dst])
            for (auto i : a.initial) r.transitions.push_back({t.src, t.sym, i});
    r.canonicalize();
    return r;
}

Nfa star(const Nfa& a) {
    Nfa r = plus(a);
    if (accepts_epsilon(r)) return r;
    auto out = out_edges(r);
    State n = r.add_state();
    for (auto i : a.initial)
        for (const auto& [s, d] : out[i]) r.transitions.push_back({n, s, d});
    r.initial = {n};
    r.final.push_back(n);
    r.canonicalize();
    return r;
}

Nfa power(const Nfa& a, std::size_t n) {
    Nfa r = epsilon_automaton(a.alphabet);
    r.tuple = a.tuple;
    r.arity = a.arity;
    for (std::size_t i = 0; i < n; ++i) r = concat(r, a);
    return r;
}

Word RunAutomaton::project(const Word& run_word) const {
    std::unordered_map<Symbol, SymIdx, SymbolHash> pos;
    for (SymIdx i = 0; i < run.alphabet.size(); ++i) pos.emplace(run.alphabet[i], i);
    Word w;
    for (const auto& s : run_word) w.push_back(source.alphabet[pi[pos.at(s)]]);
    return w;
}

RunAutomaton run_automaton(const Nfa& a, std::string_view prefix) {
    RunAutomaton r;
    r.source = a;
    r.run.states = a.states;
    r.run.initial = a.initial;
    r.run.final = a.final;
    for (std::size_t i = 0; i < a.transitions.size(); ++i) {
        const auto& t = a.transitions[i];
        r.run.alphabet.push_back(Symbol::base(std::string(prefix) + std::to_string(i)));
        r.run.transitions.push_back({t.src, static_cast<SymIdx>(i), t.dst});
        r.pi.push_back(t.sym);
    }
    r.run.canonicalize();
    return r;
}

}  // namespace autostruct
