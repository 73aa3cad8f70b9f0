#include "autostruct/relations.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <stdexcept>

namespace autostruct {

namespace {

constexpr State kDone = static_cast<State>(-1);

struct VecHash {
    std::size_t operator()(const std::vector<State>& v) const noexcept {
        std::size_t h = v.size();
        for (auto x : v) h = (h ^ x) * 0x100000001b3ULL + (h >> 31);
        return h;
    }
};

}  // namespace

AlphabetOrder::AlphabetOrder(std::vector<std::string> letters) : letters_(std::move(letters)) {
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (!rank_.emplace(intern(letters_[i]), i).second)
            throw std::invalid_argument("duplicate letter '" + letters_[i] + "' in alphabet order");
    }
}

AlphabetOrder AlphabetOrder::of(const std::vector<Symbol>& base_alphabet) {
    std::vector<std::string> l;
    for (const auto& s : base_alphabet) l.push_back(s.str());
    return AlphabetOrder(std::move(l));
}

std::size_t AlphabetOrder::rank(LetterId id) const {
    auto it = rank_.find(id);
    if (it == rank_.end()) throw std::invalid_argument("letter '" + letter_name(id) + "' not in alphabet order");
    return it->second;
}

AlphabetOrder AlphabetOrder::extended(const std::vector<std::string>& more) const {
    auto l = letters_;
    for (const auto& m : more)
        if (!contains(intern(m))) l.push_back(m);
    return AlphabetOrder(std::move(l));
}

Word convolution(const std::vector<Word>& words) {
    std::size_t n = 0;
    for (const auto& w : words) n = std::max(n, w.size());
    Word out;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<LetterId> e;
        for (const auto& w : words) e.push_back(j < w.size() ? w[j].letter() : kPad);
        out.push_back(Symbol::make_tuple(std::move(e)));
    }
    return out;
}

std::vector<Word> deconvolution(const Word& cw, std::size_t arity) {
    std::vector<Word> out(arity);
    for (const auto& s : cw) {
        if (s.arity() != arity) throw std::invalid_argument("arity mismatch in convolution");
        for (std::size_t i = 0; i < arity; ++i)
            if (s.entries[i] != kPad) out[i].push_back(Symbol::base_id(s.entries[i]));
    }
    return out;
}

bool is_convolution(const Word& cw) {
    if (cw.empty()) return true;
    std::vector<bool> ended(cw.front().arity(), false);
    for (const auto& s : cw) {
        if (s.all_pad()) return false;
        for (std::size_t i = 0; i < ended.size(); ++i) {
            if (s.entries[i] == kPad) ended[i] = true;
            else if (ended[i]) return false;
        }
    }
    return true;
}

int lex_compare(const Word& u, const Word& v, const AlphabetOrder& ord) {
    std::size_t n = std::min(u.size(), v.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto a = ord.rank(u[i].letter()), b = ord.rank(v[i].letter());
        if (a != b) return a < b ? -1 : 1;
    }
    if (u.size() == v.size()) return 0;
    return u.size() < v.size() ? -1 : 1;
}

int llex_compare(const Word& u, const Word& v, const AlphabetOrder& ord) {
    if (u.size() != v.size()) {
        for (const auto& s : u) ord.rank(s.letter());
        for (const auto& s : v) ord.rank(s.letter());
        return u.size() < v.size() ? -1 : 1;
    }
    return lex_compare(u, v, ord);
}

Nfa tracks_product(const std::vector<const Nfa*>& tracks) {
    std::size_t k = tracks.size();
    if (k == 0) throw std::invalid_argument("tracks_product needs at least one track");
    for (const auto* t : tracks)
        if (t->tuple) throw std::invalid_argument("tracks_product expects base automata");
    std::vector<Adjacency> out;
    std::vector<std::vector<bool>> fin;
    for (const auto* t : tracks) {
        out.push_back(out_edges(*t));
        fin.push_back(t->final_mask());
    }
    Nfa r = Nfa::over_tuples(k);
    std::unordered_map<Symbol, SymIdx, SymbolHash> sym_ids;
    std::unordered_map<std::vector<State>, State, VecHash> ids;
    std::deque<std::vector<State>> work;
    auto get = [&](const std::vector<State>& v) {
        auto [it, fresh] = ids.emplace(v, static_cast<State>(r.states));
        if (fresh) {
            ++r.states;
            work.push_back(v);
            bool accepting = true;
            for (std::size_t i = 0; i < k; ++i) accepting = accepting && (v[i] == kDone || fin[i][v[i]]);
            if (accepting) r.final.push_back(it->second);
        }
        return it->second;
    };
    auto sym = [&](std::vector<LetterId> e) {
        Symbol s = Symbol::make_tuple(std::move(e));
        auto [it, fresh] = sym_ids.emplace(s, static_cast<SymIdx>(r.alphabet.size()));
        if (fresh) r.alphabet.push_back(s);
        return it->second;
    };
    // Initial combinations; a track whose language holds ε may start finished.
    std::vector<std::vector<State>> init_opts(k);
    for (std::size_t i = 0; i < k; ++i) {
        init_opts[i] = tracks[i]->initial;
        if (accepts_epsilon(*tracks[i])) init_opts[i].push_back(kDone);
    }
    std::vector<State> cur(k);
    std::function<void(std::size_t)> init_rec = [&](std::size_t i) {
        if (i == k) {
            r.initial.push_back(get(cur));
            return;
        }
        for (auto s : init_opts[i]) {
            cur[i] = s;
            init_rec(i + 1);
        }
    };
    init_rec(0);
    struct Opt {
        LetterId letter;
        State next;
    };
    while (!work.empty()) {
        auto v = work.front();
        work.pop_front();
        State src = ids[v];
        std::vector<std::vector<Opt>> opts(k);
        for (std::size_t i = 0; i < k; ++i) {
            if (v[i] == kDone) {
                opts[i].push_back({kPad, kDone});
                continue;
            }
            for (const auto& [s, d] : out[i][v[i]]) opts[i].push_back({tracks[i]->alphabet[s].letter(), d});
            if (fin[i][v[i]]) opts[i].push_back({kPad, kDone});
        }
        std::vector<LetterId> e(k);
        std::vector<State> nv(k);
        std::function<void(std::size_t, bool)> rec = [&](std::size_t i, bool any) {
            if (i == k) {
                if (any) r.transitions.push_back({src, sym(e), get(nv)});
                return;
            }
            for (const auto& o : opts[i]) {
                e[i] = o.letter;
                nv[i] = o.next;
                rec(i + 1, any || o.letter != kPad);
            }
        };
        rec(0, false);
    }
    r.canonicalize();
    return r;
}

Nfa conv_language(const Nfa& a, std::size_t k) {
    std::vector<const Nfa*> t(k, &a);
    return tracks_product(t);
}

Nfa order_relation_automaton(const Nfa& d, OrderKind kind, const AlphabetOrder& ord) {
    std::vector<LetterId> letters{kPad};
    for (const auto& s : d.alphabet) {
        ord.rank(s.letter());
        letters.push_back(s.letter());
    }
    // lex status 0 = equal so far, 1 = less, 2 = greater; length status 0 = same, 1 = u shorter, 2 = v shorter.
    Nfa c = Nfa::over_tuples(2);
    c.states = 9;
    c.initial = {0};
    auto id = [](int lex, int len) { return static_cast<State>(lex * 3 + len); };
    SymbolIndexer sym(c);
    for (int lex = 0; lex < 3; ++lex)
        for (int len = 0; len < 3; ++len) {
            bool accept = kind == OrderKind::Lex ? lex != 2 : (len == 1 || (len == 0 && lex != 2));
            if (accept) c.final.push_back(id(lex, len));
            for (auto x : letters)
                for (auto y : letters) {
                    if (x == kPad && y == kPad) continue;
                    if (len == 1 && x != kPad) continue;
                    if (len == 2 && y != kPad) continue;
                    int nlex = lex, nlen = len;
                    if (x == kPad) nlen = 1;
                    if (y == kPad) nlen = 2;
                    if (lex == 0) {
                        if (x == kPad) nlex = 1;
                        else if (y == kPad) nlex = 2;
                        else if (x != y) nlex = ord.rank(x) < ord.rank(y) ? 1 : 2;
                    }
                    c.transitions.push_back({id(lex, len), sym(Symbol::make_tuple({x, y})), id(nlex, nlen)});
                }
        }
    c.canonicalize();
    return trim(intersect(conv_language(d, 2), c));
}

ExtendedCount cardinality(const Nfa& a) {
    Nfa d = trim(determinize(trim(a)));
    if (d.initial.empty()) return ExtendedCount::finite(0);
    auto out = out_edges(d);
    // Iterative DFS for cycle detection and a post-order.
    std::vector<int> color(d.states, 0);
    std::vector<State> order;
    for (auto root : d.initial) {
        if (color[root]) continue;
        std::vector<std::pair<State, std::size_t>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [q, i] = stack.back();
            if (i < out[q].size()) {
                State n = out[q][i++].second;
                if (color[n] == 1) return ExtendedCount::inf();
                if (color[n] == 0) {
                    color[n] = 1;
                    stack.push_back({n, 0});
                }
            } else {
                color[q] = 2;
                order.push_back(q);
                stack.pop_back();
            }
        }
    }
    auto fin = d.final_mask();
    std::vector<BigNat> paths(d.states);
    for (auto q : order) {
        BigNat n = fin[q] ? 1 : 0;
        for (const auto& [s, t] : out[q]) n += paths[t];
        paths[q] = n;
    }
    BigNat total = 0;
    for (auto i : d.initial) total += paths[i];
    return ExtendedCount::finite(total);
}

Nfa difference(const Nfa& a, const Nfa& b, std::size_t cap) {
    if (!a.same_kind(b)) throw AlphabetMismatch("alphabet kinds differ");
    std::unordered_map<Symbol, SymIdx, SymbolHash> bpos;
    for (SymIdx i = 0; i < b.alphabet.size(); ++i) bpos.emplace(b.alphabet[i], i);
    std::vector<std::optional<SymIdx>> amap(a.alphabet.size());
    for (SymIdx i = 0; i < a.alphabet.size(); ++i)
        if (auto it = bpos.find(a.alphabet[i]); it != bpos.end()) amap[i] = it->second;
    return difference_mapped(a, b, amap, cap);
}

Nfa difference_mapped(const Nfa& a, const Nfa& b, const std::vector<std::optional<SymIdx>>& amap, std::size_t cap) {
    Nfa r;
    r.alphabet = a.alphabet;
    r.tuple = a.tuple;
    r.arity = a.arity;
    auto oa = out_edges(a);
    auto ob = out_edges(b);
    auto fa = a.final_mask(), fb = b.final_mask();

    std::unordered_map<std::vector<State>, std::uint32_t, VecHash> subset_ids;
    std::vector<std::vector<State>> subsets;
    std::vector<bool> subset_final;
    auto subset = [&](std::vector<State> s) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        auto [it, fresh] = subset_ids.emplace(s, static_cast<std::uint32_t>(subsets.size()));
        if (fresh) {
            if (subsets.size() >= cap) throw StateCapExceeded("complementation exceeded " + std::to_string(cap) + " subsets");
            bool f = false;
            for (auto q : s) f = f || fb[q];
            subsets.push_back(std::move(s));
            subset_final.push_back(f);
        }
        return it->second;
    };
    std::unordered_map<std::uint64_t, std::uint32_t> step_cache;
    auto step = [&](std::uint32_t sub, SymIdx bs) {
        std::uint64_t key = (static_cast<std::uint64_t>(sub) << 32) | bs;
        if (auto it = step_cache.find(key); it != step_cache.end()) return it->second;
        std::vector<State> next;
        for (auto q : subsets[sub]) {
            auto it = std::lower_bound(ob[q].begin(), ob[q].end(), std::make_pair(bs, State{0}));
            for (; it != ob[q].end() && it->first == bs; ++it) next.push_back(it->second);
        }
        auto id = subset(std::move(next));
        step_cache.emplace(key, id);
        return id;
    };
    std::uint32_t empty_sub = subset({});
    std::unordered_map<std::uint64_t, State> ids;
    std::deque<std::pair<State, std::uint32_t>> work;
    auto get = [&](State q, std::uint32_t sub) {
        std::uint64_t key = (static_cast<std::uint64_t>(q) << 32) | sub;
        auto [it, fresh] = ids.emplace(key, static_cast<State>(r.states));
        if (fresh) {
            if (r.states >= cap * 4) throw StateCapExceeded("difference product too large");
            ++r.states;
            work.push_back({q, sub});
            if (fa[q] && !subset_final[sub]) r.final.push_back(it->second);
        }
        return it->second;
    };
    std::uint32_t init_sub = subset(b.initial);
    for (auto q : a.initial) r.initial.push_back(get(q, init_sub));
    while (!work.empty()) {
        auto [q, sub] = work.front();
        work.pop_front();
        State src = ids[(static_cast<std::uint64_t>(q) << 32) | sub];
        for (const auto& [s, d] : oa[q]) {
            std::uint32_t nsub = amap[s] ? step(sub, *amap[s]) : empty_sub;
            r.transitions.push_back({src, s, get(d, nsub)});
        }
    }
    r.canonicalize();
    return trim(r);
}

Nfa complement(const Nfa& a, const Nfa& universe, std::size_t cap) { return difference(universe, a, cap); }

bool includes(const Nfa& big, const Nfa& small, std::size_t cap) { return is_empty(difference(small, big, cap)); }

bool equivalent(const Nfa& a, const Nfa& b, std::size_t cap) { return includes(a, b, cap) && includes(b, a, cap); }

namespace {

// Rank of a symbol for enumeration: entries compared left to right, pad first.
std::vector<std::size_t> symbol_key(const Symbol& s, const AlphabetOrder* ord, SymIdx idx) {
    if (!ord) return {idx};
    std::vector<std::size_t> k;
    for (auto e : s.entries) k.push_back(e == kPad ? 0 : ord->rank(e) + 1);
    return k;
}

}  // namespace

std::vector<Word> enumerate(const Nfa& a, std::size_t limit, const AlphabetOrder* ord, std::size_t max_length) {
    std::vector<Word> out;
    if (limit == 0) return out;
    Nfa d = trim(determinize(trim(a)));
    if (d.initial.empty()) return out;
    std::vector<std::vector<std::size_t>> keys;
    for (SymIdx i = 0; i < d.alphabet.size(); ++i) keys.push_back(symbol_key(d.alphabet[i], ord, i));
    Adjacency outs = out_edges(d);
    for (auto& v : outs)
        std::sort(v.begin(), v.end(), [&](const auto& x, const auto& y) { return keys[x.first] < keys[y.first]; });
    bool finite = !cardinality(d).infinite;
    std::size_t bound = finite ? std::min(max_length, d.states) : max_length;
    std::vector<std::vector<bool>> can{d.final_mask()};
    State init = d.initial.front();
    Word cur;
    std::function<void(State, std::size_t)> walk = [&](State q, std::size_t rem) {
        if (out.size() >= limit) return;
        if (rem == 0) {
            out.push_back(cur);
            return;
        }
        for (const auto& [s, t] : outs[q]) {
            if (!can[rem - 1][t]) continue;
            cur.push_back(d.alphabet[s]);
            walk(t, rem - 1);
            cur.pop_back();
            if (out.size() >= limit) return;
        }
    };
    for (std::size_t n = 0; n <= bound && out.size() < limit; ++n) {
        if (n > 0) {
            std::vector<bool> next(d.states, false);
            for (State q = 0; q < d.states; ++q)
                for (const auto& [s, t] : outs[q])
                    if (can[n - 1][t]) next[q] = true;
            can.push_back(std::move(next));
        }
        if (can[n][init]) walk(init, n);
        if (n == bound) break;
    }
    return out;
}

Symbol flat_symbol(const Symbol& s) { return s.tuple ? Symbol::base(s.str()) : s; }

Nfa flatten(const Nfa& a) {
    std::vector<Symbol> ns;
    for (const auto& s : a.alphabet) ns.push_back(flat_symbol(s));
    Nfa r = relabel(a, ns);
    r.tuple = false;
    r.arity = 1;
    return r;
}

Nfa section(const Nfa& r, const Word& u, std::size_t fixed, const std::vector<Symbol>& alphabet) {
    if (!r.tuple || r.arity != 2 || fixed > 1) throw std::invalid_argument("section needs a binary relation");
    const std::size_t free = 1 - fixed;
    std::vector<LetterId> w;
    for (const auto& s : u) w.push_back(s.letter());
    const std::size_t n = w.size();
    auto ro = out_edges(r);
    auto rf = r.final_mask();
    auto at = [&](std::size_t i) { return i < n ? w[i] : kPad; };
    // done[q][i]: acceptance reachable reading the rest of u against a padded second track.
    std::vector<std::vector<bool>> done(n + 1, std::vector<bool>(r.states, false));
    for (State q = 0; q < r.states; ++q) done[n][q] = rf[q];
    for (std::size_t i = n; i-- > 0;)
        for (State q = 0; q < r.states; ++q)
            for (const auto& [si, dst] : ro[q]) {
                const auto& e = r.alphabet[si].entries;
                if (e[fixed] == w[i] && e[free] == kPad && done[i + 1][dst]) {
                    done[i][q] = true;
                    break;
                }
            }
    Nfa out = Nfa::over(alphabet);
    SymbolIndexer sym(out);
    std::unordered_map<std::uint64_t, State> ids;
    std::deque<std::pair<State, std::size_t>> work;
    auto get = [&](State q, std::size_t i) {
        std::uint64_t key = (static_cast<std::uint64_t>(i) << 32) | q;
        auto [it, fresh] = ids.emplace(key, static_cast<State>(out.states));
        if (fresh) {
            ++out.states;
            work.push_back({q, i});
            if (done[i][q]) out.final.push_back(it->second);
        }
        return it->second;
    };
    for (auto q : r.initial) out.initial.push_back(get(q, 0));
    while (!work.empty()) {
        auto [q, i] = work.front();
        work.pop_front();
        State from = ids[(static_cast<std::uint64_t>(i) << 32) | q];
        for (const auto& [si, dst] : ro[q]) {
            const auto& e = r.alphabet[si].entries;
            if (e[free] == kPad || e[fixed] != at(i)) continue;
            out.transitions.push_back({from, sym(Symbol::base_id(e[free])), get(dst, std::min(i + 1, n))});
        }
    }
    out.canonicalize();
    return trim(out);
}


}  // namespace autostruct
