#include "autostruct/fo.hpp"
#include "autostruct/graph.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace autostruct {

namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<LetterId>& v) const noexcept {
        std::size_t h = v.size();
        for (auto x : v) h = (h ^ x) * 0x100000001b3ULL + (h >> 29);
        return h;
    }
};

Symbol idle_symbol(std::size_t arity) { return Symbol::make_tuple(std::vector<LetterId>(arity, kPad)); }

// Adds a sink reached by all-pad columns from final states: the track group has ended.
Nfa with_idle(const Nfa& a) {
    Nfa r = a;
    r.tuple = true;
    State done = r.add_state();
    SymIdx idle = static_cast<SymIdx>(r.alphabet.size());
    r.alphabet.push_back(idle_symbol(a.arity));
    for (auto f : a.final) r.transitions.push_back({f, idle, done});
    r.transitions.push_back({done, idle, done});
    r.final.push_back(done);
    r.canonicalize();
    return r;
}

Nfa arity0(bool value) {
    Nfa r = Nfa::over_tuples(0);
    State q = r.add_state();
    r.initial = {q};
    if (value) r.final = {q};
    return r;
}

Nfa empty_tuple_automaton(std::size_t arity) {
    Nfa r = Nfa::over_tuples(arity);
    r.initial = {r.add_state()};
    return r;
}

// ---------- s-expression parsing ----------

struct SExpr {
    std::string atom;
    std::vector<SExpr> list;
    bool is_list = false;
};

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> toks;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) toks.push_back(cur), cur.clear();
    };
    for (char c : s) {
        if (c == '(' || c == ')') {
            flush();
            toks.emplace_back(1, c);
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else {
            cur += c;
        }
    }
    flush();
    return toks;
}

SExpr read_sexpr(const std::vector<std::string>& toks, std::size_t& pos) {
    if (pos >= toks.size()) throw std::invalid_argument("unexpected end of formula");
    const auto& t = toks[pos++];
    if (t == ")") throw std::invalid_argument("unexpected ')'");
    if (t != "(") return SExpr{t, {}, false};
    SExpr e;
    e.is_list = true;
    while (pos < toks.size() && toks[pos] != ")") e.list.push_back(read_sexpr(toks, pos));
    if (pos >= toks.size()) throw std::invalid_argument("missing ')'");
    ++pos;
    return e;
}

Formula from_sexpr(const SExpr& e) {
    if (!e.is_list) {
        if (e.atom == "true") return Formula{};
        if (e.atom == "false") return Formula{Formula::Kind::False, {}, {}, {}};
        throw std::invalid_argument("bare symbol '" + e.atom + "' is not a formula");
    }
    if (e.list.empty() || e.list[0].is_list) throw std::invalid_argument("malformed formula");
    const auto& head = e.list[0].atom;
    auto sub = [&](std::size_t i) { return from_sexpr(e.list.at(i)); };
    auto var = [&](std::size_t i) {
        const auto& x = e.list.at(i);
        if (x.is_list) throw std::invalid_argument("expected a variable");
        return x.atom;
    };
    std::size_t n = e.list.size();
    if (head == "not") {
        if (n != 2) throw std::invalid_argument("not takes one argument");
        return Formula::negate(sub(1));
    }
    if (head == "and" || head == "or") {
        std::vector<Formula> fs;
        for (std::size_t i = 1; i < n; ++i) fs.push_back(sub(i));
        return head == "and" ? Formula::conj(std::move(fs)) : Formula::disj(std::move(fs));
    }
    if (head == "implies" || head == "->") {
        if (n != 3) throw std::invalid_argument("implies takes two arguments");
        return Formula::implies(sub(1), sub(2));
    }
    if (head == "exists" || head == "forall" || head == "exinf") {
        if (n != 3) throw std::invalid_argument(head + " takes a variable and a formula");
        if (head == "exists") return Formula::exists(var(1), sub(2));
        if (head == "forall") return Formula::forall(var(1), sub(2));
        return Formula::exinf(var(1), sub(2));
    }
    std::vector<std::string> args;
    for (std::size_t i = 1; i < n; ++i) args.push_back(var(i));
    if (head == "=") {
        if (args.size() != 2) throw std::invalid_argument("= takes two variables");
        return Formula::eq(args[0], args[1]);
    }
    return Formula::atom(head, std::move(args));
}

// Pushes negations inward; forall becomes not-exists-not.  Output uses only
// True, False, Atom, Eq, Not(Atom|Eq|Exists|ExistsInf), And, Or, Exists, ExistsInf.
Formula normalize(const Formula& f, bool neg) {
    using K = Formula::Kind;
    switch (f.kind) {
        case K::True:
        case K::False: {
            bool v = (f.kind == K::True) != neg;
            return v ? Formula{} : Formula{K::False, {}, {}, {}};
        }
        case K::Atom:
        case K::Eq:
            return neg ? Formula::negate(f) : f;
        case K::Not:
            return normalize(f.kids[0], !neg);
        case K::And:
        case K::Or: {
            std::vector<Formula> ks;
            for (const auto& k : f.kids) ks.push_back(normalize(k, neg));
            bool is_and = (f.kind == K::And) != neg;
            Formula r;
            r.kind = is_and ? K::And : K::Or;
            r.kids = std::move(ks);
            return r;
        }
        case K::Implies: {
            Formula r;
            r.kind = neg ? K::And : K::Or;
            r.kids = {normalize(f.kids[0], !neg), normalize(f.kids[1], neg)};
            return r;
        }
        case K::Exists: {
            Formula e = Formula::exists(f.name, normalize(f.kids[0], false));
            return neg ? Formula::negate(std::move(e)) : e;
        }
        case K::Forall: {
            Formula e = Formula::exists(f.name, normalize(f.kids[0], true));
            return neg ? e : Formula::negate(std::move(e));
        }
        case K::ExistsInf: {
            Formula e = Formula::exinf(f.name, normalize(f.kids[0], false));
            return neg ? Formula::negate(std::move(e)) : e;
        }
    }
    return f;
}

std::vector<std::string> merged_vars(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> u;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
    return u;
}

bool subset_of(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

// ---------- Presentation ----------

const Relation& Presentation::relation(const std::string& name) const {
    auto it = relations.find(name);
    if (it == relations.end()) throw ValidationError("unknown relation '" + name + "'");
    return it->second;
}

void Presentation::validate() const {
    domain.check();
    if (domain.tuple) throw ValidationError("domain must be over base letters");
    for (const auto& s : domain.alphabet) order.rank(s.letter());
    for (const auto& [name, rel] : relations) {
        rel.automaton.check();
        if (!rel.automaton.tuple || rel.automaton.arity != rel.arity)
            throw ValidationError("relation '" + name + "' has wrong arity");
        std::vector<const Nfa*> tracks(rel.arity, &domain);
        if (!includes(tracks_product(tracks), rel.automaton))
            throw ValidationError("relation '" + name + "' accepts words outside the domain convolution");
    }
}

// ---------- Formula ----------

Formula Formula::parse(std::string_view text) {
    auto toks = tokenize(text);
    std::size_t pos = 0;
    Formula f = from_sexpr(read_sexpr(toks, pos));
    if (pos != toks.size()) throw std::invalid_argument("trailing input after formula");
    return f;
}

Formula Formula::atom(std::string rel, std::vector<std::string> args) { return Formula{Kind::Atom, std::move(rel), std::move(args), {}}; }
Formula Formula::eq(std::string x, std::string y) { return Formula{Kind::Eq, "=", {std::move(x), std::move(y)}, {}}; }
Formula Formula::negate(Formula f) { return Formula{Kind::Not, {}, {}, {std::move(f)}}; }
Formula Formula::conj(std::vector<Formula> fs) {
    if (fs.empty()) return Formula{};
    if (fs.size() == 1) return fs[0];
    return Formula{Kind::And, {}, {}, std::move(fs)};
}
Formula Formula::disj(std::vector<Formula> fs) {
    if (fs.empty()) return Formula{Kind::False, {}, {}, {}};
    if (fs.size() == 1) return fs[0];
    return Formula{Kind::Or, {}, {}, std::move(fs)};
}
Formula Formula::implies(Formula a, Formula b) { return Formula{Kind::Implies, {}, {}, {std::move(a), std::move(b)}}; }
Formula Formula::exists(std::string v, Formula f) { return Formula{Kind::Exists, std::move(v), {}, {std::move(f)}}; }
Formula Formula::forall(std::string v, Formula f) { return Formula{Kind::Forall, std::move(v), {}, {std::move(f)}}; }
Formula Formula::exinf(std::string v, Formula f) { return Formula{Kind::ExistsInf, std::move(v), {}, {std::move(f)}}; }

std::set<std::string> Formula::free_vars() const {
    std::set<std::string> out;
    switch (kind) {
        case Kind::True:
        case Kind::False:
            break;
        case Kind::Atom:
        case Kind::Eq:
            out.insert(args.begin(), args.end());
            break;
        case Kind::Exists:
        case Kind::Forall:
        case Kind::ExistsInf:
            out = kids[0].free_vars();
            out.erase(name);
            break;
        default:
            for (const auto& k : kids) {
                auto s = k.free_vars();
                out.insert(s.begin(), s.end());
            }
    }
    return out;
}

std::size_t Formula::depth() const {
    std::size_t d = 0;
    for (const auto& k : kids) d = std::max(d, k.depth());
    bool quant = kind == Kind::Exists || kind == Kind::Forall || kind == Kind::ExistsInf;
    return d + (quant ? 1 : 0);
}

std::string Formula::str() const {
    auto join_args = [](const std::vector<std::string>& a) {
        std::string s;
        for (const auto& x : a) s += " " + x;
        return s;
    };
    switch (kind) {
        case Kind::True:
            return "true";
        case Kind::False:
            return "false";
        case Kind::Atom:
            return "(" + name + join_args(args) + ")";
        case Kind::Eq:
            return "(=" + join_args(args) + ")";
        case Kind::Not:
            return "(not " + kids[0].str() + ")";
        case Kind::Exists:
            return "(exists " + name + " " + kids[0].str() + ")";
        case Kind::Forall:
            return "(forall " + name + " " + kids[0].str() + ")";
        case Kind::ExistsInf:
            return "(exinf " + name + " " + kids[0].str() + ")";
        default: {
            std::string s = kind == Kind::And ? "(and" : kind == Kind::Or ? "(or" : "(implies";
            for (const auto& k : kids) s += " " + k.str();
            return s + ")";
        }
    }
}

// ---------- track operations ----------

Nfa as_one_track(const Nfa& base) {
    std::vector<Symbol> ns;
    for (const auto& s : base.alphabet) ns.push_back(Symbol::make_tuple({s.letter()}));
    Nfa r = relabel(base, ns);
    r.tuple = true;
    r.arity = 1;
    return r;
}

Nfa from_one_track(const Nfa& one) {
    std::vector<Symbol> ns;
    for (const auto& s : one.alphabet) ns.push_back(Symbol::base_id(s.entries.at(0)));
    Nfa r = relabel(one, ns);
    r.tuple = false;
    r.arity = 1;
    return r;
}

namespace {

// Synchronous join on shared variables; when drop is set, that track is projected away on the fly.
Compiled join_impl(const Compiled& a, const Compiled& b, const std::string* drop) {
    auto vars = merged_vars(a.vars, b.vars);
    Nfa A = with_idle(a.aut), B = with_idle(b.aut);
    std::vector<std::pair<std::size_t, std::size_t>> shared;
    struct Src {
        bool from_a;
        std::size_t track;
    };
    std::vector<Src> src;
    for (const auto& v : vars) {
        auto ia = std::find(a.vars.begin(), a.vars.end(), v);
        auto ib = std::find(b.vars.begin(), b.vars.end(), v);
        if (ia != a.vars.end() && ib != b.vars.end())
            shared.push_back({static_cast<std::size_t>(ia - a.vars.begin()), static_cast<std::size_t>(ib - b.vars.begin())});
        if (ia != a.vars.end()) src.push_back({true, static_cast<std::size_t>(ia - a.vars.begin())});
        else src.push_back({false, static_cast<std::size_t>(ib - b.vars.begin())});
    }
    std::size_t dropped = vars.size();
    if (drop) {
        auto it = std::find(vars.begin(), vars.end(), *drop);
        if (it == vars.end()) throw std::invalid_argument("join: dropped variable not present");
        dropped = static_cast<std::size_t>(it - vars.begin());
    }
    auto oa = out_edges(A);
    // B's moves per state, keyed by their letters on the shared tracks.
    std::vector<std::unordered_map<std::vector<LetterId>, std::vector<std::pair<SymIdx, State>>, KeyHash>> bidx(B.states);
    for (const auto& t : B.transitions) {
        std::vector<LetterId> key;
        for (const auto& [i, j] : shared) key.push_back(B.alphabet[t.sym].entries[j]);
        bidx[t.src][key].push_back({t.sym, t.dst});
    }
    auto fa = A.final_mask(), fb = B.final_mask();
    std::size_t out_arity = vars.size() - (drop ? 1 : 0);
    Nfa r = Nfa::over_tuples(out_arity);
    SymbolIndexer sym(r);
    std::unordered_map<std::uint64_t, State> ids;
    std::deque<std::pair<State, State>> work;
    std::vector<bool> fin;
    auto get = [&](State p, State q) {
        std::uint64_t key = (static_cast<std::uint64_t>(p) << 32) | q;
        auto [it, fresh] = ids.emplace(key, static_cast<State>(r.states));
        if (fresh) {
            ++r.states;
            work.push_back({p, q});
            fin.push_back(fa[p] && fb[q]);
        }
        return it->second;
    };
    for (auto p : A.initial)
        for (auto q : B.initial) r.initial.push_back(get(p, q));
    std::vector<std::pair<State, State>> tail;
    std::vector<LetterId> key, e(out_arity);
    while (!work.empty()) {
        auto [p, q] = work.front();
        work.pop_front();
        State from = ids[(static_cast<std::uint64_t>(p) << 32) | q];
        for (const auto& [sa, pa] : oa[p]) {
            const auto& ea = A.alphabet[sa].entries;
            key.clear();
            for (const auto& [i, j] : shared) key.push_back(ea[i]);
            auto it = bidx[q].find(key);
            if (it == bidx[q].end()) continue;
            for (const auto& [sb, qb] : it->second) {
                const auto& eb = B.alphabet[sb].entries;
                bool any = false, kept = false;
                for (std::size_t i = 0, o = 0; i < vars.size(); ++i) {
                    LetterId l = src[i].from_a ? ea[src[i].track] : eb[src[i].track];
                    any = any || l != kPad;
                    if (i == dropped) continue;
                    e[o++] = l;
                    kept = kept || l != kPad;
                }
                if (!any) continue;
                State to = get(pa, qb);
                if (kept) r.transitions.push_back({from, sym(Symbol::make_tuple(e)), to});
                else tail.push_back({from, to});
            }
        }
    }
    // Columns left empty by the projection only occur at the end of a word.
    std::vector<std::vector<State>> tail_in(r.states);
    for (const auto& [x, y] : tail) tail_in[y].push_back(x);
    std::vector<State> stack;
    for (State s = 0; s < r.states; ++s)
        if (fin[s]) stack.push_back(s);
    while (!stack.empty()) {
        State y = stack.back();
        stack.pop_back();
        for (auto x : tail_in[y])
            if (!fin[x]) fin[x] = true, stack.push_back(x);
    }
    for (State s = 0; s < r.states; ++s)
        if (fin[s]) r.final.push_back(s);
    r.canonicalize();
    if (drop) vars.erase(vars.begin() + static_cast<long>(dropped));
    return Compiled{vars, trim(r)};
}

}  // namespace

Compiled join(const Compiled& a, const Compiled& b) { return join_impl(a, b, nullptr); }

Compiled join_project(const Compiled& a, const Compiled& b, const std::string& var) { return join_impl(a, b, &var); }

Compiled subtract(const Compiled& a, const Compiled& b, std::size_t cap) {
    if (!subset_of(b.vars, a.vars)) throw std::invalid_argument("subtract: variables of b must occur in a");
    Nfa B = with_idle(b.aut);
    std::vector<std::size_t> pos;
    for (const auto& v : b.vars) pos.push_back(static_cast<std::size_t>(std::find(a.vars.begin(), a.vars.end(), v) - a.vars.begin()));
    std::unordered_map<Symbol, SymIdx, SymbolHash> bpos;
    for (SymIdx i = 0; i < B.alphabet.size(); ++i) bpos.emplace(B.alphabet[i], i);
    std::vector<std::optional<SymIdx>> amap(a.aut.alphabet.size());
    for (SymIdx i = 0; i < a.aut.alphabet.size(); ++i) {
        std::vector<LetterId> e;
        for (auto p : pos) e.push_back(a.aut.alphabet[i].entries[p]);
        if (auto it = bpos.find(Symbol::make_tuple(std::move(e))); it != bpos.end()) amap[i] = it->second;
    }
    return Compiled{a.vars, difference_mapped(a.aut, B, amap, cap)};
}

Compiled project_out(const Compiled& c, const std::string& var) {
    auto it = std::find(c.vars.begin(), c.vars.end(), var);
    if (it == c.vars.end()) return c;
    auto t = static_cast<std::size_t>(it - c.vars.begin());
    std::vector<std::string> vars = c.vars;
    vars.erase(vars.begin() + static_cast<long>(t));
    Nfa r = Nfa::over_tuples(vars.size());
    r.states = c.aut.states;
    r.initial = c.aut.initial;
    SymbolIndexer sym(r);
    // Columns whose remaining tracks are all pad only occur after those tracks ended.
    std::vector<std::vector<State>> tail_in(c.aut.states);
    for (const auto& tr : c.aut.transitions) {
        auto e = c.aut.alphabet[tr.sym].entries;
        e.erase(e.begin() + static_cast<long>(t));
        bool all_pad = std::all_of(e.begin(), e.end(), [](LetterId x) { return x == kPad; });
        if (all_pad) tail_in[tr.dst].push_back(tr.src);
        else r.transitions.push_back({tr.src, sym(Symbol::make_tuple(std::move(e))), tr.dst});
    }
    std::vector<bool> fin(c.aut.states, false);
    std::vector<State> stack(c.aut.final.begin(), c.aut.final.end());
    for (auto f : stack) fin[f] = true;
    while (!stack.empty()) {
        State q = stack.back();
        stack.pop_back();
        for (auto p : tail_in[q])
            if (!fin[p]) fin[p] = true, stack.push_back(p);
    }
    for (State q = 0; q < r.states; ++q)
        if (fin[q]) r.final.push_back(q);
    r.canonicalize();
    return Compiled{vars, trim(r)};
}

Compiled infinity_projection(const Compiled& c, const std::string& var) {
    auto it = std::find(c.vars.begin(), c.vars.end(), var);
    if (it == c.vars.end()) throw std::invalid_argument("infinity_projection: unknown track");
    auto t = static_cast<std::size_t>(it - c.vars.begin());
    const Nfa& a = c.aut;
    std::vector<std::string> vars = c.vars;
    vars.erase(vars.begin() + static_cast<long>(t));
    Nfa r = Nfa::over_tuples(vars.size());
    r.states = a.states;
    r.initial = a.initial;
    SymbolIndexer sym(r);
    std::vector<std::vector<State>> tail_out(a.states), tail_in(a.states);
    for (const auto& tr : a.transitions) {
        auto e = a.alphabet[tr.sym].entries;
        e.erase(e.begin() + static_cast<long>(t));
        bool rest_pad = std::all_of(e.begin(), e.end(), [](LetterId x) { return x == kPad; });
        if (rest_pad) {
            tail_out[tr.src].push_back(tr.dst);
            tail_in[tr.dst].push_back(tr.src);
        } else {
            r.transitions.push_back({tr.src, sym(Symbol::make_tuple(std::move(e))), tr.dst});
        }
    }
    // Within the tail graph: co-accessible states, cyclic ones among them, and their ancestors.
    std::vector<bool> co(a.states, false);
    std::vector<State> stack(a.final.begin(), a.final.end());
    for (auto f : stack) co[f] = true;
    while (!stack.empty()) {
        State q = stack.back();
        stack.pop_back();
        for (auto p : tail_in[q])
            if (!co[p]) co[p] = true, stack.push_back(p);
    }
    std::vector<std::vector<std::uint32_t>> adj(a.states);
    for (State q = 0; q < a.states; ++q)
        if (co[q])
            for (auto w : tail_out[q])
                if (co[w]) adj[q].push_back(w);
    Sccs sccs = strongly_connected(adj);
    std::vector<bool> cyclic(a.states, false);
    for (State q = 0; q < a.states; ++q) cyclic[q] = co[q] && sccs.cyclic[sccs.comp[q]];
    std::vector<bool> inf(a.states, false);
    for (State q = 0; q < a.states; ++q)
        if (cyclic[q]) inf[q] = true, stack.push_back(q);
    while (!stack.empty()) {
        State q = stack.back();
        stack.pop_back();
        for (auto p : tail_in[q])
            if (!inf[p]) inf[p] = true, stack.push_back(p);
    }
    for (State q = 0; q < a.states; ++q)
        if (inf[q]) r.final.push_back(q);
    r.canonicalize();
    return Compiled{vars, trim(r)};
}

Nfa infinity_projection(const Nfa& rel) {
    std::vector<std::string> vars;
    for (std::size_t i = 0; i < rel.arity; ++i) vars.push_back("v" + std::to_string(1000 + i));
    return infinity_projection(Compiled{vars, rel}, vars.back()).aut;
}

Nfa reorder_tracks(const Compiled& c, const std::vector<std::string>& vars) {
    if (vars.size() != c.vars.size() || !std::is_permutation(vars.begin(), vars.end(), c.vars.begin()))
        throw std::invalid_argument("track order must list exactly the free variables");
    std::vector<std::size_t> perm;
    for (const auto& v : vars) perm.push_back(static_cast<std::size_t>(std::find(c.vars.begin(), c.vars.end(), v) - c.vars.begin()));
    std::vector<Symbol> ns;
    for (const auto& s : c.aut.alphabet) {
        std::vector<LetterId> e;
        for (auto p : perm) e.push_back(s.entries[p]);
        ns.push_back(Symbol::make_tuple(std::move(e)));
    }
    Nfa r = relabel(c.aut, ns);
    r.tuple = true;
    r.arity = vars.size();
    return r;
}

// ---------- engine ----------

FoEngine::FoEngine(const Presentation& p, std::size_t cap) : p_(p), cap_(cap) {}

const Nfa& FoEngine::universe(std::size_t k) {
    auto it = universes_.find(k);
    if (it != universes_.end()) return it->second;
    Nfa u;
    if (k == 0) {
        u = arity0(true);
    } else {
        std::vector<const Nfa*> tracks(k, &p_.domain);
        u = trim(tracks_product(tracks));
        u.tuple = true;
        u.arity = k;
    }
    return universes_.emplace(k, std::move(u)).first->second;
}

Compiled FoEngine::cylindrify(const Compiled& c, const std::vector<std::string>& vars) {
    Compiled cur = c;
    for (const auto& v : vars) {
        if (std::find(cur.vars.begin(), cur.vars.end(), v) != cur.vars.end()) continue;
        cur = join(cur, Compiled{{v}, universe(1)});
    }
    return cur;
}

Compiled FoEngine::atom(const std::string& rel, const std::vector<std::string>& args) {
    const Nfa* aut = nullptr;
    if (rel == "lex" || rel == "llex") {
        auto it = builtin_.find(rel);
        if (it == builtin_.end())
            it = builtin_.emplace(rel, order_relation_automaton(p_.domain, rel == "lex" ? OrderKind::Lex : OrderKind::Llex, p_.order)).first;
        aut = &it->second;
        if (args.size() != 2) throw ValidationError(rel + " is binary");
    } else {
        const auto& r = p_.relation(rel);
        if (r.arity != args.size()) throw ValidationError("relation '" + rel + "' used with wrong arity");
        aut = &r.automaton;
    }
    std::vector<std::string> vars(args.begin(), args.end());
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    std::vector<std::size_t> first(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i)
        first[i] = static_cast<std::size_t>(std::find(args.begin(), args.end(), vars[i]) - args.begin());
    std::vector<std::size_t> slot(args.size());
    for (std::size_t j = 0; j < args.size(); ++j)
        slot[j] = static_cast<std::size_t>(std::find(vars.begin(), vars.end(), args[j]) - vars.begin());
    Nfa r = Nfa::over_tuples(vars.size());
    r.states = aut->states;
    r.initial = aut->initial;
    r.final = aut->final;
    SymbolIndexer sym(r);
    for (const auto& t : aut->transitions) {
        const auto& e = aut->alphabet[t.sym].entries;
        bool ok = true;
        for (std::size_t j = 0; j < args.size() && ok; ++j) ok = e[j] == e[first[slot[j]]];
        if (!ok) continue;
        std::vector<LetterId> ne(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i) ne[i] = e[first[i]];
        r.transitions.push_back({t.src, sym(Symbol::make_tuple(std::move(ne))), t.dst});
    }
    r.canonicalize();
    return Compiled{vars, trim(r)};
}

Compiled FoEngine::compile(const Formula& f) { return compile_norm(normalize(f, false)); }

Compiled FoEngine::compile_norm(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind) {
        case K::True:
            return Compiled{{}, arity0(true)};
        case K::False:
            return Compiled{{}, arity0(false)};
        case K::Atom:
            return atom(f.name, f.args);
        case K::Eq: {
            if (f.args[0] == f.args[1]) return Compiled{{f.args[0]}, universe(1)};
            std::vector<std::string> vars{f.args[0], f.args[1]};
            std::sort(vars.begin(), vars.end());
            Nfa r = Nfa::over_tuples(2);
            r.states = p_.domain.states;
            r.initial = p_.domain.initial;
            r.final = p_.domain.final;
            SymbolIndexer sym(r);
            for (const auto& t : p_.domain.transitions) {
                LetterId l = p_.domain.alphabet[t.sym].letter();
                r.transitions.push_back({t.src, sym(Symbol::make_tuple({l, l})), t.dst});
            }
            r.canonicalize();
            return Compiled{vars, trim(r)};
        }
        case K::Not: {
            Compiled inner = compile_norm(f.kids[0]);
            return subtract(Compiled{inner.vars, universe(inner.vars.size())}, inner, cap_);
        }
        case K::And: {
            std::optional<Compiled> cur;
            std::vector<const Formula*> negs;
            for (const auto& k : f.kids) {
                if (k.kind == K::Not) {
                    negs.push_back(&k.kids[0]);
                    continue;
                }
                Compiled c = compile_norm(k);
                cur = cur ? join(*cur, c) : c;
            }
            for (const auto* n : negs) {
                Compiled c = compile_norm(*n);
                if (!cur) cur = Compiled{c.vars, universe(c.vars.size())};
                if (!subset_of(c.vars, cur->vars)) cur = cylindrify(*cur, merged_vars(cur->vars, c.vars));
                cur = subtract(*cur, c, cap_);
            }
            return *cur;
        }
        case K::Or: {
            std::vector<Compiled> parts;
            std::vector<std::string> vars;
            for (const auto& k : f.kids) {
                parts.push_back(compile_norm(k));
                vars = merged_vars(vars, parts.back().vars);
            }
            Nfa acc = empty_tuple_automaton(vars.size());
            for (auto& c : parts) acc = unite(acc, cylindrify(c, vars).aut);
            return Compiled{vars, trim(acc)};
        }
        case K::Exists: {
            std::vector<std::string> vars;
            const Formula* g = &f;
            while (g->kind == K::Exists) {
                if (std::find(vars.begin(), vars.end(), g->name) == vars.end()) vars.push_back(g->name);
                g = &g->kids[0];
            }
            return compile_exists(std::move(vars), *g);
        }
        case K::ExistsInf: {
            Compiled c = compile_norm(f.kids[0]);
            if (std::find(c.vars.begin(), c.vars.end(), f.name) == c.vars.end()) {
                if (!cardinality(p_.domain).infinite) return Compiled{c.vars, empty_tuple_automaton(c.vars.size())};
                return c;
            }
            return infinity_projection(c, f.name);
        }
        default:
            throw std::logic_error("formula not normalized");
    }
}

Compiled FoEngine::compile_exists(std::vector<std::string> vars, const Formula& body) {
    using K = Formula::Kind;
    if (is_empty(p_.domain)) {
        auto fv = body.free_vars();
        for (const auto& v : vars) fv.erase(v);
        return Compiled{{fv.begin(), fv.end()}, empty_tuple_automaton(fv.size())};
    }
    std::vector<const Formula*> kids;
    std::vector<const Formula*> todo{&body};
    while (!todo.empty()) {
        const Formula* g = todo.back();
        todo.pop_back();
        if (g->kind == K::And)
            for (auto it = g->kids.rbegin(); it != g->kids.rend(); ++it) todo.push_back(&*it);
        else
            kids.push_back(g);
    }
    std::vector<Compiled> pos, neg;
    for (const auto* k : kids) {
        if (k->kind == K::Not) neg.push_back(compile_norm(k->kids[0]));
        else pos.push_back(compile_norm(*k));
    }
    auto mentions = [](const Compiled& c, const std::string& v) { return std::binary_search(c.vars.begin(), c.vars.end(), v); };
    // Eliminate first the variables that only occur in positive conjuncts.
    for (bool progress = true; progress;) {
        progress = false;
        for (auto it = vars.begin(); it != vars.end(); ++it) {
            const std::string v = *it;
            if (std::any_of(neg.begin(), neg.end(), [&](const Compiled& c) { return mentions(c, v); })) continue;
            std::vector<Compiled> with, rest;
            for (auto& c : pos) (mentions(c, v) ? with : rest).push_back(std::move(c));
            if (!with.empty()) {
                Compiled cur = std::move(with[0]);
                if (with.size() == 1) cur = project_out(cur, v);
                for (std::size_t i = 1; i < with.size(); ++i)
                    cur = i + 1 == with.size() ? join_project(cur, with[i], v) : join(cur, with[i]);
                rest.push_back(std::move(cur));
            }
            pos = std::move(rest);
            vars.erase(it);
            progress = true;
            break;
        }
    }
    Compiled cur{{}, arity0(true)};
    if (!pos.empty()) {
        cur = std::move(pos[0]);
        for (std::size_t i = 1; i < pos.size(); ++i) cur = join(cur, pos[i]);
    }
    for (const auto& n : neg) {
        if (!subset_of(n.vars, cur.vars)) cur = cylindrify(cur, merged_vars(cur.vars, n.vars));
        cur = subtract(cur, n, cap_);
    }
    for (const auto& v : vars)
        if (mentions(cur, v)) cur = project_out(cur, v);
    return cur;
}

Nfa FoEngine::eval(const Formula& f, const std::vector<std::string>& vars) { return reorder_tracks(compile(f), vars); }

bool FoEngine::decide(const Formula& f) {
    if (!f.free_vars().empty()) throw std::invalid_argument("decide expects a sentence");
    Compiled c = compile(f);
    return accepts_epsilon(c.aut);
}

Nfa eval_formula(const Presentation& p, const Formula& f, const std::vector<std::string>& vars) {
    FoEngine e(p);
    return e.eval(f, vars);
}

bool decide_sentence(const Presentation& p, const Formula& f) {
    FoEngine e(p);
    return e.decide(f);
}

// ---------- validators ----------

namespace {

Formula F(const std::string& s) { return Formula::parse(s); }

bool has_binary(const Presentation& p, const std::string& rel) {
    auto it = p.relations.find(rel);
    if (it == p.relations.end() || it->second.arity != 2) throw ValidationError("missing binary relation '" + rel + "'");
    return true;
}

}  // namespace

bool validate_equivalence(const Presentation& p, const std::string& rel) {
    has_binary(p, rel);
    FoEngine e(p);
    const std::string R = rel;
    return e.decide(F("(forall x (" + R + " x x))")) &&
           e.decide(F("(forall x (forall y (implies (" + R + " x y) (" + R + " y x))))")) &&
           e.decide(F("(forall x (forall y (forall z (implies (and (" + R + " x y) (" + R + " y z)) (" + R + " x z)))))"));
}

bool validate_linear_order(const Presentation& p, const std::string& rel) {
    has_binary(p, rel);
    FoEngine e(p);
    const std::string R = rel;
    return e.decide(F("(forall x (" + R + " x x))")) &&
           e.decide(F("(forall x (forall y (implies (and (" + R + " x y) (" + R + " y x)) (= x y))))")) &&
           e.decide(F("(forall x (forall y (forall z (implies (and (" + R + " x y) (" + R + " y z)) (" + R + " x z)))))")) &&
           e.decide(F("(forall x (forall y (or (" + R + " x y) (" + R + " y x))))"));
}

Formula path_from(const std::string& rel, const std::string& v, std::size_t m) {
    if (m == 0) return Formula::eq(v, v);
    std::string w = v == "p" ? "q" : "p";
    return Formula::exists(w, Formula::conj({Formula::atom(rel, {v, w}), path_from(rel, w, m - 1)}));
}

bool validate_dag_height(const Presentation& p, std::size_t n, const std::string& rel) {
    has_binary(p, rel);
    FoEngine e(p);
    return !e.decide(Formula::exists("p", path_from(rel, "p", n + 1)));
}

bool validate_forest(const Presentation& p, std::size_t n, const std::string& rel) {
    if (!validate_dag_height(p, n, rel)) return false;
    FoEngine e(p);
    const std::string R = rel;
    return e.decide(F("(forall y (forall x (forall z (implies (and (" + R + " x y) (" + R + " z y)) (= x z)))))"));
}

bool validate_tree(const Presentation& p, std::size_t n, const std::string& rel) {
    if (!validate_forest(p, n, rel)) return false;
    FoEngine e(p);
    Compiled roots = e.compile(F("(not (exists y (" + rel + " y r)))"));
    return cardinality(roots.aut) == ExtendedCount::finite(1);
}

}  // namespace autostruct
