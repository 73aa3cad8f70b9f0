#include "autostruct/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace autostruct {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

unsigned parse_uint(std::string_view s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw std::invalid_argument("bad number '" + std::string(s) + "'");
    return static_cast<unsigned>(std::stoul(std::string(s)));
}

BigNat parse_big(std::string_view s) {
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw std::invalid_argument("bad number '" + std::string(s) + "'");
    return BigNat(std::string(s));
}

std::vector<Symbol> conv_alphabet(std::size_t k, LetterId a) {
    std::vector<Symbol> alpha;
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
        std::vector<LetterId> e(k);
        for (std::size_t i = 0; i < k; ++i) e[i] = (mask >> i) & 1 ? a : kPad;
        alpha.push_back(Symbol::make_tuple(std::move(e)));
    }
    std::sort(alpha.begin(), alpha.end());
    return alpha;
}

Nfa copies(const Nfa& one, const BigNat& c) {
    if (c > 100000) throw StateCapExceeded("coefficient too large");
    Nfa r = one;
    for (BigNat i = 1; i < c; ++i) r = nfa_union(r, one);
    return r;
}

// Builds the automaton by structural recursion over terms; base(i) yields A[x_{i+1}].
template <class Base>
Nfa build_poly(const Polynomial& p, const Nfa& one, Base base) {
    if (p.is_zero()) throw ZeroPolynomial();
    std::optional<Nfa> sum;
    for (const auto& [exps, coef] : p.terms) {
        std::optional<Nfa> term;
        for (std::size_t i = 0; i < exps.size(); ++i) {
            if (!exps[i]) continue;
            Nfa xi = base(i);
            for (unsigned e = 0; e < exps[i]; ++e) term = term ? nfa_product(*term, xi) : xi;
        }
        Nfa t = term ? *term : one;
        if (coef != 1) t = nfa_product(copies(one, coef), t);
        sum = sum ? nfa_union(*sum, t) : t;
    }
    return *sum;
}

}  // namespace

Polynomial Polynomial::constant(std::size_t vars, BigNat c) {
    Polynomial p;
    p.vars = vars;
    if (c != 0) p.terms[std::vector<unsigned>(vars, 0)] = std::move(c);
    return p;
}

Polynomial Polynomial::variable(std::size_t vars, std::size_t i) {
    if (i >= vars) throw std::invalid_argument("variable index out of range");
    Polynomial p;
    p.vars = vars;
    std::vector<unsigned> e(vars, 0);
    e[i] = 1;
    p.terms[e] = 1;
    return p;
}

Polynomial Polynomial::parse(std::string_view text, std::size_t vars) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw std::invalid_argument("empty polynomial");
    struct Factor {
        std::size_t var;  // 0 = constant
        BigNat value;
        unsigned exp;
    };
    std::vector<std::vector<Factor>> terms;
    std::size_t maxvar = 0;
    for (auto term : split(s, '+')) {
        if (term.empty()) throw std::invalid_argument("empty term in '" + s + "'");
        std::vector<Factor> fs;
        for (auto f : split(term, '*')) {
            if (f.empty()) throw std::invalid_argument("empty factor in '" + s + "'");
            unsigned exp = 1;
            if (auto hat = f.find('^'); hat != std::string_view::npos) {
                exp = parse_uint(f.substr(hat + 1));
                f = f.substr(0, hat);
            }
            if (!f.empty() && (f[0] == 'x' || f[0] == 'X')) {
                std::size_t v = parse_uint(f.substr(1));
                if (v == 0) throw std::invalid_argument("variables are numbered from 1");
                maxvar = std::max(maxvar, v);
                fs.push_back({v, 0, exp});
            } else {
                fs.push_back({0, parse_big(f), exp});
            }
        }
        terms.push_back(std::move(fs));
    }
    if (vars == 0) vars = std::max<std::size_t>(maxvar, 1);
    if (maxvar > vars) throw std::invalid_argument("polynomial uses x" + std::to_string(maxvar) + " but only " + std::to_string(vars) + " variables declared");
    Polynomial p;
    p.vars = vars;
    for (const auto& fs : terms) {
        Polynomial t = constant(vars, 1);
        for (const auto& f : fs) {
            Polynomial base = f.var ? variable(vars, f.var - 1) : constant(vars, f.value);
            for (unsigned e = 0; e < f.exp; ++e) t = t * base;
        }
        p = p + t;
    }
    return p;
}

unsigned Polynomial::degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms) {
        unsigned s = 0;
        for (auto x : e) s += x;
        d = std::max(d, s);
    }
    return d;
}

BigNat Polynomial::eval(const std::vector<BigNat>& c) const {
    if (c.size() < vars) throw std::invalid_argument("too few arguments for polynomial");
    BigNat total = 0;
    for (const auto& [e, coef] : terms) {
        BigNat t = coef;
        for (std::size_t i = 0; i < e.size(); ++i)
            for (unsigned j = 0; j < e[i]; ++j) t *= c[i];
        total += t;
    }
    return total;
}

BigNat Polynomial::eval_u(const std::vector<unsigned>& c) const {
    std::vector<BigNat> b(c.begin(), c.end());
    return eval(b);
}

Polynomial Polynomial::with_vars(std::size_t k) const {
    if (k < vars) {
        for (const auto& [e, c] : terms)
            for (std::size_t i = k; i < e.size(); ++i)
                if (e[i]) throw std::invalid_argument("polynomial needs more variables");
    }
    Polynomial p;
    p.vars = k;
    for (const auto& [e, c] : terms) {
        std::vector<unsigned> ne(k, 0);
        for (std::size_t i = 0; i < std::min(k, e.size()); ++i) ne[i] = e[i];
        p.terms[ne] += c;
    }
    return p;
}

std::string Polynomial::str() const {
    if (terms.empty()) return "0";
    std::string s;
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        const auto& [e, c] = *it;
        if (!s.empty()) s += "+";
        std::string mono;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            if (!mono.empty()) mono += "*";
            mono += "x" + std::to_string(i + 1);
            if (e[i] > 1) mono += "^" + std::to_string(e[i]);
        }
        if (mono.empty()) s += c.str();
        else if (c == 1) s += mono;
        else s += c.str() + "*" + mono;
    }
    return s;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    std::size_t k = std::max(vars, o.vars);
    Polynomial r = with_vars(k);
    for (const auto& [e, c] : o.with_vars(k).terms) r.terms[e] += c;
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    std::size_t k = std::max(vars, o.vars);
    Polynomial a = with_vars(k), b = o.with_vars(k), r;
    r.vars = k;
    for (const auto& [e1, c1] : a.terms)
        for (const auto& [e2, c2] : b.terms) {
            std::vector<unsigned> e(k);
            for (std::size_t i = 0; i < k; ++i) e[i] = e1[i] + e2[i];
            r.terms[e] += c1 * c2;
        }
    return r;
}

BigNat pair_code(const BigNat& x, const BigNat& y) { return (x + y) * (x + y) + 3 * x + y; }

Polynomial pair_code(const Polynomial& x, const Polynomial& y) {
    std::size_t k = std::max(x.vars, y.vars);
    Polynomial s = x + y;
    return s * s + Polynomial::constant(k, 3) * x + y;
}

Nfa conv_plus_dfa(std::size_t k, std::string_view letter) {
    if (k == 0) throw std::invalid_argument("arity must be positive");
    LetterId a = intern(letter);
    Nfa r = Nfa::over(conv_alphabet(k, a));
    std::size_t full = (std::size_t{1} << k) - 1;
    // State 0 = nothing read; state 1 + m = tracks in m have ended.
    r.states = 1 + full;
    r.initial = {0};
    for (State m = 0; m < full; ++m) r.final.push_back(1 + m);
    r.add_transition(0, Symbol::make_tuple(std::vector<LetterId>(k, a)), 1);
    for (std::size_t m = 0; m < full; ++m) {
        for (const auto& s : r.alphabet) {
            std::size_t pads = 0;
            bool ok = true;
            for (std::size_t i = 0; i < k; ++i) {
                if (s.entries[i] == kPad) pads |= std::size_t{1} << i;
                else if ((m >> i) & 1) ok = false;
            }
            std::size_t nm = m | pads;
            if (ok && nm != full) r.transitions.push_back({static_cast<State>(1 + m), *r.find_symbol(s), static_cast<State>(1 + nm)});
        }
    }
    r.canonicalize();
    return r;
}

Nfa sharp_blocks_dfa(std::size_t k, std::string_view letter) {
    Symbol a = Symbol::base(letter), sh = Symbol::base(kSharp);
    Nfa r = Nfa::over({a, sh});
    // Boundary states 0..k, in-block states k+1..2k.
    r.states = 2 * k + 1;
    r.initial = {0};
    r.final = {static_cast<State>(k)};
    for (State j = 0; j < k; ++j) {
        State in = static_cast<State>(k + 1 + j);
        r.transitions.push_back({j, 0, in});
        r.transitions.push_back({in, 0, in});
        r.transitions.push_back({in, 1, j + 1});
    }
    r.canonicalize();
    return r;
}

Nfa poly_automaton_conv(const Polynomial& p, std::size_t k, std::string_view letter) {
    if (k < p.vars) {
        for (const auto& [e, c] : p.terms)
            for (std::size_t i = k; i < e.size(); ++i)
                if (e[i]) throw std::invalid_argument("k smaller than number of variables used");
    }
    Nfa one = conv_plus_dfa(k, letter);
    LetterId a = intern(letter);
    auto base = [&](std::size_t i) {
        Nfa x = Nfa::over(one.alphabet);
        x.states = 2;
        x.initial = {0};
        x.final = {1};
        for (SymIdx s = 0; s < x.alphabet.size(); ++s) {
            if (x.alphabet[s].entries[i] == a) {
                x.transitions.push_back({0, s, 0});
                x.transitions.push_back({0, s, 1});
            }
            x.transitions.push_back({1, s, 1});
        }
        x.canonicalize();
        // The two-state automaton alone accepts more than conv(a+); the DFA restricts it.
        return trim(nfa_product(x, one));
    };
    return build_poly(p.with_vars(std::max(k, p.vars)), one, base);
}

Nfa poly_automaton_sharp(const Polynomial& p, std::size_t k, std::string_view letter) {
    if (k < p.vars) {
        for (const auto& [e, c] : p.terms)
            for (std::size_t i = k; i < e.size(); ++i)
                if (e[i]) throw std::invalid_argument("k smaller than number of variables used");
    }
    Nfa one = sharp_blocks_dfa(k, letter);
    auto base = [&](std::size_t i) {
        Nfa x = Nfa::over(one.alphabet);
        // q_0..q_k = 0..k, q'_i = k+1.
        x.states = k + 2;
        x.initial = {0};
        x.final = {static_cast<State>(k)};
        State qi = static_cast<State>(k + 1);
        for (State j = 1; j <= k; ++j)
            if (j != i + 1) x.transitions.push_back({j - 1, 1, j});
        for (State q = 0; q < x.states; ++q) x.transitions.push_back({q, 0, q});
        x.transitions.push_back({static_cast<State>(i), 0, qi});
        x.transitions.push_back({qi, 1, static_cast<State>(i + 1)});
        x.canonicalize();
        return trim(nfa_product(x, one));
    };
    return build_poly(p.with_vars(std::max(k, p.vars)), one, base);
}

Word conv_power_word(const std::vector<unsigned>& c, std::string_view letter) {
    LetterId a = intern(letter);
    unsigned n = c.empty() ? 0 : *std::max_element(c.begin(), c.end());
    Word w;
    for (unsigned j = 0; j < n; ++j) {
        std::vector<LetterId> e(c.size());
        for (std::size_t i = 0; i < c.size(); ++i) e[i] = j < c[i] ? a : kPad;
        w.push_back(Symbol::make_tuple(std::move(e)));
    }
    return w;
}

Word sharp_power_word(const std::vector<unsigned>& c, std::string_view letter) {
    Word w;
    for (auto x : c) {
        for (unsigned j = 0; j < x; ++j) w.push_back(Symbol::base(letter));
        w.push_back(Symbol::base(kSharp));
    }
    return w;
}

}  // namespace autostruct
