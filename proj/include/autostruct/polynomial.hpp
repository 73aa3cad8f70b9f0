#ifndef AUTOSTRUCT_POLYNOMIAL_HPP
#define AUTOSTRUCT_POLYNOMIAL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "autostruct/nfa.hpp"

namespace autostruct {

/** \brief Polynomial in N[x1..xk]; terms keyed by exponent vector. */
struct Polynomial {
    std::size_t vars = 0;
    std::map<std::vector<unsigned>, BigNat> terms;

    static Polynomial constant(std::size_t vars, BigNat c);
    static Polynomial variable(std::size_t vars, std::size_t i);  ///< x_{i+1}, zero-based i
    static Polynomial parse(std::string_view text, std::size_t vars = 0);

    bool is_zero() const { return terms.empty(); }
    unsigned degree() const;
    BigNat eval(const std::vector<BigNat>& c) const;
    BigNat eval_u(const std::vector<unsigned>& c) const;
    Polynomial with_vars(std::size_t k) const;
    std::string str() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    bool operator==(const Polynomial&) const = default;
};

/// C(x,y) = (x+y)^2 + 3x + y.
BigNat pair_code(const BigNat& x, const BigNat& y);
Polynomial pair_code(const Polynomial& x, const Polynomial& y);

/// Letter used for the sharp separator.
inline constexpr std::string_view kSharp = "#";

/// DFA for the language of k-fold convolutions of a+.
Nfa conv_plus_dfa(std::size_t k, std::string_view letter = "a");
/// DFA for (a+ #)^k.
Nfa sharp_blocks_dfa(std::size_t k, std::string_view letter = "a");

/// Automaton over {a,_}^k minus all-pad with language conv(a+) and p(c) runs on a^c.
Nfa poly_automaton_conv(const Polynomial& p, std::size_t k, std::string_view letter = "a");
/// Automaton over {a,#} with language (a+#)^k and p(c) runs on a^c1 # ... a^ck #.
Nfa poly_automaton_sharp(const Polynomial& p, std::size_t k, std::string_view letter = "a");

/// a^c1 ⊗ ... ⊗ a^ck as a tuple word.
Word conv_power_word(const std::vector<unsigned>& c, std::string_view letter = "a");
/// a^c1 # ... a^ck #.
Word sharp_power_word(const std::vector<unsigned>& c, std::string_view letter = "a");

}  // namespace autostruct

#endif
