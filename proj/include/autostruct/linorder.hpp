#ifndef AUTOSTRUCT_LINORDER_HPP
#define AUTOSTRUCT_LINORDER_HPP

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autostruct/fo.hpp"
#include "autostruct/polynomial.hpp"

namespace autostruct {

/// Σ_i ordered as $ < $1 < ... < $(i-1) < 0 < # < a < b1 < b2 < b3 < 1.
AlphabetOrder sigma_order(std::size_t i);
std::vector<Symbol> sigma_alphabet(std::size_t i);
/// Splits text such as "a#b1#$01" into letters of Σ_i.
Word sigma_word(std::string_view text, std::size_t i = 8);

/** \brief Automatic order (L(Run_A); ⊑) with relation "leq" over the run letters of A. */
struct OrderPresentation {
    Presentation p;
    RunAutomaton runs;
    AlphabetOrder source_order;

    Word project(const Word& w) const { return runs.project(w); }
};

/// w ⊑ w' iff π(w) <lex π(w'), or π(w) = π(w') and w <=lex w' with transitions ranked by index.
OrderPresentation sq_order_presentation(const Nfa& a, const AlphabetOrder& ord);

/// A[q1,q2] over {a,#,$}: language (a+#)^k $, C(q1(c),q2(c)) runs on a^c1 # ... a^ck # $.
Nfa poly_interval(const Polynomial& q1, const Polynomial& q2, std::size_t k, std::string_view letter = "a");

/// σ(D) = ({0,1}* 1 D)+.
Nfa shuffle_language(const Nfa& d);
/// σ(A,E) with L = E $ σ(D) $ F.  Throws ValidationError unless L(A) ⊆ E D $ F with E, D free of $, 0, 1.
Nfa shuffle_automaton(const Nfa& a, const Nfa& e, const Nfa& d, const Nfa& f);

/// x01u and x11u for w = x1u with u free of 0 and 1.
std::pair<Word, Word> shuffle_neighbors(const Word& w);
/// z with w1 <lex z <lex w2 whose colour (suffix after the last 1) is u.  Requires w1 <lex w2.
Word shuffle_between(const Word& w1, const Word& w2, const Word& u, const AlphabetOrder& ord);

/// S_j = $1+ ∪ ... ∪ $j+ over Σ_{j+1}.
Nfa dollar_chains(std::size_t j);

/// A¹ = A¹_1 ⊎ A¹_2 ⊎ A¹_3 over Σ_1.  Requires l > n.
Nfa build_base_A1(const Polynomial& p1, const Polynomial& p2, std::size_t n, std::size_t l);
/// A^{i+1} from A^i; odd and even i use the two different wirings.
Nfa lo_tower_step(const Nfa& ai, std::size_t i);
/// A^1, ..., A^n.
std::vector<Nfa> build_lo_tower(const Polynomial& p1, const Polynomial& p2, std::size_t n, std::size_t l);

/// Root language ((a+#)^k ∪ beta # ∪ b2 #) $ {0,1} Σ*, beta = b1+ when plus_b1 else b1.
Nfa lo_shape(std::size_t k, bool plus_b1, std::size_t i);

/// (π⁻¹(L(A)[u]) ∩ L(Run_A); ⊑).  Throws std::invalid_argument unless u is a^c̄, b1^m # or b2 # with L(A)[u] ⊆ u$Σ*.
OrderPresentation extract_fiber_order(const Nfa& a, const Word& u, const AlphabetOrder& ord);

/** \brief Sizes of maximal finite intervals met among domain words of length at most bound. */
struct BlockProfile {
    std::size_t bound = 0;
    std::size_t cap = 0;
    std::map<std::size_t, std::size_t> blocks;
    /// Blocks larger than cap, and infinite ones (an ω or ω* inside a block of finite steps).
    std::size_t over_cap = 0;
    std::size_t infinite = 0;
};

/// Elements of the block of x: all z such that the closed interval between x and z is finite.
Nfa block_of(const OrderPresentation& o, const Word& x);
/// Same, computed directly on the relation "leq" without using the run structure.
Nfa block_of_generic(const OrderPresentation& o, const Word& x);
/// Block sizes of the blocks met by domain words of length at most bound.  For orders built from a
/// run automaton the blocks are computed on (π(L(Run_A)); ≤lex) and weighted by fibre sizes.
BlockProfile block_profile(const OrderPresentation& o, std::size_t bound, std::size_t cap,
                           std::size_t max_elements = 20000);
BlockProfile block_profile_generic(const OrderPresentation& o, std::size_t bound, std::size_t cap,
                                   std::size_t max_elements = 20000);

}  // namespace autostruct

#endif
