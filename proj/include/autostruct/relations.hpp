#ifndef AUTOSTRUCT_RELATIONS_HPP
#define AUTOSTRUCT_RELATIONS_HPP

#include <string>
#include <unordered_map>
#include <vector>

#include "autostruct/nfa.hpp"

namespace autostruct {

/** \brief Cardinality in N ∪ {aleph_0}. */
struct ExtendedCount {
    bool infinite = false;
    BigNat value = 0;

    static ExtendedCount inf() { return {true, 0}; }
    static ExtendedCount finite(BigNat n) { return {false, std::move(n)}; }
    std::string str() const { return infinite ? "inf" : value.str(); }
    bool operator==(const ExtendedCount& o) const { return infinite == o.infinite && (infinite || value == o.value); }
};

/** \brief A total order on letters; drives lex and llex. */
class AlphabetOrder {
public:
    AlphabetOrder() = default;
    explicit AlphabetOrder(std::vector<std::string> letters);
    static AlphabetOrder of(const std::vector<Symbol>& base_alphabet);

    const std::vector<std::string>& letters() const { return letters_; }
    /// Throws std::invalid_argument on an unknown letter.
    std::size_t rank(LetterId id) const;
    bool contains(LetterId id) const { return rank_.count(id) > 0; }
    /// Extends by letters not yet present (appended in the given order).
    AlphabetOrder extended(const std::vector<std::string>& more) const;

private:
    std::vector<std::string> letters_;
    std::unordered_map<LetterId, std::size_t> rank_;
};

enum class OrderKind { Lex, Llex };

Word convolution(const std::vector<Word>& words);
std::vector<Word> deconvolution(const Word& cw, std::size_t arity);
/// True iff no column is all-pad and pads form a suffix in every track.
bool is_convolution(const Word& cw);

/// -1, 0, 1.  Base words over ord's letters.
int lex_compare(const Word& u, const Word& v, const AlphabetOrder& ord);
int llex_compare(const Word& u, const Word& v, const AlphabetOrder& ord);

/// L1 ⊗ ... ⊗ Lk for base automata.
Nfa tracks_product(const std::vector<const Nfa*>& tracks);
Nfa conv_language(const Nfa& a, std::size_t k);

/// u ⊗ v with u, v ∈ L(d) and u ≤ v.
Nfa order_relation_automaton(const Nfa& d, OrderKind kind, const AlphabetOrder& ord);

ExtendedCount cardinality(const Nfa& a);
/// L(a) \ L(b).
Nfa difference(const Nfa& a, const Nfa& b, std::size_t cap = state_cap());
/// L(a) minus L(b) where a's symbol i reads as b's symbol amap[i] (none: b rejects).
Nfa difference_mapped(const Nfa& a, const Nfa& b, const std::vector<std::optional<SymIdx>>& amap,
                      std::size_t cap = state_cap());
/// universe \ L(a).
Nfa complement(const Nfa& a, const Nfa& universe, std::size_t cap = state_cap());
/// L(small) ⊆ L(big).
bool includes(const Nfa& big, const Nfa& small, std::size_t cap = state_cap());
bool equivalent(const Nfa& a, const Nfa& b, std::size_t cap = state_cap());

/// Up to limit accepted words in llex order (symbols ranked by ord, else by alphabet position).
std::vector<Word> enumerate(const Nfa& a, std::size_t limit, const AlphabetOrder* ord = nullptr,
                            std::size_t max_length = static_cast<std::size_t>(-1));

/// Renders each tuple symbol as a base letter named by Symbol::str().
Nfa flatten(const Nfa& a);
Symbol flat_symbol(const Symbol& s);

/// Words v with r(u, v) (fixed = 0) or r(v, u) (fixed = 1), over the given base alphabet.
Nfa section(const Nfa& r, const Word& u, std::size_t fixed, const std::vector<Symbol>& alphabet);

}  // namespace autostruct

#endif
