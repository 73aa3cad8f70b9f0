#ifndef AUTOSTRUCT_NFA_HPP
#define AUTOSTRUCT_NFA_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "autostruct/errors.hpp"
#include "autostruct/symbol.hpp"

namespace autostruct {

using State = std::uint32_t;
using SymIdx = std::uint32_t;
using BigNat = boost::multiprecision::cpp_int;

struct Transition {
    State src;
    SymIdx sym;
    State dst;
    auto operator<=>(const Transition&) const = default;
    bool operator==(const Transition&) const = default;
};

/** \brief Nondeterministic automaton with a canonically ordered transition list.
 *
 * For base alphabets the alphabet is the declared letter list.  Tuple
 * automata usually list only the symbols that occur on some transition.
 */
struct Nfa {
    std::vector<Symbol> alphabet;
    bool tuple = false;
    std::size_t arity = 1;
    std::size_t states = 0;
    std::vector<State> initial;
    std::vector<State> final;
    std::vector<Transition> transitions;

    static Nfa over(const std::vector<Symbol>& alphabet);
    static Nfa over_tuples(std::size_t arity);

    State add_state();
    SymIdx add_symbol(const Symbol& s);
    std::optional<SymIdx> find_symbol(const Symbol& s) const;
    void add_transition(State src, const Symbol& s, State dst) { transitions.push_back({src, add_symbol(s), dst}); }

    /// Sorts and deduplicates initial/final sets and the transition list.
    void canonicalize();
    /// Throws ValidationError if an index is out of range or the list is not canonical.
    void check() const;

    std::vector<bool> initial_mask() const;
    std::vector<bool> final_mask() const;
    bool same_kind(const Nfa& o) const { return tuple == o.tuple && (!tuple || arity == o.arity); }
};

/** \brief Hash-based symbol lookup for building large alphabets. */
class SymbolIndexer {
public:
    explicit SymbolIndexer(Nfa& a);
    SymIdx operator()(const Symbol& s);

private:
    Nfa& a_;
    std::unordered_map<Symbol, SymIdx, SymbolHash> pos_;
};

/// Outgoing (symbol, target) lists, sorted by symbol then target.
using Adjacency = std::vector<std::vector<std::pair<SymIdx, State>>>;
Adjacency out_edges(const Nfa& a);
Adjacency in_edges(const Nfa& a);

/// Maximum subset-construction size; AUTOSTRUCT_STATE_CAP overrides the default of 200000.
std::size_t state_cap();

bool is_deterministic(const Nfa& a);
bool accepts(const Nfa& a, const Word& w);

/// Exact number of accepting runs of a on w.  Throws EmptyWord on w = ε.
BigNat count_accepting_runs(const Nfa& a, const Word& w);
BigNat count_accepting_runs_idx(const Nfa& a, const std::vector<SymIdx>& w);

/// Disjoint union; run counts add.  Alphabets must coincide as sets.
Nfa nfa_union(const Nfa& a, const Nfa& b);
/// Synchronous product; run counts multiply.  Alphabets must coincide as sets.
Nfa nfa_product(const Nfa& a, const Nfa& b);

/// Like nfa_union / nfa_product but merging differing alphabets.
Nfa unite(const Nfa& a, const Nfa& b);
Nfa intersect(const Nfa& a, const Nfa& b);

Nfa guarded_union(const Nfa& d, const Nfa& a);
Nfa guarded_product(const Nfa& d, const Nfa& a);

/// L(d)·L(a) with the run counts of a; d is determinized first.
Nfa concat_unambiguous(const Nfa& d, const Nfa& a, bool verify = false);
/// Plain concatenation (run counts multiply over every split).
Nfa concat(const Nfa& a, const Nfa& b);
/// True iff every word of L(a)·L(b) has exactly one split point.
bool concat_is_unambiguous(const Nfa& a, const Nfa& b);

Nfa determinize(const Nfa& a, std::size_t cap = state_cap());
Nfa trim(const Nfa& a);
Nfa minimize(const Nfa& a, std::size_t cap = state_cap());
Nfa without_epsilon(const Nfa& a);
bool accepts_epsilon(const Nfa& a);
bool is_empty(const Nfa& a);

/// Copy of a whose alphabet starts with the given symbols, followed by a's remaining ones.
Nfa with_alphabet(const Nfa& a, const std::vector<Symbol>& alphabet);
Nfa relabel(const Nfa& a, const std::vector<Symbol>& new_symbols);

/// Automata built from words and simple patterns over base letters.
Nfa word_automaton(const std::vector<Symbol>& alphabet, const Word& w);
Nfa letters_plus(const std::vector<Symbol>& alphabet, const std::vector<Symbol>& letters);
Nfa letters_star(const std::vector<Symbol>& alphabet, const std::vector<Symbol>& letters);
Nfa epsilon_automaton(const std::vector<Symbol>& alphabet);
Nfa empty_automaton(const std::vector<Symbol>& alphabet);
Nfa plus(const Nfa& a);
Nfa star(const Nfa& a);
Nfa power(const Nfa& a, std::size_t n);

/** \brief Run_A together with the projection to A's alphabet. */
struct RunAutomaton {
    Nfa run;
    std::vector<SymIdx> pi;
    Nfa source;

    Word project(const Word& run_word) const;
};

RunAutomaton run_automaton(const Nfa& a, std::string_view prefix = "t");

}  // namespace autostruct

#endif
