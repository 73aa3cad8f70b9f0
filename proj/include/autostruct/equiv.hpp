#ifndef AUTOSTRUCT_EQUIV_HPP
#define AUTOSTRUCT_EQUIV_HPP

#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "autostruct/fo.hpp"
#include "autostruct/polynomial.hpp"
#include "autostruct/verdict.hpp"

namespace autostruct {

/** \brief h_E(n) for the queried sizes; the ℵ₀ entry is keyed separately. */
struct SizeCensus {
    std::map<std::size_t, ExtendedCount> finite;
    std::optional<ExtendedCount> infinite;

    ExtendedCount at(std::size_t n) const;
    bool operator==(const SizeCensus&) const = default;
};

/** \brief Labels every x with the number of E-partners (capped) by a deterministic counting automaton.
 *
 * Elements with exactly n partners are the union of h(n) classes of size n,
 * so h(n) is their number divided by n.
 */
class ClassCounter {
public:
    ClassCounter(const Presentation& p, std::size_t cap_n, const std::string& rel = "E");

    std::size_t cap() const { return cap_n_; }
    /// h(n) for 1 <= n <= cap.
    ExtendedCount classes_of_size(std::size_t n) const;
    /// Number of infinite classes.
    ExtendedCount infinite_classes() const;
    /// Elements whose class is infinite, as a base automaton.
    Nfa infinite_members() const;
    /// Elements whose class has exactly n members (n <= cap).
    Nfa members_of_size(std::size_t n) const;
    std::size_t counting_states() const { return labels_.size(); }
    /// Number of x with exactly label partners; cap+1 means more than cap, cap+2 infinitely many.
    ExtendedCount words_with_label(std::size_t label) const;
    /// The x counted by words_with_label(label).
    Nfa label_automaton(std::size_t label) const;

private:
    void count_labels();

    const Presentation& p_;
    std::string rel_;
    std::size_t cap_n_;
    // Counting DFA over domain letters; label cap+1 = "more than cap", cap+2 = infinite.
    std::vector<std::vector<std::pair<LetterId, State>>> edges_;
    std::vector<std::size_t> labels_;
    std::vector<ExtendedCount> counts_;
};

ExtendedCount class_size_count(const Presentation& p, std::size_t n);
/// ℵ₀ form of class_size_count.
ExtendedCount infinite_class_count(const Presentation& p);
SizeCensus size_census(const Presentation& p, std::size_t max_n);
/// Same quantity through FO: exactly-n formula on llex-least representatives.  n <= cap.
ExtendedCount class_size_count_formula(const Presentation& p, std::size_t n, std::size_t cap = 12);

/// E(p): domain L(Run_A) \ {ε}, runs equivalent iff they read the same word.
Presentation equiv_from_poly(const Polynomial& p, std::size_t k, std::string_view prefix = "t");
/// Lifts the masked tracks of r to counter^j ⊗ x with one j shared by all of them, j >= min_count (0 or 1).
Nfa counter_lift(const Nfa& r, const std::vector<bool>& lifted, std::string_view counter = "$", std::size_t min_count = 0);
/// ℵ₀ copies: domain $^j ⊗ u, tuples related iff counters agree and the originals are related.
Presentation counter_copies(const Presentation& p);
/// Union of presentations with pairwise disjoint domains.
Presentation disjoint_union(const std::vector<Presentation>& parts);
/// ℵ₀ copies of E(C(p1,p2)) ⊎ E(C(x1+x2,x1)) ⊎ E(C(x1,x1+x2)).
Presentation e_good_reduction(const Polynomial& p1, const Polynomial& p2, std::size_t k);
/// ℵ₀ copies of E(C(x1+x2,x1)) ⊎ E(C(x1,x1+x2)).
Presentation build_e_good();
/// h of E_Good by definition: ℵ₀ exactly on C(y,z) with y != z positive.
ExtendedCount e_good_h(std::size_t n);

/// Compares h on {1..N} ∪ {ℵ₀}.
IsoVerdict iso_check_equiv(const Presentation& a, const Presentation& b, std::size_t n);

}  // namespace autostruct

#endif
