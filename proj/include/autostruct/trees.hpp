#ifndef AUTOSTRUCT_TREES_HPP
#define AUTOSTRUCT_TREES_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "autostruct/fo.hpp"
#include "autostruct/polynomial.hpp"
#include "autostruct/verdict.hpp"

namespace autostruct {

/** \brief Dag with edge relation "E" and no directed path longer than height.
 *
 * Gadget dags of the tower keep root_tracks = k, the arity of their
 * a-roots; the remaining roots are b^m.  Zero means no such convention.
 */
struct DagPresentation {
    Presentation p;
    std::size_t height = 0;
    std::size_t root_tracks = 0;

    /// Throws ValidationError on a path longer than height or an empty root set.
    void validate() const;
};

/** \brief Forest (or tree) with edge relation "E" of height at most height. */
struct TreePresentation {
    Presentation p;
    std::size_t height = 0;
};

/// Nodes without an incoming edge.
Nfa roots_of(const Presentation& p, const std::string& rel = "E");
/// {v : rel(u, v)} as a base automaton.
Nfa successors(const Presentation& p, const Word& u, const std::string& rel = "E");
/// (P3) at r: every child of r has a child.
bool no_leaf_child(const Presentation& p, const Word& r);
/// The unique root of a tree; throws ValidationError otherwise.
Word tree_root(const TreePresentation& t);

/// Nodes are paths v1 ⊗ ... ⊗ vm from a root; add_root joins all trees under a new root.
TreePresentation unfold_dag(const DagPresentation& d, bool add_root = false);
/// unfold(D, v): paths starting at v.
TreePresentation unfold_at(const DagPresentation& d, const Word& v);
/// Subtree below a root of a forest.  Throws std::invalid_argument if w is not a root.
TreePresentation extract_component(const TreePresentation& forest, const Word& w);

/// T(E): root r, one child a·u per llex-least class member u, the class of u below a·u.
TreePresentation tree_from_equiv(const Presentation& e, const std::string& rel = "E");

/// Height-1 forest: roots ⊗_l(a+), the root a^e carries C(q1(e), q2(e)) leaves named leaf_prefix + index.
TreePresentation build_forest_height1(const Polynomial& q1, const Polynomial& q2, std::size_t l,
                                      std::string_view letter = "a", std::string_view leaf_prefix = "g");
/// Base dag: unfolding at a^c is T²_c, at ε is U²_ω and at b^m is U²_m.  Requires l > k.
DagPresentation build_D2(const Polynomial& p1, const Polynomial& p2, std::size_t k, std::size_t l);
/// D^{i+1} from D^i.
DagPresentation tower_step(const DagPresentation& di, std::size_t i);
/// build_D2 followed by n-2 tower steps; the final dag has 1-track a-roots.
DagPresentation build_tower(const Polynomial& p1, const Polynomial& p2, std::size_t n, std::size_t l);

/// Root words of the gadget dags.
Word a_root(const std::vector<unsigned>& c);
Word b_root(std::size_t m);
/// Expected root language ⊗_k(a+) ∪ b*.
Nfa gadget_roots(std::size_t k);
/// The word a^e over the flat letters of ⊗_k(a+) (plain a for k = 1).
Word conv_root_word(const std::vector<unsigned>& e, std::string_view letter = "a");

/// Exact for trees of height at most 1.
IsoVerdict iso_height1(const TreePresentation& t1, const TreePresentation& t2);
/** \brief Bounded iso_k check on trees of height at most n.
 *
 * Two levels above the leaves it counts children with exactly κ children for
 * κ <= cap_k, κ = ℵ0 and the child counts of up to reps representatives;
 * higher levels compare
 * fully enumerated child lists of at most reps nodes.  Multiplicities of
 * child types at or above mult_cap are not told apart.
 */
IsoVerdict iso_bounded(const TreePresentation& t1, const TreePresentation& t2, std::size_t n, std::size_t cap_k,
                       std::size_t mult_cap, std::size_t reps);

/// Entry κ: children of u with exactly κ children; [cap+1] more than cap; [cap+2] infinitely many.
std::vector<ExtendedCount> child_degree_census(const TreePresentation& t, const Word& u, std::size_t cap);

/** \brief Finite tree as an explicit edge list over nodes 0..nodes-1. */
struct FiniteTree {
    std::size_t nodes = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

/// Bottom-up canonical code; equal codes iff isomorphic.  Throws ValidationError unless a tree.
std::string ahu_canonical(const FiniteTree& t);
/// Explicit form of a finite tree presentation; throws ValidationError on infinite domains.
FiniteTree explicit_tree(const TreePresentation& t);
std::string ahu_canonical(const TreePresentation& t);

}  // namespace autostruct

#endif
