#ifndef AUTOSTRUCT_FO_HPP
#define AUTOSTRUCT_FO_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "autostruct/relations.hpp"

namespace autostruct {

struct Relation {
    std::size_t arity = 2;
    Nfa automaton;
};

/** \brief Automatic presentation: domain over base letters plus named relations. */
struct Presentation {
    AlphabetOrder order;
    Nfa domain;
    std::map<std::string, Relation> relations;

    const Relation& relation(const std::string& name) const;
    /// Throws ValidationError unless every relation accepts only convolutions of domain words.
    void validate() const;
};

/** \brief FO+∃∞ formula; s-expression syntax such as (forall y (leq x y)). */
struct Formula {
    enum class Kind { True, False, Atom, Eq, Not, And, Or, Implies, Exists, Forall, ExistsInf };
    Kind kind = Kind::True;
    std::string name;               // relation name for atoms, bound variable for quantifiers
    std::vector<std::string> args;  // atom / equality arguments
    std::vector<Formula> kids;

    static Formula parse(std::string_view text);
    static Formula atom(std::string rel, std::vector<std::string> args);
    static Formula eq(std::string x, std::string y);
    static Formula negate(Formula f);
    static Formula conj(std::vector<Formula> fs);
    static Formula disj(std::vector<Formula> fs);
    static Formula implies(Formula a, Formula b);
    static Formula exists(std::string v, Formula f);
    static Formula forall(std::string v, Formula f);
    static Formula exinf(std::string v, Formula f);

    std::set<std::string> free_vars() const;
    std::size_t depth() const;
    std::string str() const;
};

/** \brief Automaton over tuples whose i-th track carries variable vars[i]. */
struct Compiled {
    std::vector<std::string> vars;
    Nfa aut;
};

/** \brief Compiles formulas against one presentation; caches shared automata. */
class FoEngine {
public:
    explicit FoEngine(const Presentation& p, std::size_t cap = state_cap());

    Compiled compile(const Formula& f);
    /// Tracks ordered as in vars (must equal the free variables as a set).
    Nfa eval(const Formula& f, const std::vector<std::string>& vars);
    bool decide(const Formula& f);

    /// k-fold convolution of the domain, as a tuple automaton.
    const Nfa& universe(std::size_t k);
    const Presentation& presentation() const { return p_; }

private:
    Compiled compile_norm(const Formula& f);
    Compiled compile_exists(std::vector<std::string> vars, const Formula& body);
    Compiled atom(const std::string& rel, const std::vector<std::string>& args);
    Compiled cylindrify(const Compiled& c, const std::vector<std::string>& vars);

    const Presentation& p_;
    std::size_t cap_;
    std::map<std::size_t, Nfa> universes_;
    std::map<std::string, Nfa> builtin_;
};

Nfa eval_formula(const Presentation& p, const Formula& f, const std::vector<std::string>& vars);
bool decide_sentence(const Presentation& p, const Formula& f);

/// Track-level helpers on compiled automata.
Compiled join(const Compiled& a, const Compiled& b);
/// ∃var of the join, without materializing the var track.
Compiled join_project(const Compiled& a, const Compiled& b, const std::string& var);
Compiled subtract(const Compiled& a, const Compiled& b, std::size_t cap = state_cap());
Compiled project_out(const Compiled& c, const std::string& var);
/// x̄ such that infinitely many y satisfy R(x̄, y); y is the given track.
Compiled infinity_projection(const Compiled& c, const std::string& var);
/// Convenience form: y is the last track of r.
Nfa infinity_projection(const Nfa& r);
Nfa reorder_tracks(const Compiled& c, const std::vector<std::string>& vars);
/// One-track tuple view of a base automaton.
Nfa as_one_track(const Nfa& base);
/// Base view of a one-track tuple automaton.
Nfa from_one_track(const Nfa& one);

/// Class validators; rel names the binary relation.
bool validate_equivalence(const Presentation& p, const std::string& rel = "E");
bool validate_linear_order(const Presentation& p, const std::string& rel = "leq");
/// Edge relation forms a forest (unique parents) of height at most n.
bool validate_forest(const Presentation& p, std::size_t n, const std::string& rel = "E");
/// Forest with exactly one root.
bool validate_tree(const Presentation& p, std::size_t n, const std::string& rel = "E");
/// No directed path with more than n edges.
bool validate_dag_height(const Presentation& p, std::size_t n, const std::string& rel = "E");

/// Formula "some E-path with m edges starts at v".
Formula path_from(const std::string& rel, const std::string& v, std::size_t m);

}  // namespace autostruct

#endif
