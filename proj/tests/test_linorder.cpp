#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include "autostruct/linorder.hpp"
#include "lo_oracle.hpp"

using namespace autostruct;
using namespace oracle;

namespace {

Polynomial P(const std::string& s) { return Polynomial::parse(s); }

}  // namespace

TEST_CASE("sigma alphabets follow the fixed letter order", "[linorder]") {
    auto o = sigma_order(3);
    std::vector<std::string> expect{"$", "$_1", "$_2", "0", "#", "a", "b1", "b2", "b3", "1"};
    CHECK(o.letters() == expect);
    CHECK(sigma_alphabet(1).size() == 8);
    CHECK(word_str(W("b1b1#$_2$01"), " ") == "b1 b1 # $_2 $ 0 1");
    CHECK_THROWS(sigma_word("c"));
}

TEST_CASE("run order matches the pointwise comparator", "[linorder]") {
    std::mt19937 rng(41);
    std::vector<Symbol> ab{Symbol::base("a"), Symbol::base("b")};
    AlphabetOrder ord({"a", "b"});
    std::size_t checked = 0;
    for (int round = 0; round < 25; ++round) {
        Nfa a = oracle::random_nfa(rng, ab, 4, 0.35);
        if (is_empty(trim(a))) continue;
        auto o = sq_order_presentation(a, ord);
        auto xs = enumerate(o.p.domain, 60, &o.p.order, 6);
        Leq leq(o);
        for (const auto& x : xs)
            for (const auto& y : xs) {
                REQUIRE(leq(x, y) == sq_leq(o, ord, x, y));
                ++checked;
            }
        CHECK(linear_on(o, xs));
    }
    CHECK(checked > 1000);
}

TEST_CASE("equal projections are ordered by transition index", "[linorder]") {
    std::vector<Symbol> ab{Symbol::base("a")};
    Nfa a = Nfa::over(ab);
    a.states = 3;
    a.initial = {0};
    a.final = {1, 2};
    a.add_transition(0, ab[0], 1);
    a.add_transition(0, ab[0], 2);
    a.canonicalize();
    auto o = sq_order_presentation(a, AlphabetOrder({"a"}));
    Word t0{Symbol::base("t0")}, t1{Symbol::base("t1")};
    CHECK(related(o, t0, t1));
    CHECK_FALSE(related(o, t1, t0));
}

TEST_CASE("run orders of small automata validate as linear orders", "[linorder][validate]") {
    std::mt19937 rng(7);
    std::vector<Symbol> ab{Symbol::base("a"), Symbol::base("b")};
    for (int round = 0; round < 4; ++round) {
        Nfa a = oracle::random_nfa(rng, ab, 3, 0.4);
        if (is_empty(trim(a))) continue;
        CHECK(validate_linear_order(sq_order_presentation(a, AlphabetOrder({"a", "b"})).p));
    }
    CHECK(validate_linear_order(sq_order_presentation(poly_interval(P("x1"), P("x2"), 2), sigma_order(1)).p));
}

TEST_CASE("polynomial intervals have the language (a+#)^k$", "[linorder]") {
    auto alpha = sigma_alphabet(1);
    for (std::size_t k = 1; k <= 3; ++k) {
        Nfa expect = concat(power(a_block(), k), lit("$"));
        CHECK(equivalent(with_alphabet(poly_interval(P("x1"), P("x1+1"), k), alpha), expect));
    }
    CHECK_THROWS_AS(poly_interval(P("0"), P("0"), 1), ZeroPolynomial);
}

TEST_CASE("interval sizes follow C(q1,q2)", "[linorder]") {
    auto o = sq_order_presentation(poly_interval(P("x1"), P("x2"), 2), sigma_order(1));
    CHECK(fiber_of(o, W("a#a#$")).size() == 8);
    auto o2 = sq_order_presentation(poly_interval(P("x1+x2"), P("x1+x2"), 2), sigma_order(1));
    CHECK(fiber_of(o2, W("a#a#$")).size() == 24);

    std::vector<std::pair<std::string, std::string>> pairs{{"x1", "x2"}, {"x1+x2", "x1"}, {"x1", "x1+x2"}};
    for (const auto& [s1, s2] : pairs) {
        Nfa a = poly_interval(P(s1), P(s2), 2);
        for (unsigned c = 1; c <= 3; ++c)
            for (unsigned d = 1; d <= 3; ++d) {
                Word w = W(std::string(c, 'a') + "#" + std::string(d, 'a') + "#$");
                auto q1 = P(s1).with_vars(2).eval_u({c, d}), q2 = P(s2).with_vars(2).eval_u({c, d});
                CHECK(oracle::count_paths(a, w) ==
                      C(static_cast<unsigned long long>(q1), static_cast<unsigned long long>(q2)));
            }
    }
}

TEST_CASE("each interval fibre is a consecutive block", "[linorder]") {
    auto o = sq_order_presentation(poly_interval(P("x1"), P("x2"), 2), sigma_order(1));
    auto fib = fiber_of(o, W("a#aa#$"));
    REQUIRE(fib.size() == C(1, 2));
    auto others = enumerate(o.p.domain, 3000, &o.p.order, 7);
    auto lo = *std::min_element(fib.begin(), fib.end(), [&](auto& x, auto& y) { return sq_leq(o, sigma_order(1), x, y) && x != y; });
    auto hi = *std::max_element(fib.begin(), fib.end(), [&](auto& x, auto& y) { return sq_leq(o, sigma_order(1), x, y) && x != y; });
    std::set<Word> in(fib.begin(), fib.end());
    Leq leq(o);
    for (const auto& z : others)
        if (leq(lo, z) && leq(z, hi)) CHECK(in.count(z));
}

TEST_CASE("shuffle language membership", "[linorder][shuffle]") {
    Nfa s = shuffle_language(a_block());
    CHECK(accepts(s, W("1a#")));
    CHECK(accepts(s, W("01a#1aa#")));
    CHECK(accepts(s, W("1a#01a#")));
    CHECK_FALSE(accepts(s, W("1a#0")));
    CHECK_FALSE(accepts(s, W("a#")));
    CHECK_FALSE(accepts(s, W("")));
}

TEST_CASE("shuffle automaton transports run counts", "[linorder][shuffle]") {
    auto alpha = sigma_alphabet(1);
    Nfa a = poly_interval(P("x1"), P("x2"), 2);
    Nfa e = a_block();
    Nfa s = shuffle_automaton(a, e, e, epsilon_automaton(alpha));
    CHECK(equivalent(s, concat(concat(concat(e, lit("$")), shuffle_language(e)), lit("$"))));
    std::mt19937 rng(5);
    std::uniform_int_distribution<unsigned> len(1, 3), bit(0, 1), blocks(0, 2);
    for (int i = 0; i < 30; ++i) {
        std::string u1 = std::string(len(rng), 'a') + "#", u2 = std::string(len(rng), 'a') + "#";
        std::string v;
        for (unsigned b = blocks(rng); b > 0; --b) {
            for (unsigned j = len(rng) - 1; j > 0; --j) v += bit(rng) ? '1' : '0';
            v += "1" + std::string(len(rng), 'a') + "#";
        }
        for (unsigned j = len(rng) - 1; j > 0; --j) v += bit(rng) ? '1' : '0';
        v += "1";
        Word lhs = W(u1 + "$" + v + u2 + "$"), rhs = W(u1 + u2 + "$");
        CHECK(count_accepting_runs(s, lhs) == count_accepting_runs(a, rhs));
        CHECK(oracle::count_paths(s, lhs) == oracle::count_paths(a, rhs));
    }
}

TEST_CASE("shuffle automaton rejects languages of the wrong shape", "[linorder][shuffle]") {
    auto alpha = sigma_alphabet(1);
    Nfa a = poly_interval(P("x1"), P("x2"), 2);
    CHECK_THROWS_AS(shuffle_automaton(a, lit("a#"), a_block(), epsilon_automaton(alpha)), ValidationError);
    CHECK_THROWS_AS(shuffle_automaton(a, a_block(), lit("$"), epsilon_automaton(alpha)), ValidationError);
}

TEST_CASE("shuffle orders validate and split into fibre blocks", "[linorder][shuffle][validate]") {
    auto alpha = sigma_alphabet(1);
    Nfa e = a_block();
    Nfa s = shuffle_automaton(poly_interval(P("1"), P("1"), 2), e, e, epsilon_automaton(alpha));
    auto o = sq_order_presentation(s, sigma_order(1));
    CHECK(validate_linear_order(o.p));
    auto xs = enumerate(o.p.domain, 40, &o.p.order, 30);
    for (std::size_t i = 0; i < xs.size(); i += 13) {
        Nfa fast = block_of(o, xs[i]), slow = block_of_generic(o, xs[i]);
        CHECK(equivalent(fast, slow));
        CHECK(cardinality(fast) == ExtendedCount::finite(8));
    }
    auto prof = block_profile(o, 10, 40);
    CHECK(prof.blocks.size() == 1);
    CHECK(prof.blocks.count(8));
    CHECK(prof.infinite == 0);
    auto slow = block_profile_generic(o, 9, 40);
    CHECK(slow.blocks == block_profile(o, 9, 40).blocks);
}

TEST_CASE("shuffle words have neighbours on both sides", "[linorder][shuffle]") {
    auto ord = sigma_order(1);
    Nfa d = unite(lit("b2#"), lit("b3#"));
    Nfa sd = shuffle_language(d);
    auto ws = sigma_d_words(d, 10);
    REQUIRE(ws.size() > 50);
    for (const auto& w : ws) {
        auto [below, above] = shuffle_neighbors(w);
        CHECK(accepts(sd, below));
        CHECK(accepts(sd, above));
        CHECK(lex_compare(below, w, ord) < 0);
        CHECK(lex_compare(w, above, ord) < 0);
    }
}

TEST_CASE("shuffle words are dense for every colour", "[linorder][shuffle]") {
    auto ord = sigma_order(1);
    auto alpha = sigma_alphabet(1);
    Nfa d = unite(concat(letters_plus(alpha, {Symbol::base("b2")}), lit("#")), lit("b3#"));
    Nfa sd = shuffle_language(d);
    auto ws = sigma_d_words(d, 10);
    std::vector<Word> colours;
    for (const auto& u : enumerate(d, 100, &ord, 4)) colours.push_back(u);
    REQUIRE(colours.size() == 4);
    std::mt19937 rng(3);
    std::uniform_int_distribution<std::size_t> pick(0, ws.size() - 1);
    for (int i = 0; i < 50; ++i) {
        Word w1 = ws[pick(rng)], w2 = ws[pick(rng)];
        if (w1 == w2) {
            --i;
            continue;
        }
        if (lex_compare(w2, w1, ord) < 0) std::swap(w1, w2);
        for (const auto& u : colours) {
            Word z = shuffle_between(w1, w2, u, ord);
            CHECK(accepts(sd, z));
            CHECK(lex_compare(w1, z, ord) < 0);
            CHECK(lex_compare(z, w2, ord) < 0);
            CHECK(colour_of(z) == u);
        }
    }
}

TEST_CASE("dollar chains enumerate as omega times j", "[linorder]") {
    auto ord = sigma_order(3);
    auto ws = enumerate(dollar_chains(2), 1000, &ord, 6);
    std::sort(ws.begin(), ws.end(), [&](auto& x, auto& y) { return lex_compare(x, y, ord) < 0; });
    REQUIRE(ws.size() == 12);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(ws[i] == Word(i + 1, Symbol::base("$_1")));
        CHECK(ws[6 + i] == Word(i + 1, Symbol::base("$_2")));
    }
}

TEST_CASE("base automaton has the level one shape", "[linorder][tower]") {
    const auto& b = base_case("x2");
    CHECK(includes(lo_shape(1, true, 1), b.a1));
    CHECK_THROWS_AS(build_base_A1(P("x1"), P("x2"), 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(build_base_A1(P("0"), P("x2"), 1, 2), ZeroPolynomial);
    for (std::string root : {"a#", "b1#", "b1b1#", "b2#"}) CHECK(has_root(b.a1, root, 1));
    CHECK_FALSE(has_root(b.a1, "a#a#", 1));
}

TEST_CASE("the K fibre has only off-diagonal blocks", "[linorder][blocks]") {
    const auto& b = base_case("x2");
    auto prof = block_profile(b.k1, 12, 30);
    CHECK(sizes(prof, 30) == off_diagonal(30));
    CHECK(prof.infinite == 0);
    auto xs = enumerate(b.k1.p.domain, 40, &b.k1.p.order, 30);
    CHECK(linear_on(b.k1, xs));
}

TEST_CASE("reported blocks are consecutive in the enumerated slice", "[linorder][blocks]") {
    const auto& o = base_case("x2").k1;
    auto xs = enumerate(o.p.domain, 1, &o.p.order, 30);
    Nfa blk = block_of(o, xs[0]);
    auto members = enumerate(blk, 1000);
    REQUIRE(members.size() == C(2, 1));
    std::set<Word> in(members.begin(), members.end());
    Leq leq(o);
    auto lo = members[0], hi = members[0];
    for (const auto& m : members) {
        if (leq(m, lo)) lo = m;
        if (leq(hi, m)) hi = m;
    }
    auto slice = enumerate(o.p.domain, 20000, &o.p.order, xs[0].size() + 2);
    std::size_t between = 0;
    for (const auto& z : slice)
        if (leq(lo, z) && leq(z, hi)) {
            CHECK(in.count(z));
            ++between;
        }
    CHECK(between == members.size());
}

TEST_CASE("a solvable pair puts a diagonal block into the L fibre", "[linorder][blocks]") {
    const auto& b = base_case("x2");
    auto k = sizes(block_profile(b.k1, 12, 40), 40);
    auto l = sizes(block_profile(b.l1, 12, 40), 40);
    CHECK(l.count(C(2, 2)));
    CHECK_FALSE(k.count(C(2, 2)));
    CHECK(linear_on(b.l1, enumerate(b.l1.p.domain, 30, &b.l1.p.order, 30)));
}

TEST_CASE("an unsolvable pair gives matching profiles up to 40", "[linorder][blocks]") {
    const auto& b = base_case("x1+1");
    auto k = sizes(block_profile(b.k1, 12, 40), 40);
    auto l = sizes(block_profile(b.l1, 12, 40), 40);
    CHECK(k == off_diagonal(40));
    CHECK(l == k);
}

TEST_CASE("fibre extraction rejects bad prefixes", "[linorder]") {
    const auto& b = base_case("x2");
    auto ord = sigma_order(1);
    CHECK_THROWS_AS(extract_fiber_order(b.a1, W("b3#"), ord), std::invalid_argument);
    CHECK_THROWS_AS(extract_fiber_order(b.a1, W("a"), ord), std::invalid_argument);
    CHECK_THROWS_AS(extract_fiber_order(b.a1, W("a#a#"), ord), std::invalid_argument);
}

TEST_CASE("tower steps keep the level shape", "[linorder][tower]") {
    Nfa a1 = build_base_A1(P("x1"), P("x2"), 3, 4);
    CHECK(includes(lo_shape(3, true, 1), a1));
    Nfa a2 = lo_tower_step(a1, 1);
    CHECK(includes(lo_shape(2, false, 2), a2));
    for (std::string root : {"a#a#", "b1#", "b2#"}) CHECK(has_root(a2, root, 2));
    CHECK_FALSE(has_root(a2, "b1b1#", 2));
    CHECK_FALSE(has_root(a2, "a#a#a#", 2));
    Nfa a3 = lo_tower_step(a2, 2);
    CHECK(includes(lo_shape(1, false, 3), a3));
    for (std::string root : {"a#", "b1#", "b2#"}) CHECK(has_root(a3, root, 3));
    CHECK_THROWS_AS(lo_tower_step(a3, 3), ValidationError);
    CHECK_THROWS_AS(lo_tower_step(lit("a#$0"), 1), ValidationError);
    auto tower = build_lo_tower(P("x1"), P("x2"), 3, 4);
    REQUIRE(tower.size() == 3);
    CHECK(equivalent(tower[2], a3));
}

TEST_CASE("finite orders form a single block", "[linorder][blocks]") {
    std::vector<Symbol> ab{Symbol::base("a"), Symbol::base("b")};
    AlphabetOrder ord({"a", "b"});
    auto finite = [&](const std::vector<std::string>& names) {
        std::vector<Word> ws;
        for (const auto& n : names) ws.push_back(chars_word(n));
        OrderPresentation o;
        o.p.order = ord;
        o.p.domain = oracle::word_set_automaton(ab, ws);
        o.p.relations["leq"] = Relation{2, order_relation_automaton(o.p.domain, OrderKind::Lex, ord)};
        return o;
    };
    auto o1 = finite({"a", "b", "aa", "ab", "ba", "bb", "aaa", "bbb"});
    auto o2 = finite({"", "a", "aa", "aaa", "aaaa", "b", "bb", "ab"});
    CHECK(validate_linear_order(o1.p));
    auto p1 = block_profile(o1, 5, 40), p2 = block_profile(o2, 5, 40);
    CHECK(p1.blocks == std::map<std::size_t, std::size_t>{{8, 1}});
    CHECK(p1.blocks == p2.blocks);
}
