#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "autostruct/io.hpp"

using namespace autostruct;

namespace {

constexpr int kOk = 0;
constexpr int kNonIso = 1;
constexpr int kUsage = 2;
constexpr int kCap = 3;

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::invalid_argument("cannot write " + out);
    f << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

// Base words by greedy match on the alphabet; tuple words as "|"-separated tracks with "_" for pads.
Word parse_word(const std::string& text, const Nfa& a) {
    std::set<std::string> names;
    for (const auto& s : a.alphabet)
        for (auto e : s.entries)
            if (e != kPad) names.insert(letter_name(e));
    std::vector<std::string> letters(names.begin(), names.end());
    if (!a.tuple) return parse_base_word(text, letters);
    letters.emplace_back(kPadName);
    auto tracks = split(text, '|');
    if (tracks.size() != a.arity) throw std::invalid_argument("expected " + std::to_string(a.arity) + " tracks");
    std::vector<Word> ws;
    std::size_t len = 0;
    for (const auto& t : tracks) {
        ws.push_back(parse_base_word(t, letters));
        len = std::max(len, ws.back().size());
    }
    Word w;
    for (std::size_t i = 0; i < len; ++i) {
        std::vector<LetterId> col;
        for (const auto& x : ws) {
            LetterId id = i < x.size() ? x[i].letter() : kPad;
            col.push_back(letter_name(id) == kPadName ? kPad : id);
        }
        Symbol s = Symbol::make_tuple(col);
        if (s.all_pad()) throw std::invalid_argument("all-pad column at position " + std::to_string(i));
        w.push_back(s);
    }
    return w;
}

Json load(const std::string& path) { return read_json_file(path); }

bool is_presentation(const Json& j) { return j.is_object() && j.contains("domain"); }

AlphabetOrder order_for(const Nfa& a, std::size_t level) {
    auto sigma = sigma_order(level);
    for (const auto& s : a.alphabet)
        if (!sigma.contains(s.letter())) return AlphabetOrder::of(a.alphabet);
    return sigma;
}

std::vector<std::size_t> parse_caps(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& p : split(s, ',')) out.push_back(std::stoul(p));
    if (out.size() != 3) throw std::invalid_argument("--caps takes K,L,M");
    return out;
}

bool validate_class(const Presentation& p, const std::string& cls, const std::string& rel) {
    auto height = [&](const std::string& prefix) { return std::stoul(cls.substr(prefix.size())); };
    if (cls == "equivalence") return validate_equivalence(p, rel.empty() ? "E" : rel);
    if (cls == "order") return validate_linear_order(p, rel.empty() ? "leq" : rel);
    if (cls.rfind("tree:", 0) == 0) return validate_tree(p, height("tree:"), rel.empty() ? "E" : rel);
    if (cls.rfind("forest:", 0) == 0) return validate_forest(p, height("forest:"), rel.empty() ? "E" : rel);
    if (cls.rfind("dag:", 0) == 0) return validate_dag_height(p, height("dag:"), rel.empty() ? "E" : rel);
    throw std::invalid_argument("unknown class " + cls);
}

struct GadgetArgs {
    std::string kind, p1 = "x1", p2 = "x2", out;
    std::size_t k = 1, l = 2, n = 2;
    bool no_validate = false;
};

int run_gadget(const GadgetArgs& g) {
    Polynomial p1 = Polynomial::parse(g.p1), p2 = Polynomial::parse(g.p2);
    auto check = [&](auto valid, const std::string& what) {
        if (g.no_validate) return;
        if (!valid()) throw ValidationError(what + " failed validation");
        std::cerr << what << ": valid\n";
    };
    if (g.kind == "e-good" || g.kind == "e-reduction") {
        Presentation e = g.kind == "e-good" ? build_e_good() : e_good_reduction(p1, p2, g.k);
        check([&] { return validate_equivalence(e); }, g.kind);
        emit(g.out, dump_json(presentation_to_json(e)));
    } else if (g.kind == "d2" || g.kind == "tree-tower") {
        DagPresentation d = g.kind == "d2" ? build_D2(p1, p2, g.k, g.l) : build_tower(p1, p2, g.n, g.l);
        if (!g.no_validate) d.validate();
        check([&] { return validate_dag_height(d.p, d.height); }, g.kind);
        emit(g.out, dump_json(dag_to_json(d)));
    } else if (g.kind == "lo-base") {
        Nfa a = build_base_A1(p1, p2, g.n, g.l);
        check([&] { return includes(lo_shape(g.n, true, 1), a); }, g.kind);
        emit(g.out, dump_json(nfa_to_json(a)));
    } else if (g.kind == "lo-tower") {
        auto tower = build_lo_tower(p1, p2, g.n, g.l);
        check([&] { return includes(lo_shape(1, g.n == 1, g.n), tower.back()); }, g.kind);
        emit(g.out, dump_json(nfa_to_json(tower.back())));
    } else {
        throw std::invalid_argument("unknown gadget " + g.kind);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Automatic structures: polynomial automata, FO evaluation, gadgets and bounded isomorphism checks"};
    app.require_subcommand(1);
    int code = kOk;

    std::string poly, style = "sharp", letter = "a", out;
    std::size_t vars = 0;
    auto* build = app.add_subcommand("build-poly", "automaton with p(c) accepting runs on the word for c");
    build->add_option("--poly", poly, "polynomial such as \"x1*x2+2\"")->required();
    build->add_option("--vars", vars, "number of variables");
    build->add_option("--style", style, "sharp or conv")->check(CLI::IsMember({"sharp", "conv"}));
    build->add_option("--letter", letter, "block letter");
    build->add_option("-o,--output", out, "output file");
    build->callback([&] {
        Polynomial p = Polynomial::parse(poly, vars);
        std::size_t k = vars ? vars : p.vars;
        Nfa a = style == "sharp" ? poly_automaton_sharp(p, k, letter) : poly_automaton_conv(p, k, letter);
        emit(out, dump_json(nfa_to_json(a)));
    });

    std::string file, file2, word;
    auto* count = app.add_subcommand("count-runs", "number of accepting runs on a word");
    count->add_option("automaton", file)->required();
    count->add_option("word", word)->required();
    count->callback([&] {
        Nfa a = nfa_from_json(load(file));
        std::cout << count_accepting_runs(a, parse_word(word, a)) << "\n";
    });

    std::string prefix = "t";
    auto* runs = app.add_subcommand("run-automaton", "Run_A with one letter per transition");
    runs->add_option("automaton", file)->required();
    runs->add_option("--prefix", prefix, "run letter prefix");
    runs->add_option("-o,--output", out, "output file");
    runs->callback([&] {
        RunAutomaton r = run_automaton(nfa_from_json(load(file)), prefix);
        Json j = nfa_to_json(r.run);
        Json proj = Json::array();
        for (auto s : r.pi) proj.push_back(symbol_to_json(r.source.alphabet[s]));
        j["projection"] = proj;
        emit(out, dump_json(j));
    });

    std::string formula_file, var_list;
    auto* eval = app.add_subcommand("eval", "evaluate an FO+∃∞ formula");
    eval->add_option("presentation", file)->required();
    eval->add_option("formula", formula_file, "file with one s-expression")->required();
    eval->add_option("--vars", var_list, "comma-separated track order of the free variables");
    eval->add_option("-o,--output", out, "output file for open formulas");
    eval->callback([&] {
        Presentation p = presentation_from_json(load(file));
        Formula f = Formula::parse(read_text(formula_file));
        if (f.free_vars().empty()) {
            std::cout << (decide_sentence(p, f) ? "true" : "false") << "\n";
            return;
        }
        std::vector<std::string> vs;
        if (var_list.empty())
            vs.assign(f.free_vars().begin(), f.free_vars().end());
        else
            vs = split(var_list, ',');
        emit(out, dump_json(nfa_to_json(eval_formula(p, f, vs))));
    });

    std::string cls, rel;
    auto* validate = app.add_subcommand("validate", "class validator");
    validate->add_option("presentation", file)->required();
    validate->add_option("--class", cls, "equivalence | order | tree:N | forest:N | dag:N")->required();
    validate->add_option("--rel", rel, "relation name");
    validate->callback([&] {
        bool ok = validate_class(presentation_from_json(load(file)), cls, rel);
        std::cout << (ok ? "valid" : "invalid") << "\n";
        if (!ok) code = kUsage;
    });

    GadgetArgs g;
    auto* gadget = app.add_subcommand("gadget", "build and validate a reduction gadget");
    gadget->add_option("kind", g.kind, "e-good | e-reduction | d2 | tree-tower | lo-base | lo-tower")
        ->required()
        ->check(CLI::IsMember({"e-good", "e-reduction", "d2", "tree-tower", "lo-base", "lo-tower"}));
    gadget->add_option("--p1", g.p1);
    gadget->add_option("--p2", g.p2);
    gadget->add_option("--k", g.k, "variables of the polynomials (equivalence and d2)");
    gadget->add_option("--l", g.l, "variables including the existential block");
    gadget->add_option("--n", g.n, "tower height or number of a-blocks");
    gadget->add_flag("--no-validate", g.no_validate);
    gadget->add_option("-o,--output", g.out, "output file");
    gadget->callback([&] { code = run_gadget(g); });

    std::size_t bound = 30;
    auto* iso_e = app.add_subcommand("iso-equiv", "compare h on {1..N} and ℵ0");
    iso_e->add_option("first", file)->required();
    iso_e->add_option("second", file2)->required();
    iso_e->add_option("--bound", bound, "largest class size compared");
    iso_e->callback([&] {
        IsoVerdict v = iso_check_equiv(presentation_from_json(load(file)), presentation_from_json(load(file2)), bound);
        std::cout << dump_json(verdict_to_json(v));
        if (v.kind == IsoVerdict::Kind::NonIsomorphic) code = kNonIso;
    });

    std::string caps = "40,6,12", at1, at2;
    std::size_t height = 0;
    auto* iso_t = app.add_subcommand("iso-tree", "bounded isomorphism check of trees of finite height");
    iso_t->add_option("first", file, "tree file, or dag file with --at1")->required();
    iso_t->add_option("second", file2, "tree file, or dag file with --at2")->required();
    iso_t->add_option("--caps", caps, "K,L,M: degree cap, multiplicity cap, representatives");
    iso_t->add_option("--height", height, "height bound (default: the larger stored height)");
    iso_t->add_option("--at1", at1, "unfold the first dag at this node");
    iso_t->add_option("--at2", at2, "unfold the second dag at this node");
    iso_t->callback([&] {
        auto tree = [](const std::string& path, const std::string& at, bool use_at) {
            Json j = load(path);
            if (!use_at) return tree_from_json(j);
            DagPresentation d = dag_from_json(j);
            return unfold_at(d, parse_word(at, d.p.domain));
        };
        TreePresentation t1 = tree(file, at1, iso_t->count("--at1") > 0);
        TreePresentation t2 = tree(file2, at2, iso_t->count("--at2") > 0);
        auto c = parse_caps(caps);
        std::size_t n = height ? height : std::max(t1.height, t2.height);
        IsoVerdict v = iso_bounded(t1, t2, n, c[0], c[1], c[2]);
        std::cout << dump_json(verdict_to_json(v));
        if (v.kind == IsoVerdict::Kind::NonIsomorphic) code = kNonIso;
    });

    std::string root;
    std::size_t cap = 40, level = 1;
    auto* blocks = app.add_subcommand("block-profile", "sizes of maximal finite intervals of a run order");
    blocks->add_option("automaton", file)->required();
    blocks->add_option("--prefix", root, "extract the fibre order below this root first");
    blocks->add_option("--bound", bound, "length bound on enumerated elements");
    blocks->add_option("--cap", cap, "largest block size reported individually");
    blocks->add_option("--level", level, "letter order of Σ_level");
    blocks->add_option("-o,--output", out, "output file");
    blocks->callback([&] {
        Nfa a = nfa_from_json(load(file));
        AlphabetOrder ord = order_for(a, level);
        OrderPresentation o = root.empty() ? sq_order_presentation(a, ord) : extract_fiber_order(a, sigma_word(root, level), ord);
        emit(out, dump_json(block_profile_to_json(block_profile(o, bound, cap))));
    });

    bool dot = false;
    auto* exp = app.add_subcommand("export", "render an automaton or a presentation relation");
    exp->add_option("input", file)->required();
    exp->add_flag("--dot", dot, "Graphviz output")->required();
    exp->add_option("--relation", rel, "relation of a presentation (default: the domain)");
    exp->add_option("-o,--output", out, "output file");
    exp->callback([&] {
        Json j = load(file);
        if (!is_presentation(j)) {
            emit(out, to_dot(nfa_from_json(j)));
            return;
        }
        Presentation p = presentation_from_json(j);
        emit(out, rel.empty() ? to_dot(p.domain, "domain") : to_dot(p.relation(rel).automaton, rel));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int r = app.exit(e);
        return r == 0 ? kOk : kUsage;
    } catch (const StateCapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCap;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return code;
}
