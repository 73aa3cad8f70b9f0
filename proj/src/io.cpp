#include "autostruct/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace autostruct {

namespace {

template <class T>
T field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ValidationError(std::string("bad field \"") + key + "\"");
    }
}

std::size_t index_of(const std::string& key) {
    std::size_t pos = 0;
    auto v = std::stoull(key, &pos);
    if (pos != key.size()) throw ValidationError("bad numeric key " + key);
    return static_cast<std::size_t>(v);
}

}  // namespace

Json symbol_to_json(const Symbol& s) {
    if (!s.tuple) return letter_name(s.letter());
    Json arr = Json::array();
    for (auto e : s.entries) arr.push_back(e == kPad ? std::string(kPadName) : letter_name(e));
    return arr;
}

Symbol symbol_from_json(const Json& j) {
    if (j.is_string()) return Symbol::base(j.get<std::string>());
    if (!j.is_array() || j.empty()) throw ValidationError("letter must be a string or a non-empty array");
    std::vector<LetterId> e;
    for (const auto& x : j) {
        if (!x.is_string()) throw ValidationError("tuple entries must be strings");
        auto name = x.get<std::string>();
        e.push_back(name == kPadName ? kPad : intern(name));
    }
    Symbol s = Symbol::make_tuple(std::move(e));
    if (s.all_pad()) throw ValidationError("all-pad tuple letter");
    return s;
}

Json nfa_to_json(const Nfa& a) {
    Json letters = Json::array();
    for (const auto& s : a.alphabet) letters.push_back(symbol_to_json(s));
    Json trans = Json::array();
    for (const auto& t : a.transitions) trans.push_back({{"src", t.src}, {"sym", t.sym}, {"dst", t.dst}});
    return {{"alphabet", {{"kind", a.tuple ? "tuple" : "base"}, {"arity", a.arity}, {"letters", letters}}},
            {"states", a.states},
            {"initial", a.initial},
            {"final", a.final},
            {"transitions", trans}};
}

Nfa nfa_from_json(const Json& j) {
    const Json alpha = field<Json>(j, "alphabet");
    auto kind = field<std::string>(alpha, "kind");
    if (kind != "base" && kind != "tuple") throw ValidationError("alphabet kind must be base or tuple");
    Nfa a = kind == "tuple" ? Nfa::over_tuples(field<std::size_t>(alpha, "arity")) : Nfa::over({});
    const Json letters = field<Json>(alpha, "letters");
    for (const auto& l : letters) {
        Symbol s = symbol_from_json(l);
        if (s.tuple != a.tuple || (a.tuple && s.arity() != a.arity)) throw ValidationError("letter does not fit the alphabet kind");
        a.alphabet.push_back(s);
    }
    a.states = field<std::size_t>(j, "states");
    a.initial = field<std::vector<State>>(j, "initial");
    a.final = field<std::vector<State>>(j, "final");
    const Json trans = field<Json>(j, "transitions");
    for (const auto& t : trans)
        a.transitions.push_back({field<State>(t, "src"), field<SymIdx>(t, "sym"), field<State>(t, "dst")});
    a.check();
    return a;
}

Json presentation_to_json(const Presentation& p) {
    Json rels = Json::object();
    for (const auto& [name, r] : p.relations) rels[name] = {{"arity", r.arity}, {"automaton", nfa_to_json(r.automaton)}};
    return {{"alphabet_order", p.order.letters()}, {"domain", nfa_to_json(p.domain)}, {"relations", rels}};
}

Presentation presentation_from_json(const Json& j) {
    Presentation p;
    p.order = AlphabetOrder(field<std::vector<std::string>>(j, "alphabet_order"));
    p.domain = nfa_from_json(field<Json>(j, "domain"));
    if (p.domain.tuple) throw ValidationError("domain must be over base letters");
    const Json rels = field<Json>(j, "relations");
    for (const auto& [name, r] : rels.items()) {
        Relation rel{field<std::size_t>(r, "arity"), nfa_from_json(field<Json>(r, "automaton"))};
        if (!rel.automaton.tuple || rel.automaton.arity != rel.arity) throw ValidationError("relation " + name + " has the wrong arity");
        p.relations[name] = std::move(rel);
    }
    return p;
}

Json dag_to_json(const DagPresentation& d) {
    Json j = presentation_to_json(d.p);
    j["height"] = d.height;
    j["root_tracks"] = d.root_tracks;
    return j;
}

DagPresentation dag_from_json(const Json& j) {
    DagPresentation d;
    d.p = presentation_from_json(j);
    d.height = field<std::size_t>(j, "height");
    d.root_tracks = j.contains("root_tracks") ? field<std::size_t>(j, "root_tracks") : 0;
    return d;
}

Json tree_to_json(const TreePresentation& t) {
    Json j = presentation_to_json(t.p);
    j["height"] = t.height;
    return j;
}

TreePresentation tree_from_json(const Json& j) {
    TreePresentation t;
    t.p = presentation_from_json(j);
    t.height = field<std::size_t>(j, "height");
    return t;
}

Json count_to_json(const ExtendedCount& c) {
    if (c.infinite) return "inf";
    if (c.value <= std::numeric_limits<std::uint64_t>::max()) return static_cast<std::uint64_t>(c.value);
    return c.value.str();
}

ExtendedCount count_from_json(const Json& j) {
    if (j.is_number_unsigned()) return ExtendedCount::finite(j.get<std::uint64_t>());
    if (!j.is_string()) throw ValidationError("count must be a number or a string");
    auto s = j.get<std::string>();
    if (s == "inf") return ExtendedCount::inf();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw ValidationError("bad count " + s);
    return ExtendedCount::finite(BigNat(s));
}

Json verdict_to_json(const IsoVerdict& v) {
    Json j{{"kind", kind_name(v.kind)}, {"bounds", v.bounds}};
    if (v.kind == IsoVerdict::Kind::NonIsomorphic) {
        j["statistic"] = v.statistic;
        j["left"] = count_to_json(v.left);
        j["right"] = count_to_json(v.right);
    }
    return j;
}

IsoVerdict verdict_from_json(const Json& j) {
    auto kind = field<std::string>(j, "kind");
    auto bounds = field<std::map<std::string, std::size_t>>(j, "bounds");
    IsoVerdict v;
    if (kind == kind_name(IsoVerdict::Kind::NonIsomorphic)) {
        v = IsoVerdict::differ(field<std::string>(j, "statistic"), count_from_json(field<Json>(j, "left")),
                               count_from_json(field<Json>(j, "right")));
    } else if (kind == kind_name(IsoVerdict::Kind::Isomorphic)) {
        v = IsoVerdict::isomorphic();
    } else if (kind == kind_name(IsoVerdict::Kind::ConsistentUpTo)) {
        v = IsoVerdict::consistent({});
    } else {
        throw ValidationError("unknown verdict kind " + kind);
    }
    v.bounds = std::move(bounds);
    return v;
}

Json census_to_json(const SizeCensus& c) {
    Json j = Json::object();
    for (const auto& [n, h] : c.finite) j[std::to_string(n)] = count_to_json(h);
    if (c.infinite) j["inf"] = count_to_json(*c.infinite);
    return j;
}

SizeCensus census_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("census must be an object");
    SizeCensus c;
    for (const auto& [k, v] : j.items()) {
        if (k == "inf")
            c.infinite = count_from_json(v);
        else
            c.finite[index_of(k)] = count_from_json(v);
    }
    return c;
}

Json block_profile_to_json(const BlockProfile& b) {
    Json blocks = Json::object();
    for (const auto& [size, n] : b.blocks) blocks[std::to_string(size)] = n;
    return {{"bound", b.bound}, {"cap", b.cap}, {"blocks", blocks}, {"over_cap", b.over_cap}, {"infinite", b.infinite}};
}

BlockProfile block_profile_from_json(const Json& j) {
    BlockProfile b;
    b.bound = field<std::size_t>(j, "bound");
    b.cap = field<std::size_t>(j, "cap");
    const Json blocks = field<Json>(j, "blocks");
    for (const auto& [k, v] : blocks.items()) {
        if (!v.is_number_unsigned()) throw ValidationError("block counts must be numbers");
        b.blocks[index_of(k)] = v.get<std::size_t>();
    }
    if (j.contains("over_cap")) b.over_cap = field<std::size_t>(j, "over_cap");
    if (j.contains("infinite")) b.infinite = field<std::size_t>(j, "infinite");
    return b;
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << dump_json(j);
}

std::string to_dot(const Nfa& a, const std::string& name) {
    std::ostringstream os;
    os << "digraph \"" << name << "\" {\n  rankdir=LR;\n  node [shape=circle];\n";
    for (auto f : a.final) os << "  " << f << " [shape=doublecircle];\n";
    for (auto i : a.initial) os << "  init" << i << " [shape=point];\n  init" << i << " -> " << i << ";\n";
    std::map<std::pair<State, State>, std::string> labels;
    for (const auto& t : a.transitions) {
        auto& l = labels[{t.src, t.dst}];
        if (!l.empty()) l += ",";
        l += a.alphabet[t.sym].str();
    }
    for (const auto& [e, l] : labels) {
        std::string esc;
        for (char c : l) {
            if (c == '"' || c == '\\') esc += '\\';
            esc += c;
        }
        os << "  " << e.first << " -> " << e.second << " [label=\"" << esc << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace autostruct
