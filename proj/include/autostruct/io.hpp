#ifndef AUTOSTRUCT_IO_HPP
#define AUTOSTRUCT_IO_HPP

#include <string>

#include <json.hpp>

#include "autostruct/equiv.hpp"
#include "autostruct/linorder.hpp"
#include "autostruct/trees.hpp"

namespace autostruct {

using Json = nlohmann::json;

/// Base letters as strings, tuple letters as arrays with "_" for the pad.
Json symbol_to_json(const Symbol& s);
Symbol symbol_from_json(const Json& j);

/// {"alphabet":{"kind","arity","letters"},"states","initial","final","transitions":[{"src","sym","dst"}]}.
Json nfa_to_json(const Nfa& a);
/// Keeps the transition order of the file; throws ValidationError on bad indices or a non-canonical list.
Nfa nfa_from_json(const Json& j);

/// {"alphabet_order":[...],"domain":<automaton>,"relations":{"E":{"arity":2,"automaton":<automaton>}}}.
Json presentation_to_json(const Presentation& p);
Presentation presentation_from_json(const Json& j);

/// Presentation fields plus "height" (and "root_tracks" for dags).
Json dag_to_json(const DagPresentation& d);
DagPresentation dag_from_json(const Json& j);
Json tree_to_json(const TreePresentation& t);
TreePresentation tree_from_json(const Json& j);

/// Finite counts are numbers (strings beyond 64 bits), ℵ0 is "inf".
Json count_to_json(const ExtendedCount& c);
ExtendedCount count_from_json(const Json& j);

Json verdict_to_json(const IsoVerdict& v);
IsoVerdict verdict_from_json(const Json& j);

/// {"1":h(1),...,"inf":h(ℵ0)}.
Json census_to_json(const SizeCensus& c);
SizeCensus census_from_json(const Json& j);

/// {"bound":B,"cap":S,"blocks":{"8":2,...},"over_cap":n,"infinite":n}.
Json block_profile_to_json(const BlockProfile& b);
BlockProfile block_profile_from_json(const Json& j);

/// Two-space indented text with a trailing newline.
std::string dump_json(const Json& j);
Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

/// Graphviz rendering; parallel edges share one label.
std::string to_dot(const Nfa& a, const std::string& name = "A");

}  // namespace autostruct

#endif
