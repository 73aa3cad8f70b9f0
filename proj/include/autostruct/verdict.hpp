#ifndef AUTOSTRUCT_VERDICT_HPP
#define AUTOSTRUCT_VERDICT_HPP

#include <map>
#include <string>

#include "autostruct/relations.hpp"

namespace autostruct {

/** \brief Three-valued isomorphism answer.  NonIsomorphic always carries a checkable witness. */
struct IsoVerdict {
    enum class Kind { Isomorphic, NonIsomorphic, ConsistentUpTo };
    Kind kind = Kind::ConsistentUpTo;
    std::string statistic;  // which count differs, e.g. "h(24)"
    ExtendedCount left, right;
    std::map<std::string, std::size_t> bounds;

    static IsoVerdict isomorphic() { return {Kind::Isomorphic, {}, {}, {}, {}}; }
    static IsoVerdict differ(std::string stat, ExtendedCount l, ExtendedCount r) {
        return {Kind::NonIsomorphic, std::move(stat), std::move(l), std::move(r), {}};
    }
    static IsoVerdict consistent(std::map<std::string, std::size_t> b) { return {Kind::ConsistentUpTo, {}, {}, {}, std::move(b)}; }

    std::string str() const;
};

std::string kind_name(IsoVerdict::Kind k);

}  // namespace autostruct

#endif
