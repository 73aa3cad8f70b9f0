#ifndef AUTOSTRUCT_SYMBOL_HPP
#define AUTOSTRUCT_SYMBOL_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace autostruct {

/// Interned letter handle. Id 0 is reserved for the pad letter.
using LetterId = std::uint32_t;
inline constexpr LetterId kPad = 0;
inline constexpr std::string_view kPadName = "_";

LetterId intern(std::string_view name);
const std::string& letter_name(LetterId id);

/** \brief A base letter, or a tuple of letters and pads (never all pads). */
struct Symbol {
    std::vector<LetterId> entries;
    bool tuple = false;

    static Symbol base(std::string_view letter);
    static Symbol base_id(LetterId id) { return Symbol{{id}, false}; }
    static Symbol make_tuple(std::vector<LetterId> e) { return Symbol{std::move(e), true}; }

    std::size_t arity() const { return entries.size(); }
    LetterId letter() const { return entries.front(); }
    bool all_pad() const;
    bool is_pad(std::size_t track) const { return entries[track] == kPad; }

    /// "a" for base letters, "(a,_,b)" for tuples.
    std::string str() const;

    auto operator<=>(const Symbol&) const = default;
    bool operator==(const Symbol&) const = default;
};

struct SymbolHash {
    std::size_t operator()(const Symbol& s) const noexcept;
};

using Word = std::vector<Symbol>;

std::string word_str(const Word& w, std::string_view sep = "");

/// Splits a base word by greedy longest match against the letters given.
/// Throws std::invalid_argument when no letter matches.
Word parse_base_word(std::string_view text, const std::vector<std::string>& letters);

/// Base word from single-character letters ("aa#" -> a a #), '#' kept as is.
Word chars_word(std::string_view text);

}  // namespace autostruct

#endif
