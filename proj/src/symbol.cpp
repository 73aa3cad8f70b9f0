#include "autostruct/symbol.hpp"

#include <deque>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

namespace autostruct {

namespace {

struct Interner {
    std::shared_mutex mu;
    std::deque<std::string> names{std::string(kPadName)};
    std::unordered_map<std::string, LetterId> ids{{std::string(kPadName), kPad}};
};

Interner& interner() {
    static Interner in;
    return in;
}

}  // namespace

LetterId intern(std::string_view name) {
    auto& in = interner();
    std::string key(name);
    {
        std::shared_lock lock(in.mu);
        if (auto it = in.ids.find(key); it != in.ids.end()) return it->second;
    }
    std::unique_lock lock(in.mu);
    if (auto it = in.ids.find(key); it != in.ids.end()) return it->second;
    auto id = static_cast<LetterId>(in.names.size());
    in.names.push_back(key);
    in.ids.emplace(std::move(key), id);
    return id;
}

const std::string& letter_name(LetterId id) {
    auto& in = interner();
    std::shared_lock lock(in.mu);
    return in.names.at(id);
}

Symbol Symbol::base(std::string_view letter) {
    if (letter == kPadName) throw std::invalid_argument("pad is not a base letter");
    return Symbol{{intern(letter)}, false};
}

bool Symbol::all_pad() const {
    for (auto e : entries)
        if (e != kPad) return false;
    return true;
}

std::string Symbol::str() const {
    if (!tuple) return letter_name(entries.front());
    std::string s = "(";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) s += ',';
        s += letter_name(entries[i]);
    }
    return s + ")";
}

std::size_t SymbolHash::operator()(const Symbol& s) const noexcept {
    std::size_t h = s.tuple ? 0x9e3779b97f4a7c15ULL : 0;
    for (auto e : s.entries) h = (h ^ e) * 0x100000001b3ULL + (h >> 29);
    return h;
}

std::string word_str(const Word& w, std::string_view sep) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += sep;
        s += w[i].str();
    }
    return s;
}

Word parse_base_word(std::string_view text, const std::vector<std::string>& letters) {
    Word w;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t best = 0;
        const std::string* hit = nullptr;
        for (const auto& l : letters) {
            if (l.size() > best && text.substr(pos, l.size()) == l) {
                best = l.size();
                hit = &l;
            }
        }
        if (!hit) throw std::invalid_argument("unknown letter at position " + std::to_string(pos) + " in '" + std::string(text) + "'");
        w.push_back(Symbol::base(*hit));
        pos += best;
    }
    return w;
}

Word chars_word(std::string_view text) {
    Word w;
    for (char c : text) w.push_back(Symbol::base(std::string(1, c)));
    return w;
}

}  // namespace autostruct
