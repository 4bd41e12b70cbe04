#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "aperiodic/core.hpp"
#include "aperiodic/errors.hpp"

// Textual aliases for symbols live here, at the boundary: the library proper
// works on symbol indices only.  Thue-Morse renders as "+-", everything else
// as "0123456789".

namespace aperiodic {

inline std::string default_glyphs(const ConfigurationSource& source) {
    if (source.kind() == ConfigurationSource::Kind::ThueMorse) return "+-";
    std::string g = "0123456789";
    return g.substr(0, source.alphabet_size());
}

inline Symbol symbol_from_glyph(char ch, std::string_view glyphs) {
    auto pos = glyphs.find(ch);
    if (pos == std::string_view::npos)
        throw parse_error(std::string("unknown symbol glyph '") + ch + "'");
    return Symbol{static_cast<std::uint8_t>(pos)};
}

inline char glyph_of(Symbol s, std::string_view glyphs) {
    if (s.id >= glyphs.size()) throw contract_error("symbol without a glyph");
    return glyphs[s.id];
}

inline std::string to_string(const Window& w, std::string_view glyphs) {
    std::string out;
    out.reserve(static_cast<std::size_t>(w.length()));
    for (Symbol s : w.symbols()) out += glyph_of(s, glyphs);
    return out;
}

inline std::vector<Symbol> parse_word(std::string_view text, std::string_view glyphs) {
    std::vector<Symbol> out;
    for (char ch : text) out.push_back(symbol_from_glyph(ch, glyphs));
    return out;
}

// Patch grammar: one glyph per offset, '.' for an unconstrained offset.
// "++" is {(0,+),(1,+)}; "1.1" is {(0,1),(2,1)}.
inline Patch parse_patch(std::string_view text, std::string_view glyphs) {
    std::vector<PatchCell> cells;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '.') continue;
        cells.push_back({static_cast<std::int64_t>(i), symbol_from_glyph(text[i], glyphs)});
    }
    if (cells.empty()) throw parse_error("patch '" + std::string(text) + "' has no constraints");
    return Patch(std::move(cells));
}

inline std::string patch_to_string(const Patch& patch, std::string_view glyphs) {
    std::string out(static_cast<std::size_t>(patch.diameter()) + 1, '.');
    for (const auto& cell : patch.cells())
        out[static_cast<std::size_t>(cell.offset)] = glyph_of(cell.symbol, glyphs);
    return out;
}

// Override grammar: "site:glyph,site:glyph", e.g. "0:-,5:+".
inline std::map<std::int64_t, Symbol> parse_overrides(std::string_view text,
                                                      std::string_view glyphs) {
    std::map<std::int64_t, Symbol> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string_view item = text.substr(pos, comma == std::string_view::npos
                                                     ? std::string_view::npos
                                                     : comma - pos);
        std::size_t colon = item.find(':');
        if (colon == std::string_view::npos || colon + 2 != item.size())
            throw parse_error("bad override '" + std::string(item) +
                              "'; expected site:glyph");
        std::int64_t site = 0;
        try {
            site = std::stoll(std::string(item.substr(0, colon)));
        } catch (const std::exception&) {
            throw parse_error("bad override site in '" + std::string(item) + "'");
        }
        out[site] = symbol_from_glyph(item[colon + 1], glyphs);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw parse_error("empty override list");
    return out;
}

} // namespace aperiodic
