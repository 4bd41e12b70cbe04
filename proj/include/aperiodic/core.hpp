#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "aperiodic/errors.hpp"
#include "aperiodic/quadratic.hpp"

// Configurations on Z, finite windows, patches, and local excitations.
// Everything here is an immutable value; operations are pure functions.

namespace aperiodic {

struct Symbol {
    std::uint8_t id = 0;
    friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

namespace detail {

// Thue-Morse letter: parity of the binary digit sum for i >= 0, reflected
// through X(i) = X(-i-1) for i < 0.  id 0 is '+', id 1 is '-'.
inline Symbol thue_morse_at(std::int64_t i) {
    std::uint64_t n = i >= 0 ? static_cast<std::uint64_t>(i)
                             : static_cast<std::uint64_t>(-i - 1);
    return Symbol{static_cast<std::uint8_t>(std::popcount(n) & 1)};
}

inline std::int64_t floor_mod(std::int64_t i, std::int64_t p) {
    std::int64_t r = i % p;
    return r < 0 ? r + p : r;
}

} // namespace detail

class Window {
public:
    Window() = default;
    Window(std::int64_t start, std::vector<Symbol> symbols)
        : start_(start), symbols_(std::move(symbols)) {}

    std::int64_t start() const { return start_; }
    std::int64_t length() const { return static_cast<std::int64_t>(symbols_.size()); }
    std::int64_t end() const { return start_ + length(); } // one past the last site

    bool contains(std::int64_t site) const { return site >= start_ && site < end(); }

    Symbol at(std::int64_t site) const {
        if (!contains(site)) throw contract_error("window access out of range");
        return symbols_[static_cast<std::size_t>(site - start_)];
    }

    const std::vector<Symbol>& symbols() const { return symbols_; }

    friend bool operator==(const Window&, const Window&) = default;

private:
    std::int64_t start_ = 0;
    std::vector<Symbol> symbols_;
};

struct PatchCell {
    std::int64_t offset = 0;
    Symbol symbol{};
    friend auto operator<=>(const PatchCell&, const PatchCell&) = default;
};

// Finite set of (offset, symbol) constraints; offsets are distinct and
// normalized so the smallest is 0.  Offsets need not be contiguous (four-spin
// terms use gaps).
class Patch {
public:
    explicit Patch(std::vector<PatchCell> cells) : cells_(std::move(cells)) {
        if (cells_.empty()) throw domain_error("patch must be non-empty");
        std::sort(cells_.begin(), cells_.end());
        std::int64_t lo = cells_.front().offset;
        for (auto& cell : cells_) cell.offset -= lo;
        for (std::size_t i = 1; i < cells_.size(); ++i)
            if (cells_[i].offset == cells_[i - 1].offset)
                throw domain_error("patch offsets must be distinct");
    }

    const std::vector<PatchCell>& cells() const { return cells_; }
    std::int64_t diameter() const { return cells_.back().offset; }
    std::size_t size() const { return cells_.size(); }

    bool matches(const Window& w, std::int64_t at) const {
        for (const auto& cell : cells_)
            if (w.at(at + cell.offset) != cell.symbol) return false;
        return true;
    }

    friend bool operator==(const Patch&, const Patch&) = default;

private:
    std::vector<PatchCell> cells_;
};

inline Patch make_patch(std::initializer_list<std::pair<std::int64_t, int>> cells) {
    std::vector<PatchCell> v;
    for (auto [o, s] : cells) v.push_back({o, Symbol{static_cast<std::uint8_t>(s)}});
    return Patch(std::move(v));
}

// A total, deterministic rule assigning a symbol to every site of Z.
class ConfigurationSource {
public:
    enum class Kind { ThueMorse, Sturmian, Periodic, Explicit };

    static ConfigurationSource thue_morse() {
        ConfigurationSource s;
        s.kind_ = Kind::ThueMorse;
        s.alphabet_ = 2;
        return s;
    }

    static ConfigurationSource sturmian(RotationNumber phi) {
        ConfigurationSource s;
        s.kind_ = Kind::Sturmian;
        s.alphabet_ = 2;
        s.phi_ = std::move(phi);
        return s;
    }

    static ConfigurationSource periodic(std::vector<Symbol> word, std::size_t alphabet) {
        if (word.empty()) throw domain_error("periodic word must have period >= 1");
        ConfigurationSource s;
        s.kind_ = Kind::Periodic;
        s.alphabet_ = alphabet;
        s.word_ = std::move(word);
        s.validate_symbols(s.word_);
        return s;
    }

    static ConfigurationSource explicit_window(Window window, Symbol fill,
                                               std::size_t alphabet) {
        ConfigurationSource s;
        s.kind_ = Kind::Explicit;
        s.alphabet_ = alphabet;
        s.window_ = std::move(window);
        s.fill_ = fill;
        s.validate_symbols(s.window_.symbols());
        if (fill.id >= alphabet) throw domain_error("fill symbol outside alphabet");
        return s;
    }

    Kind kind() const { return kind_; }
    std::size_t alphabet_size() const { return alphabet_; }
    const RotationNumber& rotation() const {
        if (kind_ != Kind::Sturmian) throw contract_error("not a Sturmian source");
        return *phi_;
    }

    Symbol at(std::int64_t i) const {
        switch (kind_) {
        case Kind::ThueMorse:
            return detail::thue_morse_at(i);
        case Kind::Sturmian:
            return Symbol{static_cast<std::uint8_t>(sturmian_is_one(*phi_, i) ? 1 : 0)};
        case Kind::Periodic:
            return word_[static_cast<std::size_t>(
                detail::floor_mod(i, static_cast<std::int64_t>(word_.size())))];
        case Kind::Explicit:
            return window_.contains(i) ? window_.at(i) : fill_;
        }
        throw contract_error("unreachable");
    }

    Window window(std::int64_t start, std::int64_t len) const {
        if (len < 0) throw domain_error("window length must be >= 0");
        std::vector<Symbol> out;
        out.reserve(static_cast<std::size_t>(len));
        if (kind_ == Kind::Sturmian && len > 0) {
            RotationOrbit orbit(*phi_, start);
            for (std::int64_t k = 0; k < len; ++k) {
                out.push_back(Symbol{static_cast<std::uint8_t>(orbit.in_base_interval() ? 0 : 1)});
                orbit.step();
            }
        } else {
            for (std::int64_t k = 0; k < len; ++k) out.push_back(at(start + k));
        }
        return Window(start, std::move(out));
    }

private:
    void validate_symbols(const std::vector<Symbol>& v) const {
        for (Symbol s : v)
            if (s.id >= alphabet_) throw domain_error("symbol outside alphabet");
    }

    Kind kind_ = Kind::ThueMorse;
    std::size_t alphabet_ = 2;
    std::optional<RotationNumber> phi_;
    std::vector<Symbol> word_;
    Window window_;
    Symbol fill_{};
};

inline Window window_of(const ConfigurationSource& source, std::int64_t start,
                        std::int64_t len) {
    return source.window(start, len);
}

// Occurrences of the patch fully contained in the window (no wrap, no
// partial matches).
inline std::int64_t count_patch(const Window& w, const Patch& patch) {
    std::int64_t diam = patch.diameter();
    if (w.length() < diam + 1) return 0;
    std::int64_t count = 0;
    for (std::int64_t t = w.start(); t + diam < w.end(); ++t)
        if (patch.matches(w, t)) ++count;
    return count;
}

// A configuration differing from its base at finitely many sites.
class Excitation {
public:
    Excitation(ConfigurationSource base, std::map<std::int64_t, Symbol> overrides)
        : base_(std::move(base)), overrides_(std::move(overrides)) {}

    const ConfigurationSource& base() const { return base_; }
    const std::map<std::int64_t, Symbol>& overrides() const { return overrides_; }
    bool empty() const { return overrides_.empty(); }

    Symbol at(std::int64_t i) const {
        auto it = overrides_.find(i);
        return it != overrides_.end() ? it->second : base_.at(i);
    }

    Window window(std::int64_t start, std::int64_t len) const {
        Window w = base_.window(start, len);
        if (overrides_.empty()) return w;
        std::vector<Symbol> symbols = w.symbols();
        for (auto it = overrides_.lower_bound(start); it != overrides_.end(); ++it) {
            if (it->first >= start + len) break;
            symbols[static_cast<std::size_t>(it->first - start)] = it->second;
        }
        return Window(start, std::move(symbols));
    }

private:
    ConfigurationSource base_;
    std::map<std::int64_t, Symbol> overrides_;
};

// Builds a local excitation, dropping overrides that equal the base value.
inline Excitation apply_excitation(ConfigurationSource base,
                                   const std::map<std::int64_t, Symbol>& overrides) {
    std::map<std::int64_t, Symbol> kept;
    for (const auto& [site, sym] : overrides) {
        if (sym.id >= base.alphabet_size())
            throw domain_error("override symbol outside alphabet");
        if (base.at(site) != sym) kept.emplace(site, sym);
    }
    return Excitation(std::move(base), std::move(kept));
}

// Exact difference of patch occurrence counts, excitation minus base.  Only
// placements meeting the overrides can differ, so a scan of the overrides'
// margin-neighborhood is exact for any margin >= diameter(patch).
inline std::int64_t diff_count(const Excitation& e, const Patch& patch,
                               std::int64_t margin) {
    if (margin < patch.diameter())
        throw contract_error("diff_count margin must be >= patch diameter");
    if (e.empty()) return 0;
    std::int64_t lo = e.overrides().begin()->first - margin;
    std::int64_t hi = e.overrides().rbegin()->first + margin;
    Window wy = e.window(lo, hi - lo + 1);
    Window wx = e.base().window(lo, hi - lo + 1);
    return count_patch(wy, patch) - count_patch(wx, patch);
}

} // namespace aperiodic
