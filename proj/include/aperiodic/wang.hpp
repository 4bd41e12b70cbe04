#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aperiodic/errors.hpp"

// Generic Wang-tile engine: tileset files, matching-rule verification as a
// lattice-gas energy, backtracking region completion, and 2D patch census.
// Tiles are unit squares with colored edges; adjacent edges must match.

namespace aperiodic {

struct WangTile {
    int id = 0;
    int north = 0, east = 0, south = 0, west = 0;
};

class Tileset {
public:
    explicit Tileset(std::vector<WangTile> tiles) : tiles_(std::move(tiles)) {
        if (tiles_.empty()) throw domain_error("tileset must be non-empty");
        for (std::size_t i = 0; i < tiles_.size(); ++i) {
            const auto& t = tiles_[i];
            if (t.id < 0 || t.north < 0 || t.east < 0 || t.south < 0 || t.west < 0)
                throw domain_error("tile ids and colors must be non-negative");
            if (!index_.emplace(t.id, i).second)
                throw domain_error("duplicate tile id " + std::to_string(t.id));
        }
    }

    const std::vector<WangTile>& tiles() const { return tiles_; }

    const WangTile& tile(int id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            throw domain_error("unknown tile id " + std::to_string(id));
        return tiles_[it->second];
    }

    bool has(int id) const { return index_.count(id) != 0; }

private:
    std::vector<WangTile> tiles_;
    std::map<int, std::size_t> index_;
};

// Format: lines "T <id> <north> <east> <south> <west>"; '#' starts a comment.
inline Tileset load_tileset(std::string_view text) {
    std::vector<WangTile> tiles;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    std::map<int, int> seen; // id -> first line
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        auto hash = sv.find('#');
        if (hash != std::string_view::npos) sv = sv.substr(0, hash);
        std::istringstream ls{std::string(sv)};
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag != "T")
            throw parse_error("tileset line " + std::to_string(lineno) +
                              ": expected 'T <id> <n> <e> <s> <w>'");
        WangTile t;
        if (!(ls >> t.id >> t.north >> t.east >> t.south >> t.west))
            throw parse_error("tileset line " + std::to_string(lineno) +
                              ": malformed tile definition");
        std::string extra;
        if (ls >> extra)
            throw parse_error("tileset line " + std::to_string(lineno) +
                              ": trailing fields");
        auto [it, fresh] = seen.emplace(t.id, lineno);
        if (!fresh)
            throw parse_error("tileset line " + std::to_string(lineno) +
                              ": duplicate tile id " + std::to_string(t.id) +
                              " (first defined on line " + std::to_string(it->second) + ")");
        tiles.push_back(t);
    }
    if (tiles.empty()) throw parse_error("tileset file defines no tiles");
    return Tileset(std::move(tiles));
}

inline std::string serialize_tileset(const Tileset& ts) {
    std::string out;
    for (const auto& t : ts.tiles()) {
        out += "T " + std::to_string(t.id) + " " + std::to_string(t.north) + " " +
               std::to_string(t.east) + " " + std::to_string(t.south) + " " +
               std::to_string(t.west) + "\n";
    }
    return out;
}

struct GridRegion {
    std::int64_t x0 = 0, y0 = 0;
    std::int64_t width = 0, height = 0;

    std::int64_t cells() const { return width * height; }
    bool contains(std::int64_t x, std::int64_t y) const {
        return x >= x0 && x < x0 + width && y >= y0 && y < y0 + height;
    }
    friend bool operator==(const GridRegion&, const GridRegion&) = default;
};

// Rectangular assignment of tile ids; kHole marks an unassigned cell.
class TilingGrid {
public:
    static constexpr int kHole = -1;

    explicit TilingGrid(GridRegion region)
        : region_(region),
          cells_(static_cast<std::size_t>(region.cells()), kHole) {
        if (region.width < 1 || region.height < 1)
            throw domain_error("grid region must be non-empty");
    }

    const GridRegion& region() const { return region_; }

    int at(std::int64_t x, std::int64_t y) const { return cells_[index(x, y)]; }
    void set(std::int64_t x, std::int64_t y, int id) { cells_[index(x, y)] = id; }

    bool fully_assigned() const {
        return std::find(cells_.begin(), cells_.end(), kHole) == cells_.end();
    }

    std::int64_t hole_count() const {
        return std::count(cells_.begin(), cells_.end(), kHole);
    }

    friend bool operator==(const TilingGrid&, const TilingGrid&) = default;

private:
    std::size_t index(std::int64_t x, std::int64_t y) const {
        if (!region_.contains(x, y)) throw contract_error("grid access out of region");
        return static_cast<std::size_t>((y - region_.y0) * region_.width + (x - region_.x0));
    }

    GridRegion region_;
    std::vector<int> cells_;
};

// Format: header "G <width> <height> <x0> <y0>", then height rows of width
// entries, tile ids or '.' for holes.  The first row is the northernmost
// (largest y); x grows left to right.
inline TilingGrid parse_grid(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    GridRegion region;
    bool have_header = false;
    std::vector<std::string> rows;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        auto hash = sv.find('#');
        if (hash != std::string_view::npos) sv = sv.substr(0, hash);
        std::string body(sv);
        std::istringstream ls{body};
        if (!have_header) {
            std::string tag;
            if (!(ls >> tag)) continue;
            if (tag != "G")
                throw parse_error("grid line " + std::to_string(lineno) +
                                  ": expected header 'G <width> <height> <x0> <y0>'");
            if (!(ls >> region.width >> region.height >> region.x0 >> region.y0))
                throw parse_error("grid line " + std::to_string(lineno) +
                                  ": malformed header");
            have_header = true;
            continue;
        }
        std::string probe;
        if (ls >> probe) rows.push_back(body);
    }
    if (!have_header) throw parse_error("grid file missing 'G' header");
    if (static_cast<std::int64_t>(rows.size()) != region.height)
        throw parse_error("grid file has " + std::to_string(rows.size()) + " rows, header says " +
                          std::to_string(region.height));
    TilingGrid grid(region);
    for (std::int64_t r = 0; r < region.height; ++r) {
        std::istringstream ls{rows[static_cast<std::size_t>(r)]};
        std::int64_t y = region.y0 + region.height - 1 - r;
        for (std::int64_t k = 0; k < region.width; ++k) {
            std::string cell;
            if (!(ls >> cell))
                throw parse_error("grid row for y=" + std::to_string(y) + " is too short");
            if (cell == ".") continue;
            try {
                grid.set(region.x0 + k, y, std::stoi(cell));
            } catch (const std::exception&) {
                throw parse_error("grid row for y=" + std::to_string(y) +
                                  ": bad cell '" + cell + "'");
            }
        }
        std::string extra;
        if (ls >> extra)
            throw parse_error("grid row for y=" + std::to_string(y) + " is too long");
    }
    return grid;
}

inline std::string serialize_grid(const TilingGrid& grid) {
    const auto& rg = grid.region();
    std::string out = "G " + std::to_string(rg.width) + " " + std::to_string(rg.height) +
                      " " + std::to_string(rg.x0) + " " + std::to_string(rg.y0) + "\n";
    for (std::int64_t r = 0; r < rg.height; ++r) {
        std::int64_t y = rg.y0 + rg.height - 1 - r;
        for (std::int64_t k = 0; k < rg.width; ++k) {
            int v = grid.at(rg.x0 + k, y);
            out += v == TilingGrid::kHole ? "." : std::to_string(v);
            out += k + 1 == rg.width ? '\n' : ' ';
        }
    }
    return out;
}

// An adjacent pair whose shared edge colors differ; (x1,y1) < (x2,y2).
struct BrokenBond {
    std::int64_t x1, y1, x2, y2;
    friend auto operator<=>(const BrokenBond&, const BrokenBond&) = default;
};

// Matching-rule energy: one broken bond per mismatched shared edge.
inline std::vector<BrokenBond> verify_tiling(const Tileset& ts, const TilingGrid& grid) {
    if (!grid.fully_assigned())
        throw contract_error("grid has holes; run complete_region first");
    std::vector<BrokenBond> broken;
    const auto& rg = grid.region();
    for (std::int64_t y = rg.y0; y < rg.y0 + rg.height; ++y) {
        for (std::int64_t x = rg.x0; x < rg.x0 + rg.width; ++x) {
            const WangTile& t = ts.tile(grid.at(x, y));
            if (x + 1 < rg.x0 + rg.width) {
                const WangTile& r = ts.tile(grid.at(x + 1, y));
                if (t.east != r.west) broken.push_back({x, y, x + 1, y});
            }
            if (y + 1 < rg.y0 + rg.height) {
                const WangTile& u = ts.tile(grid.at(x, y + 1));
                if (t.north != u.south) broken.push_back({x, y, x, y + 1});
            }
        }
    }
    return broken;
}

enum class CompletionStatus { Completed, Unsatisfiable };

struct CompletionResult {
    CompletionStatus status = CompletionStatus::Unsatisfiable;
    TilingGrid grid;
    std::uint64_t nodes = 0;
};

namespace detail {

inline bool tile_fits(const Tileset& ts, const TilingGrid& grid, std::int64_t x,
                      std::int64_t y, const WangTile& t) {
    const auto& rg = grid.region();
    auto assigned = [&](std::int64_t ax, std::int64_t ay) {
        return rg.contains(ax, ay) && grid.at(ax, ay) != TilingGrid::kHole;
    };
    if (assigned(x + 1, y) && t.east != ts.tile(grid.at(x + 1, y)).west) return false;
    if (assigned(x - 1, y) && t.west != ts.tile(grid.at(x - 1, y)).east) return false;
    if (assigned(x, y + 1) && t.north != ts.tile(grid.at(x, y + 1)).south) return false;
    if (assigned(x, y - 1) && t.south != ts.tile(grid.at(x, y - 1)).north) return false;
    return true;
}

inline bool complete_rec(const Tileset& ts, TilingGrid& grid, std::uint64_t& nodes) {
    // most-constrained cell first, deterministic scan order for ties
    const auto& rg = grid.region();
    std::int64_t bx = 0, by = 0;
    std::size_t best = ts.tiles().size() + 1;
    bool found = false;
    for (std::int64_t y = rg.y0; y < rg.y0 + rg.height && best > 0; ++y) {
        for (std::int64_t x = rg.x0; x < rg.x0 + rg.width && best > 0; ++x) {
            if (grid.at(x, y) != TilingGrid::kHole) continue;
            std::size_t fits = 0;
            for (const auto& t : ts.tiles())
                if (tile_fits(ts, grid, x, y, t)) ++fits;
            if (fits < best) {
                best = fits;
                bx = x;
                by = y;
                found = true;
            }
        }
    }
    if (!found) return true; // no holes left
    if (best == 0) return false;
    for (const auto& t : ts.tiles()) { // tiles tried in file order
        if (!tile_fits(ts, grid, bx, by, t)) continue;
        ++nodes;
        grid.set(bx, by, t.id);
        if (complete_rec(ts, grid, nodes)) return true;
        grid.set(bx, by, TilingGrid::kHole);
    }
    return false;
}

} // namespace detail

// Fills the holes with a zero-broken-bond extension of the partial
// assignment, or certifies that none exists by exhausting the search tree.
inline CompletionResult complete_region(const Tileset& ts, const TilingGrid& partial) {
    if (partial.region().cells() > 1000)
        throw budget_error("completion region exceeds the 10^3-cell backtracking budget");
    for (std::int64_t y = partial.region().y0;
         y < partial.region().y0 + partial.region().height; ++y)
        for (std::int64_t x = partial.region().x0;
             x < partial.region().x0 + partial.region().width; ++x)
            if (partial.at(x, y) != TilingGrid::kHole && !ts.has(partial.at(x, y)))
                throw domain_error("grid references a tile id missing from the tileset");
    // the given assignment must itself satisfy the matching rules
    CompletionResult res{CompletionStatus::Unsatisfiable, partial, 0};
    for (std::int64_t y = partial.region().y0;
         y < partial.region().y0 + partial.region().height; ++y)
        for (std::int64_t x = partial.region().x0;
             x < partial.region().x0 + partial.region().width; ++x)
            if (partial.at(x, y) != TilingGrid::kHole &&
                !detail::tile_fits(ts, partial, x, y, ts.tile(partial.at(x, y))))
                return res;
    TilingGrid work = partial;
    if (detail::complete_rec(ts, work, res.nodes)) {
        res.status = CompletionStatus::Completed;
        res.grid = work;
    }
    return res;
}

struct Patch2DCell {
    std::int64_t dx = 0, dy = 0;
    int tile_id = 0;
    friend auto operator<=>(const Patch2DCell&, const Patch2DCell&) = default;
};

// Finite set of (offset vector, tile) constraints, offsets normalized so the
// minimal dx and dy are both 0.
class Patch2D {
public:
    explicit Patch2D(std::vector<Patch2DCell> cells) : cells_(std::move(cells)) {
        if (cells_.empty()) throw domain_error("patch must be non-empty");
        std::int64_t mx = cells_.front().dx, my = cells_.front().dy;
        for (const auto& c : cells_) {
            mx = std::min(mx, c.dx);
            my = std::min(my, c.dy);
        }
        for (auto& c : cells_) {
            c.dx -= mx;
            c.dy -= my;
        }
        std::sort(cells_.begin(), cells_.end());
        for (std::size_t i = 1; i < cells_.size(); ++i)
            if (cells_[i].dx == cells_[i - 1].dx && cells_[i].dy == cells_[i - 1].dy)
                throw domain_error("patch offsets must be distinct");
    }

    const std::vector<Patch2DCell>& cells() const { return cells_; }

    std::int64_t width() const { // extent in x, inclusive of offset 0
        std::int64_t m = 0;
        for (const auto& c : cells_) m = std::max(m, c.dx);
        return m + 1;
    }
    std::int64_t height() const {
        std::int64_t m = 0;
        for (const auto& c : cells_) m = std::max(m, c.dy);
        return m + 1;
    }

private:
    std::vector<Patch2DCell> cells_;
};

// Fully-contained translates of the patch matching the grid.
inline std::int64_t count_patch_2d(const TilingGrid& grid, const Patch2D& patch) {
    if (!grid.fully_assigned())
        throw contract_error("grid has holes; patch census needs a full assignment");
    const auto& rg = grid.region();
    std::int64_t pw = patch.width(), ph = patch.height();
    if (pw > rg.width || ph > rg.height) return 0;
    std::int64_t count = 0;
    for (std::int64_t y = rg.y0; y + ph <= rg.y0 + rg.height; ++y) {
        for (std::int64_t x = rg.x0; x + pw <= rg.x0 + rg.width; ++x) {
            bool ok = true;
            for (const auto& c : patch.cells())
                if (grid.at(x + c.dx, y + c.dy) != c.tile_id) {
                    ok = false;
                    break;
                }
            if (ok) ++count;
        }
    }
    return count;
}

// Matching-rule energy plus per-tile chemical potentials: broken-bond count
// minus eps per occurrence of each favored tile.
inline double tiling_energy(const Tileset& ts, const TilingGrid& grid,
                            const std::map<int, double>& tile_chemical) {
    double e = static_cast<double>(verify_tiling(ts, grid).size());
    if (tile_chemical.empty()) return e;
    const auto& rg = grid.region();
    for (std::int64_t y = rg.y0; y < rg.y0 + rg.height; ++y)
        for (std::int64_t x = rg.x0; x < rg.x0 + rg.width; ++x) {
            auto it = tile_chemical.find(grid.at(x, y));
            if (it != tile_chemical.end()) e -= it->second;
        }
    return e;
}

} // namespace aperiodic
