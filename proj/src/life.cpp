#include "forkbench/life.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstring>
#include <functional>
#include <optional>
#include <span>
#include <memory>
#include <random>
#include <sstream>

#include "forkbench/detail/overloaded.hpp"
#include "forkbench/error.hpp"
#include "forkbench/work_sharing.hpp"

namespace forkbench {

using detail::Overloaded;

std::string_view to_string(Boundary boundary) noexcept {
  return boundary == Boundary::Dead ? "dead" : "toroidal";
}

Boundary parse_boundary(std::string_view text) {
  if (text == "dead") return Boundary::Dead;
  if (text == "toroidal" || text == "torus") return Boundary::Toroidal;
  throw ParseError("unknown boundary '" + std::string(text) + "' (expected dead|toroidal)");
}

Grid::Grid(std::size_t width, std::size_t height, Boundary boundary)
    : width_(width), height_(height), boundary_(boundary), cells_(width * height, 0) {
  if (width == 0 || height == 0) throw ContractError("grid dimensions must be positive");
}

std::size_t Grid::population() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

int Grid::live_neighbors(std::size_t row, std::size_t col) const {
  int count = 0;
  const auto h = static_cast<std::ptrdiff_t>(height_);
  const auto w = static_cast<std::ptrdiff_t>(width_);
  for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
    for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      std::ptrdiff_t r = static_cast<std::ptrdiff_t>(row) + dr;
      std::ptrdiff_t c = static_cast<std::ptrdiff_t>(col) + dc;
      if (boundary_ == Boundary::Toroidal) {
        r = (r + h) % h;
        c = (c + w) % w;
      } else if (r < 0 || r >= h || c < 0 || c >= w) {
        continue;
      }
      count += cells_[static_cast<std::size_t>(r * w + c)];
    }
  }
  return count;
}

namespace {

constexpr std::uint8_t next_state(std::uint8_t alive, int neighbors) noexcept {
  return (neighbors == 3 || (alive != 0 && neighbors == 2)) ? 1 : 0;
}

std::size_t parse_dimension(std::string_view token) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || value == 0) {
    throw ParseError("invalid grid dimension '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

Grid Grid::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string header;
  if (!std::getline(in, header)) throw ParseError("grid: missing header line");
  std::istringstream fields(header);
  std::string w, h, b, extra;
  if (!(fields >> w >> h >> b) || (fields >> extra)) {
    throw ParseError("grid: header must be `width height boundary`");
  }
  Grid grid(parse_dimension(w), parse_dimension(h), parse_boundary(b));
  std::string line;
  for (std::size_t row = 0; row < grid.height(); ++row) {
    if (!std::getline(in, line)) throw ParseError("grid: expected " + std::to_string(grid.height()) + " rows");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() != grid.width()) {
      throw ParseError("grid: row " + std::to_string(row) + " has " + std::to_string(line.size()) +
                       " cells, expected " + std::to_string(grid.width()));
    }
    for (std::size_t col = 0; col < line.size(); ++col) {
      if (line[col] == '#') grid.set(row, col, true);
      else if (line[col] != '.') throw ParseError("grid: unexpected character in row " + std::to_string(row));
    }
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) throw ParseError("grid: trailing content");
  }
  return grid;
}

std::string Grid::to_text() const {
  std::string out = std::to_string(width_) + " " + std::to_string(height_) + " " +
                    std::string(to_string(boundary_)) + "\n";
  for (std::size_t row = 0; row < height_; ++row) {
    for (std::size_t col = 0; col < width_; ++col) out.push_back(alive(row, col) ? '#' : '.');
    out.push_back('\n');
  }
  return out;
}

Grid Grid::random(std::size_t width, std::size_t height, Boundary boundary, std::uint64_t seed) {
  Grid grid(width, height, boundary);
  std::mt19937_64 rng(seed);
  for (auto& cell : grid.cells_) cell = static_cast<std::uint8_t>(rng() >> 63);
  return grid;
}

Block2D square_layout(std::size_t parts) {
  if (parts == 0) throw ContractError("layout needs at least one part");
  std::size_t rows = 1;
  for (std::size_t r = 1; r * r <= parts; ++r) {
    if (parts % r == 0) rows = r;
  }
  return {rows, parts / rows};
}

Block2D block_layout(const Decomposition& decomp, std::size_t parts) {
  if (parts == 0) throw ContractError("layout needs at least one part");
  return std::visit(Overloaded{
                        [&](const RowBlock&) { return Block2D{parts, 1}; },
                        [&](const ColBlock&) { return Block2D{1, parts}; },
                        [&](const Block2D& b) {
                          if (b.rows == 0 || b.cols == 0) return square_layout(parts);
                          if (b.rows * b.cols != parts) {
                            throw ContractError("Block2D " + std::to_string(b.rows) + "x" +
                                                std::to_string(b.cols) + " does not match " +
                                                std::to_string(parts) + " workers");
                          }
                          return b;
                        },
                    },
                    decomp);
}

Decomposition parse_decomposition(std::string_view text) {
  if (text == "row" || text == "rows" || text == "rowblock") return RowBlock{};
  if (text == "col" || text == "cols" || text == "colblock") return ColBlock{};
  if (text == "block2d") return Block2D{0, 0};
  if (text.starts_with("block2d:")) {
    const auto dims = text.substr(8);
    const auto x = dims.find('x');
    if (x == std::string_view::npos) throw ParseError("decomposition: expected block2d:RxC");
    return Block2D{parse_dimension(dims.substr(0, x)), parse_dimension(dims.substr(x + 1))};
  }
  throw ParseError("unknown decomposition '" + std::string(text) + "' (expected row|col|block2d[:RxC])");
}

std::string to_string(const Decomposition& decomp) {
  return std::visit(Overloaded{
                        [](const RowBlock&) { return std::string("row"); },
                        [](const ColBlock&) { return std::string("col"); },
                        [](const Block2D& b) {
                          if (b.rows == 0 || b.cols == 0) return std::string("block2d");
                          return "block2d:" + std::to_string(b.rows) + "x" + std::to_string(b.cols);
                        },
                    },
                    decomp);
}

Grid life_step_serial(const Grid& grid) {
  Grid next(grid.width(), grid.height(), grid.boundary());
  for (std::size_t row = 0; row < grid.height(); ++row) {
    for (std::size_t col = 0; col < grid.width(); ++col) {
      next.cells()[row * grid.width() + col] =
          next_state(grid.cells()[row * grid.width() + col], grid.live_neighbors(row, col));
    }
  }
  return next;
}

namespace {

IterationRange split(std::size_t extent, std::size_t parts, std::size_t index) {
  return {index * extent / parts, (index + 1) * extent / parts};
}

Grid life_work_share(const Grid& grid, std::size_t steps, const Decomposition& decomp,
                     const SchedulePolicy& policy, ExecContext& ctx) {
  Team& team = ctx.team();
  const SchedulePolicy resolved = resolve_policy(policy, team);
  const std::size_t width = grid.width();

  // Iteration units: single rows, single columns, or the tiles of a 2-D layout.
  std::size_t units = 0;
  std::function<void(std::size_t, IterationRange&, IterationRange&)> unit_area;
  if (std::holds_alternative<RowBlock>(decomp)) {
    units = grid.height();
    unit_area = [&](std::size_t u, IterationRange& rows, IterationRange& cols) {
      rows = {u, u + 1};
      cols = {0, width};
    };
  } else if (std::holds_alternative<ColBlock>(decomp)) {
    units = width;
    unit_area = [&](std::size_t u, IterationRange& rows, IterationRange& cols) {
      rows = {0, grid.height()};
      cols = {u, u + 1};
    };
  } else {
    const Block2D layout = block_layout(decomp, team.size());
    units = layout.rows * layout.cols;
    unit_area = [&grid, layout](std::size_t u, IterationRange& rows, IterationRange& cols) {
      rows = split(grid.height(), layout.rows, u / layout.cols);
      cols = split(grid.width(), layout.cols, u % layout.cols);
    };
  }

  std::array<Grid, 2> buffers{grid, grid};
  std::vector<std::unique_ptr<ChunkSource>> sources;
  sources.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    sources.push_back(std::make_unique<ChunkSource>(resolved, units, team.size()));
  }

  team.fork([&](std::size_t worker) {
    for (std::size_t s = 0; s < steps; ++s) {
      const Grid& current = buffers[s % 2];
      Grid& next = buffers[(s + 1) % 2];
      worksharing_for(team, worker, *sources[s], [&](std::size_t u) {
        IterationRange rows;
        IterationRange cols;
        unit_area(u, rows, cols);
        for (std::size_t r = rows.start; r < rows.end; ++r) {
          for (std::size_t c = cols.start; c < cols.end; ++c) {
            next.cells()[r * width + c] =
                next_state(current.cells()[r * width + c], current.live_neighbors(r, c));
          }
        }
      });
    }
  });
  return std::move(buffers[steps % 2]);
}

// One rank's block with a one-cell ghost ring.
class LocalBlock {
 public:
  LocalBlock(IterationRange rows, IterationRange cols)
      : rows_(rows), cols_(cols), stride_(cols.size() + 2),
        cells_((rows.size() + 2) * stride_, 0), scratch_(cells_.size(), 0) {}

  std::size_t height() const noexcept { return rows_.size(); }
  std::size_t width() const noexcept { return cols_.size(); }
  const IterationRange& rows() const noexcept { return rows_; }
  const IterationRange& cols() const noexcept { return cols_; }

  // (r, c) in padded coordinates: interior is [1, height] x [1, width].
  std::uint8_t& at(std::size_t r, std::size_t c) { return cells_[r * stride_ + c]; }
  std::uint8_t at(std::size_t r, std::size_t c) const { return cells_[r * stride_ + c]; }

  void clear_ghosts() {
    for (std::size_t c = 0; c < stride_; ++c) {
      at(0, c) = 0;
      at(height() + 1, c) = 0;
    }
    for (std::size_t r = 0; r < height() + 2; ++r) {
      at(r, 0) = 0;
      at(r, width() + 1) = 0;
    }
  }

  void step() {
    for (std::size_t r = 1; r <= height(); ++r) {
      for (std::size_t c = 1; c <= width(); ++c) {
        int n = 0;
        for (std::size_t rr = r - 1; rr <= r + 1; ++rr) {
          for (std::size_t cc = c - 1; cc <= c + 1; ++cc) n += at(rr, cc);
        }
        n -= at(r, c);
        scratch_[r * stride_ + c] = next_state(at(r, c), n);
      }
    }
    std::swap(cells_, scratch_);
  }

 private:
  IterationRange rows_;
  IterationRange cols_;
  std::size_t stride_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::uint8_t> scratch_;
};

struct Direction {
  int dr;
  int dc;
};

constexpr std::array<Direction, 8> kDirections{{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
}};

constexpr int direction_tag(int dr, int dc) {
  for (int d = 0; d < 8; ++d) {
    if (kDirections[static_cast<std::size_t>(d)].dr == dr &&
        kDirections[static_cast<std::size_t>(d)].dc == dc) {
      return d;
    }
  }
  return -1;
}

constexpr int kGatherTag = 8;

template <class F>
Grid run_ranks_life(ExecContext& ctx, F&& rank_body) {
  auto results = ctx.team().fork_collect(
      [&](std::size_t rank) { return rank_body(ctx.comm().endpoint(rank)); });
  return std::move(*results.front());
}

// Padded-coordinate span covering the cells a neighbour in direction d needs
// from this block (send = true), or the ghost cells it fills here (send = false).
void edge_span(const LocalBlock& block, Direction d, bool send, IterationRange& rows,
               IterationRange& cols) {
  const std::size_t h = block.height();
  const std::size_t w = block.width();
  auto axis = [send](int delta, std::size_t extent) -> IterationRange {
    if (delta == 0) return {1, extent + 1};
    if (delta < 0) return send ? IterationRange{1, 2} : IterationRange{0, 1};
    return send ? IterationRange{extent, extent + 1} : IterationRange{extent + 1, extent + 2};
  };
  rows = axis(d.dr, h);
  cols = axis(d.dc, w);
}

Grid life_message_pass(const Grid& grid, std::size_t steps, const Decomposition& decomp,
                       ExecContext& ctx) {
  const std::size_t p = ctx.parallelism();
  const Block2D layout = block_layout(decomp, p);
  if (layout.rows > grid.height() || layout.cols > grid.width()) {
    throw ContractError("decomposition " + std::to_string(layout.rows) + "x" +
                        std::to_string(layout.cols) + " leaves empty blocks on a " +
                        std::to_string(grid.height()) + "x" + std::to_string(grid.width()) + " grid");
  }
  const bool toroidal = grid.boundary() == Boundary::Toroidal;

  return run_ranks_life(ctx, [&](Endpoint& ep) -> std::optional<Grid> {
    const auto bi = static_cast<std::ptrdiff_t>(ep.rank() / layout.cols);
    const auto bj = static_cast<std::ptrdiff_t>(ep.rank() % layout.cols);
    const auto pr = static_cast<std::ptrdiff_t>(layout.rows);
    const auto pc = static_cast<std::ptrdiff_t>(layout.cols);

    auto neighbor = [&](Direction d) -> std::optional<std::size_t> {
      std::ptrdiff_t r = bi + d.dr;
      std::ptrdiff_t c = bj + d.dc;
      if (toroidal) {
        r = (r + pr) % pr;
        c = (c + pc) % pc;
      } else if (r < 0 || r >= pr || c < 0 || c >= pc) {
        return std::nullopt;
      }
      return static_cast<std::size_t>(r * pc + c);
    };

    LocalBlock block(split(grid.height(), layout.rows, static_cast<std::size_t>(bi)),
                     split(grid.width(), layout.cols, static_cast<std::size_t>(bj)));
    for (std::size_t r = 0; r < block.height(); ++r) {
      for (std::size_t c = 0; c < block.width(); ++c) {
        block.at(r + 1, c + 1) = grid.alive(block.rows().start + r, block.cols().start + c) ? 1 : 0;
      }
    }

    std::vector<std::uint8_t> buffer;
    for (std::size_t s = 0; s < steps; ++s) {
      block.clear_ghosts();
      for (const Direction d : kDirections) {
        const auto dest = neighbor(d);
        if (!dest) continue;
        IterationRange rows;
        IterationRange cols;
        edge_span(block, d, true, rows, cols);
        buffer.clear();
        for (std::size_t r = rows.start; r < rows.end; ++r) {
          for (std::size_t c = cols.start; c < cols.end; ++c) buffer.push_back(block.at(r, c));
        }
        ep.send(*dest, direction_tag(d.dr, d.dc), std::as_bytes(std::span(buffer)));
      }
      for (const Direction d : kDirections) {
        const auto src = neighbor(d);
        if (!src) continue;
        // The neighbour in direction d sent its edge facing us, i.e. toward -d.
        const Bytes payload = ep.recv(*src, direction_tag(-d.dr, -d.dc));
        IterationRange rows;
        IterationRange cols;
        edge_span(block, d, false, rows, cols);
        if (payload.size() != rows.size() * cols.size()) {
          throw Error("life: ghost payload size mismatch");
        }
        std::size_t k = 0;
        for (std::size_t r = rows.start; r < rows.end; ++r) {
          for (std::size_t c = cols.start; c < cols.end; ++c) {
            block.at(r, c) = static_cast<std::uint8_t>(payload[k++]);
          }
        }
      }
      block.step();
    }

    auto interior = [&] {
      std::vector<std::uint8_t> cells;
      cells.reserve(block.height() * block.width());
      for (std::size_t r = 1; r <= block.height(); ++r) {
        for (std::size_t c = 1; c <= block.width(); ++c) cells.push_back(block.at(r, c));
      }
      return cells;
    };

    if (ep.rank() != 0) {
      const auto cells = interior();
      ep.send(0, kGatherTag, std::as_bytes(std::span(cells)));
      return std::nullopt;
    }
    Grid out(grid.width(), grid.height(), grid.boundary());
    auto place = [&](std::size_t rank, std::span<const std::uint8_t> cells) {
      const IterationRange rows = split(grid.height(), layout.rows, rank / layout.cols);
      const IterationRange cols = split(grid.width(), layout.cols, rank % layout.cols);
      if (cells.size() != rows.size() * cols.size()) throw Error("life: gathered block size mismatch");
      std::size_t k = 0;
      for (std::size_t r = rows.start; r < rows.end; ++r) {
        for (std::size_t c = cols.start; c < cols.end; ++c) out.set(r, c, cells[k++] != 0);
      }
    };
    const auto own = interior();
    place(0, own);
    for (std::size_t r = 1; r < p; ++r) {
      const Bytes payload = ep.recv(r, kGatherTag);
      std::vector<std::uint8_t> cells(payload.size());
      std::memcpy(cells.data(), payload.data(), payload.size());
      place(r, cells);
    }
    return out;
  });
}

}  // namespace

Grid life_run(const Grid& grid, std::size_t steps, const Decomposition& decomp,
              const ExecModel& model, ExecContext& ctx) {
  return std::visit(Overloaded{
                        [&](const Serial&) {
                          Grid current = grid;
                          for (std::size_t s = 0; s < steps; ++s) current = life_step_serial(current);
                          return current;
                        },
                        [&](const WorkShare& ws) {
                          return life_work_share(grid, steps, decomp, ws.policy, ctx);
                        },
                        [&](const MessagePass&) { return life_message_pass(grid, steps, decomp, ctx); },
                    },
                    model);
}

Grid life_run(const Grid& grid, std::size_t steps, const Decomposition& decomp,
              const ExecModel& model, std::size_t parallelism) {
  ExecContext ctx(std::holds_alternative<Serial>(model) ? 1 : parallelism);
  return life_run(grid, steps, decomp, model, ctx);
}

}  // namespace forkbench
