#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "forkbench/kernels.hpp"

namespace forkbench {

enum class Boundary { Dead, Toroidal };

std::string_view to_string(Boundary boundary) noexcept;
Boundary parse_boundary(std::string_view text);

/// Game-of-life board, row-major, one byte per cell (0 dead, 1 alive).
class Grid {
 public:
  Grid(std::size_t width, std::size_t height, Boundary boundary = Boundary::Dead);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  Boundary boundary() const noexcept { return boundary_; }

  bool alive(std::size_t row, std::size_t col) const { return cells_[row * width_ + col] != 0; }
  void set(std::size_t row, std::size_t col, bool alive) { cells_[row * width_ + col] = alive ? 1 : 0; }

  std::vector<std::uint8_t>& cells() noexcept { return cells_; }
  const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }
  std::size_t population() const;

  /// Live neighbours of (row, col) under the grid's boundary rule.
  int live_neighbors(std::size_t row, std::size_t col) const;

  /// Text fixture format: `width height boundary`, then `height` lines of
  /// `.` (dead) and `#` (alive).
  static Grid parse(std::string_view text);
  std::string to_text() const;

  /// Cells alive with probability 1/2, from a 64-bit seed.
  static Grid random(std::size_t width, std::size_t height, Boundary boundary, std::uint64_t seed);

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  Boundary boundary_;
  std::vector<std::uint8_t> cells_;
};

struct RowBlock {};
struct ColBlock {};
struct Block2D {
  std::size_t rows = 1;
  std::size_t cols = 1;
};

using Decomposition = std::variant<RowBlock, ColBlock, Block2D>;

/// Block grid (rows x cols) a decomposition yields for `parts` workers.
/// Throws ContractError when a Block2D does not multiply out to `parts`.
Block2D block_layout(const Decomposition& decomp, std::size_t parts);

/// Factorisation rows x cols = parts with rows the largest divisor <= sqrt.
Block2D square_layout(std::size_t parts);

Decomposition parse_decomposition(std::string_view text);
std::string to_string(const Decomposition& decomp);

/// Conway's rules: survive on 2 or 3 neighbours, birth on exactly 3.
Grid life_step_serial(const Grid& grid);

/// `steps` generations. The result is identical to repeated
/// life_step_serial for every model and decomposition. MessagePass ranks own
/// one block each and trade one-cell ghost borders (corners included) every
/// step; WorkShare shares the blocks of the decomposition under the policy.
Grid life_run(const Grid& grid, std::size_t steps, const Decomposition& decomp,
              const ExecModel& model, ExecContext& ctx);
Grid life_run(const Grid& grid, std::size_t steps, const Decomposition& decomp,
              const ExecModel& model, std::size_t parallelism);

}  // namespace forkbench
