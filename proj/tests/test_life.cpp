#include <doctest.h>

#include <string>
#include <vector>

#include "forkbench/error.hpp"
#include "forkbench/life.hpp"

using namespace forkbench;

namespace {

Grid from_rows(const std::vector<std::string>& rows, Boundary boundary = Boundary::Dead) {
  Grid g(rows.front().size(), rows.size(), boundary);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) g.set(r, c, rows[r][c] == '#');
  }
  return g;
}

Grid serial_run(Grid g, std::size_t steps) {
  for (std::size_t s = 0; s < steps; ++s) g = life_step_serial(g);
  return g;
}

Grid glider16() {
  Grid g(16, 16, Boundary::Toroidal);
  g.set(0, 1, true);
  g.set(1, 2, true);
  g.set(2, 0, true);
  g.set(2, 1, true);
  g.set(2, 2, true);
  return g;
}

// Every pair (decomposition, model) exercised for equivalence.
struct Variant {
  Decomposition decomp;
  ExecModel model;
};

std::vector<Variant> variants(std::size_t p) {
  std::vector<Variant> out;
  const std::vector<Decomposition> decomps{RowBlock{}, ColBlock{}, Block2D{0, 0}};
  const std::vector<SchedulePolicy> policies{Static{}, Dynamic{1}, Guided{1}, Runtime{}};
  for (const auto& d : decomps) {
    for (const auto& policy : policies) out.push_back({d, WorkShare{policy}});
    out.push_back({d, MessagePass{}});
  }
  out.push_back({RowBlock{}, Serial{}});
  if (p == 4) {
    out.push_back({Block2D{2, 2}, MessagePass{}});
    out.push_back({Block2D{1, 4}, MessagePass{}});
    out.push_back({Block2D{4, 1}, MessagePass{}});
  }
  return out;
}

}  // namespace

TEST_CASE("blinker oscillates") {
  const Grid vertical = from_rows({".....", "..#..", "..#..", "..#..", "....."});
  const Grid horizontal = from_rows({".....", ".....", ".###.", ".....", "....."});
  CHECK(life_step_serial(vertical) == horizontal);
  CHECK(life_step_serial(horizontal) == vertical);
}

TEST_CASE("empty grid stays empty") {
  const Grid empty(6, 4);
  CHECK(life_step_serial(empty) == empty);
}

TEST_CASE("still lifes are fixed for ten steps") {
  const Grid block = from_rows({"....", ".##.", ".##.", "...."});
  const Grid beehive = from_rows({"......", "..##..", ".#..#.", "..##..", "......"});
  for (const auto& g : {block, beehive}) {
    Grid cur = g;
    for (int s = 0; s < 10; ++s) {
      cur = life_step_serial(cur);
      CHECK(cur == g);
    }
    for (std::size_t p : {1, 2, 4}) {
      for (const auto& v : variants(p)) {
        if (std::holds_alternative<MessagePass>(v.model)) {
          const auto layout = block_layout(v.decomp, p);
          if (layout.rows > g.height() || layout.cols > g.width()) continue;
        }
        CHECK(life_run(g, 10, v.decomp, v.model, p) == g);
      }
    }
  }
}

TEST_CASE("boundary rules") {
  // A corner cell has 3 neighbours on a dead boundary, 8 on a torus.
  Grid dead(4, 4, Boundary::Dead);
  Grid torus(4, 4, Boundary::Toroidal);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      dead.set(r, c, true);
      torus.set(r, c, true);
    }
  }
  CHECK(dead.live_neighbors(0, 0) == 3);
  CHECK(torus.live_neighbors(0, 0) == 8);
  CHECK(dead.live_neighbors(1, 1) == 8);
}

TEST_CASE("zero steps returns the input") {
  const Grid g = Grid::random(20, 10, Boundary::Dead, 3);
  for (std::size_t p : {1, 2, 4}) {
    for (const auto& v : variants(p)) CHECK(life_run(g, 0, v.decomp, v.model, p) == g);
  }
}

TEST_CASE("glider on a 16x16 torus matches the oracle and translates by (16,16) after 64 steps") {
  const Grid start = glider16();
  const Grid oracle = serial_run(start, 64);
  CHECK(oracle == start);  // 64 steps move the glider 16 cells diagonally: a full wrap.
  CHECK(serial_run(start, 4) != start);
  for (std::size_t p : {1, 2, 4}) {
    for (const auto& v : variants(p)) CHECK(life_run(start, 64, v.decomp, v.model, p) == oracle);
  }
}

TEST_CASE("glider moves one cell diagonally every four steps") {
  const Grid start = glider16();
  const Grid after = serial_run(start, 4);
  for (std::size_t r = 0; r < 16; ++r) {
    for (std::size_t c = 0; c < 16; ++c) CHECK(after.alive((r + 1) % 16, (c + 1) % 16) == start.alive(r, c));
  }
}

TEST_CASE("random grid agrees across decompositions, models and worker counts") {
  for (auto boundary : {Boundary::Dead, Boundary::Toroidal}) {
    const Grid g = Grid::random(37, 23, boundary, 42);
    const Grid oracle = serial_run(g, 25);
    for (std::size_t p : {1, 2, 3, 4}) {
      for (const auto& v : variants(p)) CHECK(life_run(g, 25, v.decomp, v.model, p) == oracle);
    }
  }
}

TEST_CASE("grid text round trip") {
  const Grid g = Grid::parse("3 2 toroidal\n.#.\n##.\n");
  CHECK(g.width() == 3);
  CHECK(g.height() == 2);
  CHECK(g.boundary() == Boundary::Toroidal);
  CHECK(g.alive(0, 1));
  CHECK_FALSE(g.alive(0, 0));
  CHECK(g.population() == 3);
  CHECK(Grid::parse(g.to_text()) == g);
  CHECK(Grid::parse("2 1 dead\n#.").boundary() == Boundary::Dead);
}

TEST_CASE("grid text errors") {
  CHECK_THROWS_AS(Grid::parse(""), ParseError);
  CHECK_THROWS_AS(Grid::parse("3 2 dead\n...\n"), ParseError);
  CHECK_THROWS_AS(Grid::parse("3 1 dead\n..\n"), ParseError);
  CHECK_THROWS_AS(Grid::parse("3 1 dead\n.x.\n"), ParseError);
  CHECK_THROWS_AS(Grid::parse("3 1 mirror\n...\n"), ParseError);
  CHECK_THROWS_AS(Grid(0, 3), ContractError);
}

TEST_CASE("decomposition parsing and layouts") {
  CHECK(std::holds_alternative<RowBlock>(parse_decomposition("row")));
  CHECK(std::holds_alternative<ColBlock>(parse_decomposition("col")));
  const auto b = std::get<Block2D>(parse_decomposition("block2d:2x3"));
  CHECK(b.rows == 2);
  CHECK(b.cols == 3);
  CHECK_THROWS_AS(parse_decomposition("diagonal"), ParseError);

  const auto row = block_layout(RowBlock{}, 4);
  CHECK((row.rows == 4 && row.cols == 1));
  const auto col = block_layout(ColBlock{}, 4);
  CHECK((col.rows == 1 && col.cols == 4));
  const auto sq = square_layout(4);
  CHECK((sq.rows == 2 && sq.cols == 2));
  const auto six = square_layout(6);
  CHECK(six.rows * six.cols == 6);
  CHECK_THROWS_AS(block_layout(Block2D{2, 2}, 3), ContractError);
}

TEST_CASE("message passing rejects mismatched or oversized layouts") {
  const Grid g = Grid::random(8, 8, Boundary::Dead, 1);
  CHECK_THROWS_AS(life_run(g, 1, Block2D{2, 2}, MessagePass{}, 2), ContractError);
  const Grid thin(3, 2, Boundary::Dead);
  CHECK_THROWS_AS(life_run(thin, 1, RowBlock{}, MessagePass{}, 4), ContractError);
}
