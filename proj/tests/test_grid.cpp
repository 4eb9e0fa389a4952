#include "doctest.h"
#include "roadfield/grid.hpp"
#include "roadfield/util.hpp"

using namespace roadfield;

TEST_SUITE("grid") {
  TEST_CASE("cell centers and sizes") {
    const Grid g = Grid::build(1.0, 1.0, 0.5);
    CHECK(g.nx == 4);
    CHECK(g.ny == 2);
    CHECK(g.x(0) == doctest::Approx(-0.75));
    CHECK(g.x(3) == doctest::Approx(0.75));
    CHECK(g.y(0) == doctest::Approx(0.25));
    CHECK(g.y(1) == doctest::Approx(0.75));

    const Grid g2 = Grid::build(2.0, 1.0, 0.25);
    CHECK(g2.nx == 16);
    CHECK(g2.ny == 4);
  }

  TEST_CASE("stacked index layout: road first, field row-major") {
    const Grid g = Grid::build(1.0, 1.0, 0.5);
    const StackedIndex idx{g.nx, g.nx, g.ny};
    CHECK(idx.size() == 12);
    CHECK(idx.road(2) == 2);
    CHECK(idx.field(0, 0) == 4);
    CHECK(idx.field(3, 0) == 7);
    CHECK(idx.field(0, 1) == 8);

    const StackedIndex no_road{0, g.nx, g.ny};
    CHECK(no_road.size() == 8);
    CHECK(no_road.field(1, 1) == 5);
  }

  TEST_CASE("spacing must divide both extents") {
    CHECK_THROWS_AS(Grid::build(1.0, 1.0, 0.3), ConfigError);
    CHECK_THROWS_AS(Grid::build(1.0, 0.8, 0.5), ConfigError);
    // near-divisible within the relative snap tolerance is accepted
    CHECK_NOTHROW(Grid::build(1.0 + 1e-12, 1.0, 0.25));
  }

  TEST_CASE("degenerate grids are rejected") {
    CHECK_THROWS_AS(Grid::build(0.5, 1.0, 0.5), ConfigError);   // nx == 2
    CHECK_THROWS_AS(Grid::build(1.0, 0.25, 0.25), ConfigError); // ny == 1
    CHECK_THROWS_AS(Grid::build(1.0, 1.0, -0.5), ConfigError);
    CHECK_THROWS_AS(Grid::build(-1.0, 1.0, 0.5), ConfigError);
  }
}
