#pragma once

// Cell-centered grid on [-X, X] x [0, Y] with square cells of side h.
// Centers: x_i = -X + (i + 1/2) h, y_j = (j + 1/2) h.  Road cells share the
// x centers.  Stacked unknown order: road first (when present), then the
// field row by row from the road upward.

namespace roadfield {

struct Grid {
  double half_width = 0.0;  // X
  double height = 0.0;      // Y
  double spacing = 0.0;     // h
  int nx = 0;
  int ny = 0;

  // Validates h | 2X and h | Y (relative 1e-9), nx >= 3, ny >= 2.
  // Throws ConfigError otherwise.
  static Grid build(double X, double Y, double h);

  double x(int i) const { return -half_width + (i + 0.5) * spacing; }
  double y(int j) const { return (j + 0.5) * spacing; }
};

struct StackedIndex {
  int n_road = 0;  // nx for the coupled system, 0 for field-only operators
  int nx = 0;
  int ny = 0;

  int road(int i) const { return i; }
  int field(int i, int j) const { return n_road + j * nx + i; }
  int size() const { return n_road + nx * ny; }
};

}  // namespace roadfield
