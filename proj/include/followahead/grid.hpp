#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "followahead/errors.hpp"

namespace followahead {

struct GridCell {
  int col = 0;
  int row = 0;
  friend bool operator==(const GridCell&, const GridCell&) = default;
};

// Rasterized obstacle map. Cell (col,row) spans
//   [origin_x + col*res, origin_x + (col+1)*res) x [origin_y + row*res, ...)
// Row 0 is the row containing the origin corner. Immutable after load.
class OccupancyGrid {
 public:
  OccupancyGrid() = default;

  OccupancyGrid(int width, int height, double resolution, double origin_x,
                double origin_y, std::vector<std::uint8_t> cells = {})
      : width_(width),
        height_(height),
        resolution_(resolution),
        origin_x_(origin_x),
        origin_y_(origin_y),
        cells_(std::move(cells)) {
    if (width_ <= 0 || height_ <= 0) {
      throw std::invalid_argument("OccupancyGrid: non-positive dimensions");
    }
    if (!(resolution_ > 0.0)) {
      throw std::invalid_argument("OccupancyGrid: resolution must be > 0");
    }
    if (cells_.empty()) {
      cells_.assign(static_cast<std::size_t>(width_) * height_, 0);
    }
    if (cells_.size() != static_cast<std::size_t>(width_) * height_) {
      throw std::invalid_argument("OccupancyGrid: cell count mismatch");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  double resolution() const { return resolution_; }
  double origin_x() const { return origin_x_; }
  double origin_y() const { return origin_y_; }

  bool in_bounds(int col, int row) const {
    return col >= 0 && col < width_ && row >= 0 && row < height_;
  }

  bool in_bounds_world(double x, double y) const {
    return x >= origin_x_ && x < origin_x_ + width_ * resolution_ &&
           y >= origin_y_ && y < origin_y_ + height_ * resolution_;
  }

  bool occupied(int col, int row) const {
    return cells_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }

  void set_occupied(int col, int row, bool value = true) {
    cells_[static_cast<std::size_t>(row) * width_ + col] = value ? 1 : 0;
  }

  GridCell cell_of(double x, double y) const {
    return GridCell{static_cast<int>(std::floor((x - origin_x_) / resolution_)),
                    static_cast<int>(std::floor((y - origin_y_) / resolution_))};
  }

  // World coordinates of a cell's center.
  void center_of(const GridCell& c, double& x, double& y) const {
    x = origin_x_ + (c.col + 0.5) * resolution_;
    y = origin_y_ + (c.row + 0.5) * resolution_;
  }

  std::size_t occupied_count() const {
    std::size_t n = 0;
    for (auto v : cells_) n += (v != 0);
    return n;
  }

  // True iff the point is outside the map, inside an occupied cell, or within
  // `inflation` meters of an occupied cell's center.
  bool is_collision(double x, double y, double inflation) const {
    if (inflation < 0.0) throw std::invalid_argument("is_collision: inflation < 0");
    if (!in_bounds_world(x, y)) return true;
    const GridCell at = cell_of(x, y);
    if (occupied(at.col, at.row)) return true;
    if (inflation == 0.0) return false;

    // Only cells whose centers fall in the box of half-width `inflation`
    // around the point can be within range.
    const double r2 = inflation * inflation;
    const int cmin = std::max(
        0, static_cast<int>(std::ceil((x - inflation - origin_x_) / resolution_ - 0.5)));
    const int cmax = std::min(
        width_ - 1,
        static_cast<int>(std::floor((x + inflation - origin_x_) / resolution_ - 0.5)));
    const int rmin = std::max(
        0, static_cast<int>(std::ceil((y - inflation - origin_y_) / resolution_ - 0.5)));
    const int rmax = std::min(
        height_ - 1,
        static_cast<int>(std::floor((y + inflation - origin_y_) / resolution_ - 0.5)));
    for (int row = rmin; row <= rmax; ++row) {
      for (int col = cmin; col <= cmax; ++col) {
        if (!occupied(col, row)) continue;
        double cx, cy;
        center_of(GridCell{col, row}, cx, cy);
        const double ddx = cx - x, ddy = cy - y;
        if (ddx * ddx + ddy * ddy <= r2) return true;
      }
    }
    return false;
  }

  // Every cell the closed segment a->b touches, including boundary and corner
  // contacts. Enumerated column-major; direction-independent by construction.
  std::vector<GridCell> supercover_cells(double ax, double ay, double bx,
                                         double by) const {
    // Canonical endpoint order makes the result symmetric in (a, b).
    if (bx < ax || (bx == ax && by < ay)) {
      std::swap(ax, bx);
      std::swap(ay, by);
    }
    // Work in cell units.
    const double ux = (ax - origin_x_) / resolution_;
    const double uy = (ay - origin_y_) / resolution_;
    const double vx = (bx - origin_x_) / resolution_;
    const double vy = (by - origin_y_) / resolution_;
    const double dirx = vx - ux;
    const double diry = vy - uy;

    std::vector<GridCell> out;
    int cmin = static_cast<int>(std::floor(std::min(ux, vx)));
    if (static_cast<double>(cmin) == std::min(ux, vx)) --cmin;  // boundary touch
    int cmax = static_cast<int>(std::floor(std::max(ux, vx)));
    cmin = std::max(cmin, 0);
    cmax = std::min(cmax, width_ - 1);

    for (int c = cmin; c <= cmax; ++c) {
      // Parameter range of the segment inside the closed column slab [c, c+1].
      double tlo = 0.0, thi = 1.0;
      if (dirx != 0.0) {
        double t0 = (c - ux) / dirx;
        double t1 = (c + 1 - ux) / dirx;
        if (t0 > t1) std::swap(t0, t1);
        tlo = std::max(t0, 0.0);
        thi = std::min(t1, 1.0);
        if (tlo > thi) continue;
      }
      double ylo = uy + tlo * diry;
      double yhi = uy + thi * diry;
      if (ylo > yhi) std::swap(ylo, yhi);

      int rmin = static_cast<int>(std::floor(ylo));
      if (static_cast<double>(rmin) == ylo) --rmin;
      int rmax = static_cast<int>(std::floor(yhi));
      rmin = std::max(rmin, 0);
      rmax = std::min(rmax, height_ - 1);
      for (int r = rmin; r <= rmax; ++r) out.push_back(GridCell{c, r});
    }
    return out;
  }

  // True iff the straight segment between two in-bounds points touches any
  // occupied cell.
  bool is_occluded(double ax, double ay, double bx, double by) const {
    if (!in_bounds_world(ax, ay) || !in_bounds_world(bx, by)) {
      throw std::invalid_argument("is_occluded: endpoint outside the map");
    }
    for (const GridCell& c : supercover_cells(ax, ay, bx, by)) {
      if (occupied(c.col, c.row)) return true;
    }
    return false;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  double resolution_ = 1.0;
  double origin_x_ = 0.0;
  double origin_y_ = 0.0;
  std::vector<std::uint8_t> cells_;
};

// Parses the OCCMAP text format:
//   OCCMAP v1
//   width <int> height <int> resolution <float> origin <float> <float>
//   <height rows of width characters, '0' free / '1' occupied; row 0 first>
inline OccupancyGrid parse_map(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty map document", 1);
  ++lineno;
  if (line == "OCCMAP v1\r") line.pop_back();
  if (line != "OCCMAP v1") throw ParseError("expected magic 'OCCMAP v1'", lineno);

  if (!std::getline(in, line)) throw ParseError("missing header line", 2);
  ++lineno;
  std::istringstream hdr(line);
  std::string kw, ko, kr, kor;
  int width = 0, height = 0;
  double resolution = 0.0, origin_x = 0.0, origin_y = 0.0;
  hdr >> kw >> width >> ko >> height >> kr >> resolution >> kor >> origin_x >> origin_y;
  if (!hdr || kw != "width" || ko != "height" || kr != "resolution" || kor != "origin") {
    throw ParseError("malformed header, expected "
                     "'width <int> height <int> resolution <float> origin <float> <float>'",
                     lineno);
  }
  if (width <= 0 || height <= 0) throw ParseError("non-positive grid dimensions", lineno);
  if (!(resolution > 0.0)) throw ParseError("resolution must be > 0", lineno);

  std::vector<std::uint8_t> cells(static_cast<std::size_t>(width) * height, 0);
  for (int row = 0; row < height; ++row) {
    if (!std::getline(in, line)) {
      throw ParseError("unexpected end of document, expected row " + std::to_string(row),
                       lineno + 1);
    }
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<int>(line.size()) != width) {
      throw ParseError("row " + std::to_string(row) + " has " +
                           std::to_string(line.size()) + " cells, expected " +
                           std::to_string(width),
                       lineno);
    }
    for (int col = 0; col < width; ++col) {
      const char ch = line[static_cast<std::size_t>(col)];
      if (ch == '1') {
        cells[static_cast<std::size_t>(row) * width + col] = 1;
      } else if (ch != '0') {
        throw ParseError(std::string("unknown cell character '") + ch + "' in row " +
                             std::to_string(row),
                         lineno);
      }
    }
  }
  return OccupancyGrid(width, height, resolution, origin_x, origin_y, std::move(cells));
}

inline OccupancyGrid load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open map file: " + path);
  return parse_map(in);
}

}  // namespace followahead
