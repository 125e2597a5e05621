/*
 * Copyright 2026 The agsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef AGSIM_PLANNING_H_
#define AGSIM_PLANNING_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "agsim/geometry.h"
#include "agsim/sensors.h"
#include "agsim/vehicles.h"
#include "agsim/world.h"

namespace agsim::planning {

enum class CellState : std::uint8_t { kFree, kOccupied, kUnknown };

struct Cell {
  int row = 0;  // along north
  int col = 0;  // along east
  auto operator<=>(const Cell&) const = default;
};

struct GridSpec {
  double origin_n = 0.0;
  double origin_e = 0.0;
  double resolution = 0.5;
  int rows = 1;
  int cols = 1;
};

// Throws ValidationError.
void Validate(const GridSpec& spec);

class OccupancyGrid {
 public:
  explicit OccupancyGrid(const GridSpec& spec, CellState fill = CellState::kUnknown);

  const GridSpec& spec() const { return spec_; }
  int rows() const { return spec_.rows; }
  int cols() const { return spec_.cols; }
  bool InBounds(const Cell& c) const {
    return c.row >= 0 && c.row < spec_.rows && c.col >= 0 && c.col < spec_.cols;
  }
  CellState At(const Cell& c) const { return cells_[Index(c)]; }
  void Set(const Cell& c, CellState state) { cells_[Index(c)] = state; }
  const std::vector<CellState>& cells() const { return cells_; }

  // Cell containing (n, e) by floor division; nullopt outside the grid.
  std::optional<Cell> CellOf(double n, double e) const;
  Vec3 CellCenter(const Cell& c, double d = 0.0) const;

 private:
  std::size_t Index(const Cell& c) const {
    return static_cast<std::size_t>(c.row) * spec_.cols + c.col;
  }

  GridSpec spec_;
  std::vector<CellState> cells_;
};

// A cell is occupied iff some point in it rises more than height_threshold
// above the ground plane and does not lie on a bridge deck (drivable). Cells
// with points but no such point are free; cells without points stay unknown.
OccupancyGrid BuildOccupancy(std::span<const sensors::PointCloud> clouds, const world::Scene& scene,
                             const GridSpec& spec, double height_threshold);

// Marks every cell whose center lies within `radius` of an occupied cell's
// center as occupied.
OccupancyGrid Inflate(const OccupancyGrid& grid, double radius);

// ASCII P2 image, row 0 first (southmost row at the top), 0 occupied,
// 128 unknown, 255 free; plus a JSON sidecar {origin_n, origin_e, resolution}.
void WriteGrid(const std::filesystem::path& pgm_path, const std::filesystem::path& meta_path,
               const OccupancyGrid& grid);

enum class UnknownAs { kFree, kOccupied };

inline constexpr double kSqrt2 = 1.4142135623730951;

struct GridPath {
  std::vector<Cell> cells;
  std::vector<Vec3> waypoints;  // cell centers at d = 0
  int straight_moves = 0;
  int diagonal_moves = 0;

  double Cost() const { return straight_moves + kSqrt2 * diagonal_moves; }
};

// True iff a planner may enter the cell.
bool Passable(const OccupancyGrid& grid, const Cell& c, UnknownAs unknown_is);

// A move between 8-adjacent cells is allowed iff the destination is passable
// and, for diagonals, both orthogonal cells it squeezes between are passable.
bool MoveAllowed(const OccupancyGrid& grid, const Cell& from, const Cell& to, UnknownAs unknown_is);

// Minimal-cost 8-connected path (straight 1, diagonal sqrt 2) with the octile
// heuristic. Throws InvalidCell when start or goal is out of bounds or
// blocked, NoPath when the goal is unreachable.
GridPath AStar(const OccupancyGrid& grid, const Cell& start, const Cell& goal,
               UnknownAs unknown_is = UnknownAs::kOccupied);

struct PurePursuitParams {
  double lookahead = 3.0;
  double waypoint_capture = 1.0;
  double cruise_speed = 3.6;
};

void Validate(const PurePursuitParams& params);

// Steering toward a point: delta = atan(2 wb sin(alpha) / L), clamped to
// max_steer. Speed 0 when the point is within `capture`.
CarCommand PursuePoint(const VehicleState& state, const Vec3& point, double speed, double capture,
                       const CarParams& car);

// Stateless pure pursuit on a waypoint polyline. The lookahead point is the
// first waypoint at arc length >= lookahead past the projection of the
// vehicle onto the path. Throws PathExhausted on an empty path.
CarCommand PurePursuitStep(const VehicleState& state, std::span<const Vec3> path,
                           const PurePursuitParams& params, const CarParams& car);

// Pure pursuit that remembers its progress so a path passing near itself
// cannot make the projection jump backwards.
class PathFollower {
 public:
  PathFollower(std::vector<Vec3> path, const PurePursuitParams& params, const CarParams& car);

  CarCommand Step(const VehicleState& state);
  bool Finished(const VehicleState& state) const;
  const std::vector<Vec3>& path() const { return path_; }

 private:
  std::vector<Vec3> path_;
  std::vector<double> arc_;
  PurePursuitParams params_;
  CarParams car_;
  std::size_t segment_ = 0;
};

}  // namespace agsim::planning

#endif  // AGSIM_PLANNING_H_
