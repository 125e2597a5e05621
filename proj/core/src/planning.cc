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

#include "agsim/planning.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

#include "agsim/error.h"
#include "fmt/format.h"
#include "nlohmann/json.hpp"

namespace agsim::planning {
namespace {

constexpr int kNeighbors[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                  {0, 1},   {1, -1}, {1, 0},  {1, 1}};

double Octile(const Cell& a, const Cell& b) {
  const int dr = std::abs(a.row - b.row);
  const int dc = std::abs(a.col - b.col);
  return std::abs(dr - dc) + kSqrt2 * std::min(dr, dc);
}

std::string CellText(const Cell& c) { return fmt::format("({}, {})", c.row, c.col); }

// Horizontal projection of p onto segment a-b as a fraction in [0, 1].
double ProjectFraction(const Vec3& a, const Vec3& b, const Vec3& p) {
  const double sn = b.n - a.n, se = b.e - a.e;
  const double len2 = sn * sn + se * se;
  if (len2 == 0.0) return 0.0;
  return std::clamp(((p.n - a.n) * sn + (p.e - a.e) * se) / len2, 0.0, 1.0);
}

std::vector<double> ArcLengths(const std::vector<Vec3>& path) {
  std::vector<double> arc(path.size(), 0.0);
  for (std::size_t i = 1; i < path.size(); ++i) {
    arc[i] = arc[i - 1] + HorizontalDistance(path[i - 1], path[i]);
  }
  return arc;
}

struct Projection {
  std::size_t segment = 0;
  double arc = 0.0;
};

// Closest projection over segments [first, last).
Projection Project(std::span<const Vec3> path, std::span<const double> arc, const Vec3& p,
                   std::size_t first, std::size_t last) {
  Projection best{first, arc[first]};
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = first; i < last; ++i) {
    const double t = ProjectFraction(path[i], path[i + 1], p);
    const Vec3 q = path[i] + (path[i + 1] - path[i]) * t;
    const double dn = p.n - q.n, de = p.e - q.e;
    const double d2 = dn * dn + de * de;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = {i, arc[i] + t * (arc[i + 1] - arc[i])};
    }
  }
  return best;
}

CarCommand FollowFrom(const VehicleState& state, std::span<const Vec3> path,
                      std::span<const double> arc, const Projection& proj,
                      const PurePursuitParams& params, const CarParams& car) {
  const Vec3& pos = state.pose.position;
  if (HorizontalDistance(pos, path.back()) <= params.waypoint_capture) {
    return CarCommand::Drive(0.0, 0.0);
  }
  const double target_arc = proj.arc + params.lookahead;
  std::size_t j = proj.segment;
  while (j + 1 < path.size() && arc[j] < target_arc) ++j;
  return PursuePoint(state, path[j], params.cruise_speed, 0.0, car);
}

}  // namespace

void Validate(const GridSpec& spec) {
  if (spec.rows < 1 || spec.cols < 1) throw ValidationError("grid rows and cols must be >= 1");
  if (!(spec.resolution > 0.0)) throw ValidationError("grid resolution must be > 0");
  if (!std::isfinite(spec.origin_n) || !std::isfinite(spec.origin_e)) {
    throw ValidationError("grid origin must be finite");
  }
}

OccupancyGrid::OccupancyGrid(const GridSpec& spec, CellState fill) : spec_(spec) {
  Validate(spec);
  cells_.assign(static_cast<std::size_t>(spec.rows) * spec.cols, fill);
}

std::optional<Cell> OccupancyGrid::CellOf(double n, double e) const {
  const double r = std::floor((n - spec_.origin_n) / spec_.resolution);
  const double c = std::floor((e - spec_.origin_e) / spec_.resolution);
  if (!(r >= 0.0 && r < spec_.rows && c >= 0.0 && c < spec_.cols)) return std::nullopt;
  return Cell{static_cast<int>(r), static_cast<int>(c)};
}

Vec3 OccupancyGrid::CellCenter(const Cell& c, double d) const {
  return {spec_.origin_n + (c.row + 0.5) * spec_.resolution,
          spec_.origin_e + (c.col + 0.5) * spec_.resolution, d};
}

OccupancyGrid BuildOccupancy(std::span<const sensors::PointCloud> clouds, const world::Scene& scene,
                             const GridSpec& spec, double height_threshold) {
  if (!(height_threshold > 0.0)) throw ValidationError("height_threshold must be > 0");
  OccupancyGrid grid(spec, CellState::kUnknown);
  for (const auto& cloud : clouds) {
    for (const auto& p : cloud.points) {
      const auto cell = grid.CellOf(p.n, p.e);
      if (!cell) continue;
      const double height = scene.ground_d() - p.d;
      if (height > height_threshold && !world::OnDrivableStructure(scene, p, 0.05)) {
        grid.Set(*cell, CellState::kOccupied);
      } else if (grid.At(*cell) == CellState::kUnknown) {
        grid.Set(*cell, CellState::kFree);
      }
    }
  }
  return grid;
}

OccupancyGrid Inflate(const OccupancyGrid& grid, double radius) {
  OccupancyGrid out = grid;
  const double res = grid.spec().resolution;
  const int reach = static_cast<int>(std::ceil(radius / res));
  const double limit = radius * radius + 1e-9;
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      if (grid.At({r, c}) != CellState::kOccupied) continue;
      for (int dr = -reach; dr <= reach; ++dr) {
        for (int dc = -reach; dc <= reach; ++dc) {
          const Cell n{r + dr, c + dc};
          if (!out.InBounds(n)) continue;
          if ((dr * dr + dc * dc) * res * res <= limit) out.Set(n, CellState::kOccupied);
        }
      }
    }
  }
  return out;
}

void WriteGrid(const std::filesystem::path& pgm_path, const std::filesystem::path& meta_path,
               const OccupancyGrid& grid) {
  std::string text = fmt::format("P2\n{} {}\n255\n", grid.cols(), grid.rows());
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      int value = 128;
      if (grid.At({r, c}) == CellState::kOccupied) value = 0;
      if (grid.At({r, c}) == CellState::kFree) value = 255;
      if (c > 0) text += ' ';
      text += std::to_string(value);
    }
    text += '\n';
  }
  std::ofstream pgm(pgm_path);
  if (!pgm) throw Error("cannot write grid file '" + pgm_path.string() + "'");
  pgm << text;
  std::ofstream meta(meta_path);
  if (!meta) throw Error("cannot write grid sidecar '" + meta_path.string() + "'");
  const nlohmann::json sidecar = {{"origin_n", grid.spec().origin_n},
                                  {"origin_e", grid.spec().origin_e},
                                  {"resolution", grid.spec().resolution},
                                  {"rows", grid.rows()},
                                  {"cols", grid.cols()}};
  meta << sidecar.dump(2) << "\n";
}

bool Passable(const OccupancyGrid& grid, const Cell& c, UnknownAs unknown_is) {
  if (!grid.InBounds(c)) return false;
  const CellState s = grid.At(c);
  if (s == CellState::kOccupied) return false;
  return s == CellState::kFree || unknown_is == UnknownAs::kFree;
}

bool MoveAllowed(const OccupancyGrid& grid, const Cell& from, const Cell& to,
                 UnknownAs unknown_is) {
  if (!Passable(grid, to, unknown_is)) return false;
  if (from.row != to.row && from.col != to.col) {
    return Passable(grid, {from.row, to.col}, unknown_is) &&
           Passable(grid, {to.row, from.col}, unknown_is);
  }
  return true;
}

GridPath AStar(const OccupancyGrid& grid, const Cell& start, const Cell& goal,
               UnknownAs unknown_is) {
  if (!grid.InBounds(start)) throw InvalidCell("start " + CellText(start) + " is outside the grid");
  if (!grid.InBounds(goal)) throw InvalidCell("goal " + CellText(goal) + " is outside the grid");
  if (!Passable(grid, start, unknown_is)) throw InvalidCell("start " + CellText(start) + " is blocked");
  if (!Passable(grid, goal, unknown_is)) throw InvalidCell("goal " + CellText(goal) + " is blocked");

  const std::size_t size = grid.cells().size();
  const auto index = [&](const Cell& c) {
    return static_cast<std::size_t>(c.row) * grid.cols() + c.col;
  };
  const auto cell_at = [&](std::size_t i) {
    return Cell{static_cast<int>(i / grid.cols()), static_cast<int>(i % grid.cols())};
  };

  // Path costs are kept as exact move counts; the scalar cost is derived.
  struct Cost {
    int straight = std::numeric_limits<int>::max();
    int diagonal = 0;
    double Value() const { return straight + kSqrt2 * diagonal; }
  };
  std::vector<Cost> g(size);
  std::vector<std::int64_t> parent(size, -1);
  std::vector<bool> closed(size, false);

  struct Entry {
    double f;
    double h;
    std::uint64_t seq;
    std::size_t index;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (h != o.h) return h > o.h;
      return seq > o.seq;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  std::uint64_t seq = 0;

  const std::size_t start_index = index(start);
  const std::size_t goal_index = index(goal);
  g[start_index] = {0, 0};
  open.push({Octile(start, goal), Octile(start, goal), seq++, start_index});
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = true;
    if (top.index == goal_index) break;
    const Cell here = cell_at(top.index);
    for (const auto& step : kNeighbors) {
      const Cell next{here.row + step[0], here.col + step[1]};
      if (!MoveAllowed(grid, here, next, unknown_is)) continue;
      const bool diagonal = step[0] != 0 && step[1] != 0;
      Cost candidate = g[top.index];
      if (diagonal) {
        ++candidate.diagonal;
      } else {
        ++candidate.straight;
      }
      const std::size_t ni = index(next);
      if (g[ni].straight != std::numeric_limits<int>::max() &&
          candidate.Value() >= g[ni].Value()) {
        continue;
      }
      g[ni] = candidate;
      parent[ni] = static_cast<std::int64_t>(top.index);
      // Reopening keeps the result optimal even if rounding makes the
      // heuristic locally inconsistent.
      closed[ni] = false;
      const double h = Octile(next, goal);
      open.push({candidate.Value() + h, h, seq++, ni});
    }
  }
  if (!closed[goal_index]) {
    throw NoPath("no path from " + CellText(start) + " to " + CellText(goal));
  }

  GridPath path;
  for (std::int64_t i = static_cast<std::int64_t>(goal_index); i >= 0; i = parent[i]) {
    path.cells.push_back(cell_at(static_cast<std::size_t>(i)));
  }
  std::reverse(path.cells.begin(), path.cells.end());
  path.straight_moves = g[goal_index].straight;
  path.diagonal_moves = g[goal_index].diagonal;
  path.waypoints.reserve(path.cells.size());
  for (const auto& c : path.cells) path.waypoints.push_back(grid.CellCenter(c));
  return path;
}

void Validate(const PurePursuitParams& params) {
  if (!(params.lookahead > 0.0) || !(params.waypoint_capture > 0.0) ||
      !(params.cruise_speed > 0.0)) {
    throw ValidationError("pure pursuit parameters must all be positive");
  }
}

CarCommand PursuePoint(const VehicleState& state, const Vec3& point, double speed, double capture,
                       const CarParams& car) {
  const double dist = HorizontalDistance(state.pose.position, point);
  if (dist <= capture || dist == 0.0) return CarCommand::Drive(0.0, 0.0);
  return CarCommand::Drive(speed, PursuitSteer(state.pose, point, car));
}

CarCommand PurePursuitStep(const VehicleState& state, std::span<const Vec3> path,
                           const PurePursuitParams& params, const CarParams& car) {
  if (path.empty()) throw PathExhausted("pure pursuit needs a nonempty path");
  if (path.size() == 1) {
    return PursuePoint(state, path[0], params.cruise_speed, params.waypoint_capture, car);
  }
  const std::vector<Vec3> copy(path.begin(), path.end());
  const std::vector<double> arc = ArcLengths(copy);
  const Projection proj = Project(path, arc, state.pose.position, 0, path.size() - 1);
  return FollowFrom(state, path, arc, proj, params, car);
}

PathFollower::PathFollower(std::vector<Vec3> path, const PurePursuitParams& params,
                           const CarParams& car)
    : path_(std::move(path)), params_(params), car_(car) {
  if (path_.empty()) throw PathExhausted("path follower needs a nonempty path");
  Validate(params);
  arc_ = ArcLengths(path_);
}

CarCommand PathFollower::Step(const VehicleState& state) {
  if (path_.size() == 1) {
    return PursuePoint(state, path_[0], params_.cruise_speed, params_.waypoint_capture, car_);
  }
  // Search a bounded window ahead of the last projection.
  const double window_end = arc_[segment_] + 2.0 * params_.lookahead + 5.0;
  std::size_t last = segment_ + 1;
  while (last + 1 < path_.size() && arc_[last] < window_end) ++last;
  const Projection proj = Project(path_, arc_, state.pose.position, segment_, last);
  segment_ = proj.segment;
  return FollowFrom(state, path_, arc_, proj, params_, car_);
}

bool PathFollower::Finished(const VehicleState& state) const {
  // Progress must be near the end too, so a closed route does not finish at
  // its start.
  return arc_.back() - arc_[segment_] <= params_.lookahead + params_.waypoint_capture &&
         HorizontalDistance(state.pose.position, path_.back()) <= params_.waypoint_capture;
}

}  // namespace agsim::planning
