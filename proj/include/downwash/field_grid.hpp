#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "downwash/episode.hpp"

namespace downwash::pipeline {

enum class GridPlane { top_down, sagittal };

std::string to_string(GridPlane plane);
GridPlane grid_plane_from_string(const std::string& name);

/// Regular grid of follower positions relative to the leader. top_down spans
/// (north, east) at `offset` metres below the leader; sagittal spans (north,
/// down) at `offset` metres east of it.
struct GridSpec {
  double u_min = -1.5;
  double u_max = 1.5;
  int u_count = 61;
  double w_min = -1.5;
  double w_max = 1.5;
  int w_count = 61;
  double offset = 0.6;

  void validate() const;
};

struct GridSample {
  double u = 0.0;
  double w = 0.0;
  Vec3 relative = Vec3::Zero();  // follower minus leader
  Vec3 force = Vec3::Zero();
};

struct FieldGrid {
  GridPlane plane = GridPlane::top_down;
  GridSpec spec;
  Vec3 v_probe = Vec3::Zero();
  std::vector<GridSample> samples;  // u-major order
};

/// Follower positions relative to the leader for every grid node, u-major.
std::vector<Vec3> grid_positions(GridPlane plane, const GridSpec& spec);

/// Evaluates the predictor with a hovering, level leader and the follower
/// moving at v_probe.
FieldGrid export_field_grid(const ForcePredictor& predictor, GridPlane plane, const GridSpec& spec,
                            const Vec3& v_probe = Vec3(0.5, 0.0, 0.0));
FieldGrid export_field_grid(const learning::ForceModel& model, GridPlane plane, const GridSpec& spec,
                            const Vec3& v_probe = Vec3(0.5, 0.0, 0.0));

void write_field_grid_csv(const FieldGrid& grid, std::ostream& out);
void write_field_grid_csv(const FieldGrid& grid, const std::string& path);

}  // namespace downwash::pipeline
