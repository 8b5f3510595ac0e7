#include "downwash/field_grid.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace downwash::pipeline {

std::string to_string(GridPlane plane) { return plane == GridPlane::top_down ? "top_down" : "sagittal"; }

GridPlane grid_plane_from_string(const std::string& name) {
  if (name == "top_down") return GridPlane::top_down;
  if (name == "sagittal") return GridPlane::sagittal;
  throw std::invalid_argument("unknown grid plane '" + name + "'");
}

void GridSpec::validate() const {
  if (u_count < 1 || w_count < 1) throw std::invalid_argument("grid: counts must be >= 1");
  if (!(u_max >= u_min) || !(w_max >= w_min)) throw std::invalid_argument("grid: max must not be below min");
}

namespace {

double node(double lo, double hi, int count, int i) {
  return count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

}  // namespace

std::vector<Vec3> grid_positions(GridPlane plane, const GridSpec& spec) {
  spec.validate();
  std::vector<Vec3> out;
  out.reserve(static_cast<std::size_t>(spec.u_count) * static_cast<std::size_t>(spec.w_count));
  for (int i = 0; i < spec.u_count; ++i) {
    const double u = node(spec.u_min, spec.u_max, spec.u_count, i);
    for (int j = 0; j < spec.w_count; ++j) {
      const double w = node(spec.w_min, spec.w_max, spec.w_count, j);
      out.push_back(plane == GridPlane::top_down ? Vec3(u, w, spec.offset) : Vec3(u, spec.offset, w));
    }
  }
  return out;
}

FieldGrid export_field_grid(const ForcePredictor& predictor, GridPlane plane, const GridSpec& spec,
                            const Vec3& v_probe) {
  FieldGrid grid;
  grid.plane = plane;
  grid.spec = spec;
  grid.v_probe = v_probe;
  const auto positions = grid_positions(plane, spec);
  grid.samples.reserve(positions.size());
  for (const Vec3& rel : positions) {
    const geometry::InteractionState x{-rel, Vec3::Zero(), v_probe};
    GridSample s;
    s.u = rel.x();
    s.w = plane == GridPlane::top_down ? rel.y() : rel.z();
    s.relative = rel;
    s.force = predictor(x, Mat3::Identity());
    grid.samples.push_back(s);
  }
  return grid;
}

FieldGrid export_field_grid(const learning::ForceModel& model, GridPlane plane, const GridSpec& spec,
                            const Vec3& v_probe) {
  return export_field_grid(model_predictor(model), plane, spec, v_probe);
}

void write_field_grid_csv(const FieldGrid& grid, std::ostream& out) {
  out << "# plane=" << to_string(grid.plane) << " offset=" << grid.spec.offset << " v_probe=" << grid.v_probe.x()
      << ',' << grid.v_probe.y() << ',' << grid.v_probe.z() << '\n';
  out << "u,w,rel_n,rel_e,rel_d,f_n,f_e,f_d\n" << std::setprecision(17);
  for (const auto& s : grid.samples) {
    out << s.u << ',' << s.w << ',' << s.relative.x() << ',' << s.relative.y() << ',' << s.relative.z() << ','
        << s.force.x() << ',' << s.force.y() << ',' << s.force.z() << '\n';
  }
}

void write_field_grid_csv(const FieldGrid& grid, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_field_grid_csv(grid, out);
}

}  // namespace downwash::pipeline
