#include "downwash/dataset.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace downwash::learning {

void Dataset::append(const Dataset& other) { rows.insert(rows.end(), other.rows.begin(), other.rows.end()); }

std::vector<geometry::InteractionState> Dataset::inputs() const {
  std::vector<geometry::InteractionState> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.x);
  return out;
}

std::vector<Vec3> Dataset::labels() const {
  std::vector<Vec3> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.f_label);
  return out;
}

std::size_t Dataset::stage_size(int stage) const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.stage == stage ? 1 : 0;
  return n;
}

Dataset Dataset::stage_rows(int stage) const {
  Dataset out;
  for (const auto& r : rows) {
    if (r.stage == stage) out.rows.push_back(r);
  }
  return out;
}

Dataset Dataset::truncated(double fraction) const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("Dataset::truncated: fraction outside [0, 1]");
  std::array<std::size_t, 3> keep{};
  for (int s = 0; s < 3; ++s) keep[s] = static_cast<std::size_t>(std::llround(fraction * stage_size(s)));
  std::array<std::size_t, 3> taken{};
  Dataset out;
  for (const auto& r : rows) {
    if (taken[r.stage] < keep[r.stage]) {
      out.rows.push_back(r);
      ++taken[r.stage];
    }
  }
  return out;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  out << "# downwash dataset v1; delta_p = p_leader - p_follower; NED frame; SI units\n";
  out << kDatasetColumns << '\n';
  out << std::setprecision(17);
  for (const auto& r : data.rows) {
    out << r.t;
    for (const Vec3* v : {&r.x.delta_p, &r.x.v_leader, &r.x.v_follower, &r.f_label}) {
      out << ',' << (*v)(0) << ',' << (*v)(1) << ',' << (*v)(2);
    }
    out << ',' << r.stage << '\n';
  }
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_dataset_csv(data, out);
}

Dataset read_dataset_csv(std::istream& in) {
  Dataset data;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kDatasetColumns) throw std::runtime_error("dataset CSV: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::array<double, 14> f{};
    std::stringstream ss(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(ss, cell, ',')) {
      if (n >= f.size()) throw std::runtime_error("dataset CSV: too many columns on line " + std::to_string(line_no));
      try {
        f[n++] = std::stod(cell);
      } catch (const std::exception&) {
        throw std::runtime_error("dataset CSV: bad number on line " + std::to_string(line_no));
      }
    }
    if (n != f.size()) throw std::runtime_error("dataset CSV: wrong column count on line " + std::to_string(line_no));
    DatasetRow r;
    r.t = f[0];
    r.x.delta_p = Vec3(f[1], f[2], f[3]);
    r.x.v_leader = Vec3(f[4], f[5], f[6]);
    r.x.v_follower = Vec3(f[7], f[8], f[9]);
    r.f_label = Vec3(f[10], f[11], f[12]);
    r.stage = static_cast<int>(f[13]);
    if (r.stage < 0 || r.stage > 2 || static_cast<double>(r.stage) != f[13]) {
      throw std::runtime_error("dataset CSV: stage must be 0, 1 or 2 on line " + std::to_string(line_no));
    }
    for (double v : f) {
      if (!std::isfinite(v)) throw std::runtime_error("dataset CSV: non-finite value on line " + std::to_string(line_no));
    }
    data.rows.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("dataset CSV: missing header");
  return data;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_dataset_csv(in);
}

}  // namespace downwash::learning
