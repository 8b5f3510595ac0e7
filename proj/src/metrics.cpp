#include "downwash/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace downwash::pipeline {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  if (!(q >= 0.0 && q <= 100.0)) throw std::invalid_argument("percentile: q must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

namespace {

ErrorSummary summarise(const std::vector<double>& magnitudes) {
  ErrorSummary s;
  if (magnitudes.empty()) return s;
  double sum = 0.0;
  for (double m : magnitudes) {
    sum += m;
    s.max = std::max(s.max, m);
  }
  s.mean = sum / static_cast<double>(magnitudes.size());
  s.p50 = percentile(magnitudes, 50.0);
  s.p90 = percentile(magnitudes, 90.0);
  s.p99 = percentile(magnitudes, 99.0);
  return s;
}

}  // namespace

TrackingMetrics tracking_metrics(const FlightLog& log) {
  TrackingMetrics m;
  const std::size_t n = log.rows.size();
  std::vector<double> vert_abs, vel_lat, vel_vert;
  vert_abs.reserve(n);
  vel_lat.reserve(n);
  vel_vert.reserve(n);
  m.t.reserve(n);
  double ms_lat = 0.0, ms_vert = 0.0, ms_3d = 0.0;
  for (const auto& row : log.rows) {
    const Vec3 ep = row.state_follower.p - row.ref_follower.p_ref;
    const Vec3 ev = row.state_follower.v - row.ref_follower.v_ref;
    m.t.push_back(row.t);
    m.position_error_lateral.push_back(ep.head<2>().norm());
    m.position_error_vertical.push_back(ep.z());
    m.position_error_3d.push_back(ep.norm());
    m.velocity_error_3d.push_back(ev.norm());
    vert_abs.push_back(std::abs(ep.z()));
    vel_lat.push_back(ev.head<2>().norm());
    vel_vert.push_back(std::abs(ev.z()));
    ms_lat += ep.head<2>().squaredNorm();
    ms_vert += ep.z() * ep.z();
    ms_3d += ep.squaredNorm();
  }
  m.position_lateral = summarise(m.position_error_lateral);
  m.position_vertical = summarise(vert_abs);
  m.position_3d = summarise(m.position_error_3d);
  m.velocity_lateral = summarise(vel_lat);
  m.velocity_vertical = summarise(vel_vert);
  m.velocity_3d = summarise(m.velocity_error_3d);
  if (n > 0) {
    const auto dn = static_cast<double>(n);
    m.position_ms_lateral = ms_lat / dn;
    m.position_ms_vertical = ms_vert / dn;
    m.position_ms_3d = ms_3d / dn;
  }
  return m;
}

}  // namespace downwash::pipeline
