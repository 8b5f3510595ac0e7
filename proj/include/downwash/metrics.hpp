#pragma once

#include <vector>

#include "downwash/episode.hpp"

namespace downwash::pipeline {

struct ErrorSummary {
  double mean = 0.0;
  double max = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
};

struct TrackingMetrics {
  ErrorSummary position_lateral;
  ErrorSummary position_vertical;
  ErrorSummary position_3d;
  ErrorSummary velocity_lateral;
  ErrorSummary velocity_vertical;
  ErrorSummary velocity_3d;
  /// Mean squared position error, total and split; lateral + vertical == total.
  double position_ms_lateral = 0.0;
  double position_ms_vertical = 0.0;
  double position_ms_3d = 0.0;

  // Per-row series, aligned with the log.
  std::vector<double> t;
  std::vector<double> position_error_lateral;
  std::vector<double> position_error_vertical;  // signed, positive down
  std::vector<double> position_error_3d;
  std::vector<double> velocity_error_3d;
};

/// Errors are follower state minus its reference. Vertical errors are
/// summarised as magnitudes; the series keeps the sign.
TrackingMetrics tracking_metrics(const FlightLog& log);

/// Linear-interpolated percentile, q in [0, 100].
double percentile(std::vector<double> values, double q);

}  // namespace downwash::pipeline
