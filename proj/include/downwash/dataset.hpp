#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "downwash/geometry.hpp"

namespace downwash::learning {

/// One training pair. t is flight time since the start of the row's stage.
struct DatasetRow {
  double t = 0.0;
  geometry::InteractionState x;
  Vec3 f_label = Vec3::Zero();
  int stage = 0;
};

struct Dataset {
  std::vector<DatasetRow> rows;

  std::size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  void append(const Dataset& other);
  std::vector<geometry::InteractionState> inputs() const;
  std::vector<Vec3> labels() const;
  /// Keep the first `fraction` of each stage's rows, in collection order.
  /// Rows are sampled at a fixed rate, so this shortens each stage's flight
  /// time proportionally.
  Dataset truncated(double fraction) const;
  std::size_t stage_size(int stage) const;
  /// Rows of one stage only.
  Dataset stage_rows(int stage) const;
};

inline constexpr const char* kDatasetColumns =
    "t,dp_n,dp_e,dp_d,va_n,va_e,va_d,vb_n,vb_e,vb_d,f_n,f_e,f_d,stage";

void write_dataset_csv(const Dataset& data, std::ostream& out);
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::string& path);

}  // namespace downwash::learning
