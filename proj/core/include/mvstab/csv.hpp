#pragma once

#include <string>

#include "mvstab/sim.hpp"

namespace mvstab {

/// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

/// Serializes a trajectory as `t,m1_0..m1_{d-1},msq[,mp][,hold_err]` rows.
/// An aborted run gets a trailing `# aborted: ...` flag row.
std::string trajectory_csv(const TrajectoryRecord& rec);

/// One row per particle, d comma-separated columns.
std::string snapshot_csv(const EmpiricalMeasure& m);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace mvstab
