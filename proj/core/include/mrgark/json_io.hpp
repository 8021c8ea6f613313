#pragma once

#include <string>

#include "mrgark/integrator.hpp"
#include "mrgark/monotonicity.hpp"
#include "mrgark/order.hpp"
#include "mrgark/stability.hpp"
#include "mrgark/tableau.hpp"

namespace mrgark {

/// Scheme file format: {"fast": {"A": [[..]], "b": [..], "c"?: [..]},
/// "slow": {..}, "M": int, "couplings_fs": [[[..]]], "couplings_sf": [[[..]]]}.
/// Matrix entries are numbers or rational strings "p/q".
std::string scheme_to_json(const MrGarkScheme& scheme, int indent = 2);
MrGarkScheme scheme_from_json(const std::string& text);
MrGarkScheme load_scheme_file(const std::string& path);
void save_scheme_file(const MrGarkScheme& scheme, const std::string& path, int indent = 2);

std::string order_report_to_json(const OrderReport& report, int indent = -1);
std::string stability_report_to_json(const StabilityReport& report, int indent = -1);
std::string monotonicity_report_to_json(const MonotonicityReport& report, int indent = -1);

std::string trajectory_to_csv(const Trajectory& traj);
std::string trajectory_to_json(const Trajectory& traj, int indent = -1);

}  // namespace mrgark
