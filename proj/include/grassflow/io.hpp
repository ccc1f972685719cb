#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "grassflow/core.hpp"
#include "grassflow/geodesic.hpp"
#include "grassflow/liepoisson.hpp"
#include "grassflow/topology.hpp"

namespace grassflow::io {

/// Floats are emitted with 17 significant digits so round-trips are exact.
std::string format_double(double v);

nlohmann::json skew_to_json(const SkewMatrix& l);
SkewMatrix skew_from_json(const nlohmann::json& j);

nlohmann::json deformation_to_json(const Deformation& d);
Deformation deformation_from_json(const nlohmann::json& j);

/// Trajectory CSV: header t,x_0..x_{n-1},v_0..v_{n-1}[,l_i_j...].
std::string trajectory_csv(const GeodesicTrajectory& traj, bool momentum_columns);

/// Reduced CSV: header t,l_0_1,...,l_{n-2}_{n-1},H,l2,plucker_max[,l_2_3].
std::string reduced_csv(const ReducedTrajectory& traj);

std::string scan_csv(const std::vector<ScanRow>& rows);
std::string section_csv(const std::vector<SectionPoint>& points);

nlohmann::json portrait_to_json(const PortraitReport& report);
nlohmann::json drift_report_to_json(const DriftReport& report);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    int column(const std::string& name) const;  // -1 if absent
};
CsvTable read_csv(const std::string& path);

/// Write via temp file + rename so readers never observe partial output.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace grassflow::io
