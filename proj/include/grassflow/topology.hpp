#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "grassflow/liepoisson.hpp"

namespace grassflow {

enum class Stability { center, saddle, degenerate };
const char* stability_name(Stability s);

/// Stationary-point families of the reduced n = 3 quartic system.
/// S1a/b/c: axis points with L_3 / L_2 / L_1 the nonzero component.
/// S2a/b/c: coordinate-plane points with L_1 / L_2 / L_3 = 0.
/// S3: points with all components nonzero.
enum class Family { S1a, S1b, S1c, S2a, S2b, S2c, S3 };
const char* family_name(Family f);

struct StationaryPoint {
    Eigen::Vector3d L;      // |L| = 1, first nonzero coordinate positive
    Family family;
    Stability stability = Stability::degenerate;
    double rhs_norm = 0.0;  // |reduced flow| at the point (diagnostic)
};

enum class PortraitType { I, II, III, IV, boundary };
const char* portrait_type_name(PortraitType t);

struct PortraitReport {
    Eigen::Vector3d coeffs;
    PortraitType type = PortraitType::boundary;
    std::vector<StationaryPoint> points;
    int centers = 0;
    int saddles = 0;
};

/// All stationary points of the reduced flow for psi = sum c_k x_k^4 on the
/// sphere |L| = 1, one representative per antipodal pair.
std::vector<StationaryPoint> stationary_points_n3(const Eigen::Vector3d& coeffs);

/// Center/saddle label from the classification inequalities; a deciding
/// quantity within 1e-12 of zero escalates to a higher-order local test of H
/// (strict extremum on a small tangent circle), and is degenerate only when
/// that is inconclusive.
Stability classify_stationary(const Eigen::Vector3d& coeffs, const StationaryPoint& p);

/// Independent stability label from the linearized flow on the sphere
/// (analytic Jacobian of grad H x L in tangent-plane coordinates); singular
/// Hessian cases fall back to the same local extremum probe.
Stability classify_by_linearization(const Eigen::Vector3d& coeffs, const Eigen::Vector3d& L0);

/// Eigenvalue data of the on-sphere linearization (for inspection/tests).
struct Linearization {
    Eigen::Matrix2d jacobian;
    double det = 0.0;
    double trace = 0.0;
};
Linearization linearize_on_sphere(const Eigen::Vector3d& coeffs, const Eigen::Vector3d& L0);

/// Full phase-portrait classification: type from the sign pattern of the
/// coefficients and of B1 = c1c2 - c2c3 + c3c1, B2 = c1c2 + c2c3 - c3c1,
/// B3 = -c1c2 + c2c3 + c3c1, plus the assembled point list.
PortraitReport phase_portrait_type(const Eigen::Vector3d& coeffs);

struct ScanRow {
    double e1, e2, e3;
    PortraitType type;
};

/// Type per unit-normalized coefficient direction on a hemisphere grid
/// (polar angle from +e3 in [0, pi/2], azimuth in [0, 2pi)).
std::vector<ScanRow> portrait_scan(int resolution, int threads = 1);

struct AxisymmetricReport {
    double l34_drift = 0.0;
    double H_drift_rel = 0.0;
};

/// Drift of the l_34 component (0-based l_2_3) and of H along an n = 4
/// reduced trajectory.
AxisymmetricReport axisymmetric_check(const ReducedTrajectory& traj);

struct SectionPoint {
    double t = 0.0;
    SkewMatrix l;
};

/// Crossings of the hyperplane comps[coord] = level in the requested
/// direction (+1: increasing, -1: decreasing), linearly interpolated between
/// samples and re-projected onto the invariant set.
std::vector<SectionPoint> poincare_section(const ReducedTrajectory& traj, int coord,
                                           double level, int direction);

/// Nearest-neighbor intrinsic-dimension estimate of a crossing point set
/// (scaling exponent of the mean k-th-neighbor distance, orders 2..k);
/// ~1 for curve-like sets, ~2 for region-like ones.
double dimension_proxy(const std::vector<SectionPoint>& points, int k = 16);

}  // namespace grassflow
