#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

#include "grassflow/core.hpp"

namespace grassflow {

/// The constraint phi(x) = |x|^2 - 1 + epsilon * psi(x) with cached gradient
/// and Hessian polynomials of psi.
class ConstraintSurface {
public:
    explicit ConstraintSurface(Deformation d);

    const Deformation& deformation() const { return def_; }
    int dim() const { return def_.n; }

    double phi(const Eigen::VectorXd& x) const;
    Eigen::VectorXd grad(const Eigen::VectorXd& x) const;      // 2x + eps * grad psi
    Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;   // 2I + eps * hess psi
    double psi(const Eigen::VectorXd& x) const;
    Eigen::VectorXd psi_grad(const Eigen::VectorXd& x) const;

private:
    Deformation def_;
    std::vector<Polynomial> dpsi_;                 // n first partials
    std::vector<std::vector<Polynomial>> d2psi_;   // upper-triangle second partials
};

struct IntegratorSettings {
    double dt = 2.0 * M_PI * 1e-3;     // default: 1e-3 revolutions
    int sample_stride = 1;             // record every k-th step
    double projection_tol = 1e-12;
    int max_projection_iters = 50;
    bool record_momentum = false;
};

struct DriftStats {
    double max_abs_phi = 0.0;        // post-projection |phi|
    double max_tangency = 0.0;       // post-projection |grad phi . v|
    double max_speed_defect = 0.0;   // post-projection ||v|^2 - 1|
    double max_step_defect = 0.0;    // largest pre-projection |phi| seen after a raw step
};

struct GeodesicTrajectory {
    std::vector<ParticleState> samples;
    double epsilon = 0.0;
    std::string psi_text;
    IntegratorSettings settings;
    DriftStats drift;
    long steps = 0;
};

/// Exact multiplier lambda = -(v . H_phi v) / |grad phi|^2, which keeps
/// d^2 phi / dt^2 = 0 along x'' = lambda grad phi.
double lagrange_multiplier(const ParticleState& s, const ConstraintSurface& c);

/// (x', v') = (v, lambda grad phi).
std::pair<Eigen::VectorXd, Eigen::VectorXd> geodesic_rhs(const ParticleState& s,
                                                         const ConstraintSurface& c);

/// Instantaneous momentum drift l'_ij = eps * lambda * (x_i d_j - x_j d_i) psi.
SkewMatrix momentum_rhs_exact(const ParticleState& s, const ConstraintSurface& c);

/// Project a raw (x, v) onto the constraint manifold: Newton-project x along
/// grad phi, remove the normal component of v, renormalize |v| = 1.
ParticleState prepare_state(const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                            const ConstraintSurface& c,
                            double tol = 1e-12, int max_iters = 50);

/// RK4 on ambient (x, v) with per-step reprojection onto the constraint,
/// tangent space, and unit speed.
GeodesicTrajectory integrate_geodesic(const ParticleState& s0, const ConstraintSurface& c,
                                      double T, const IntegratorSettings& settings = {});

}  // namespace grassflow
