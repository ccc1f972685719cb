#include "grassflow/geodesic.hpp"

#include <cmath>

namespace grassflow {

ConstraintSurface::ConstraintSurface(Deformation d) : def_(std::move(d)) {
    const int n = def_.n;
    dpsi_.reserve(n);
    for (int i = 0; i < n; ++i) dpsi_.push_back(def_.psi.partial(i));
    d2psi_.resize(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) d2psi_[i].push_back(dpsi_[i].partial(j));
}

double ConstraintSurface::psi(const Eigen::VectorXd& x) const { return def_.psi.eval(x); }

Eigen::VectorXd ConstraintSurface::psi_grad(const Eigen::VectorXd& x) const {
    const int n = def_.n;
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g[i] = dpsi_[i].eval(x);
    return g;
}

double ConstraintSurface::phi(const Eigen::VectorXd& x) const {
    return x.squaredNorm() - 1.0 + def_.epsilon * def_.psi.eval(x);
}

Eigen::VectorXd ConstraintSurface::grad(const Eigen::VectorXd& x) const {
    return 2.0 * x + def_.epsilon * psi_grad(x);
}

Eigen::MatrixXd ConstraintSurface::hessian(const Eigen::VectorXd& x) const {
    const int n = def_.n;
    Eigen::MatrixXd h = 2.0 * Eigen::MatrixXd::Identity(n, n);
    if (def_.epsilon != 0.0) {
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double v = def_.epsilon * d2psi_[i][j - i].eval(x);
                h(i, j) += v;
                if (j != i) h(j, i) += v;
            }
    }
    return h;
}

double lagrange_multiplier(const ParticleState& s, const ConstraintSurface& c) {
    const Eigen::VectorXd g = c.grad(s.x);
    const double g2 = g.squaredNorm();
    if (std::sqrt(g2) <= 1e-8)
        fail(errc::singular_constraint, "lagrange_multiplier: |grad phi| vanishes");
    return -s.v.dot(c.hessian(s.x) * s.v) / g2;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> geodesic_rhs(const ParticleState& s,
                                                         const ConstraintSurface& c) {
    const double lambda = lagrange_multiplier(s, c);
    return {s.v, lambda * c.grad(s.x)};
}

SkewMatrix momentum_rhs_exact(const ParticleState& s, const ConstraintSurface& c) {
    const double lambda = lagrange_multiplier(s, c);
    const Eigen::VectorXd dpsi = c.psi_grad(s.x);
    const int n = c.dim();
    SkewMatrix out(n);
    const double eps = c.deformation().epsilon;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            out.comps[pair_index(i, j, n)] = eps * lambda * (s.x[i] * dpsi[j] - s.x[j] * dpsi[i]);
    return out;
}

namespace {

// Newton projection of x onto phi = 0 along grad phi.
void project_position(Eigen::VectorXd& x, const ConstraintSurface& c, double tol, int max_iters) {
    for (int it = 0; it < max_iters; ++it) {
        const double f = c.phi(x);
        if (std::abs(f) <= tol) return;
        const Eigen::VectorXd g = c.grad(x);
        const double g2 = g.squaredNorm();
        if (std::sqrt(g2) <= 1e-8)
            fail(errc::singular_constraint, "projection: |grad phi| vanishes");
        x -= (f / g2) * g;
    }
    fail(errc::constraint_drift, "projection did not converge");
}

void project_velocity(Eigen::VectorXd& v, const Eigen::VectorXd& x, const ConstraintSurface& c) {
    const Eigen::VectorXd g = c.grad(x);
    v -= (g.dot(v) / g.squaredNorm()) * g;
    const double speed = v.norm();
    if (speed == 0.0) fail(errc::invalid_argument, "velocity projects to zero");
    v /= speed;
}

}  // namespace

ParticleState prepare_state(const Eigen::VectorXd& x0, const Eigen::VectorXd& v0,
                            const ConstraintSurface& c, double tol, int max_iters) {
    if (x0.size() != c.dim() || v0.size() != c.dim())
        fail(errc::dimension_mismatch, "prepare_state: dimension mismatch");
    ParticleState s;
    s.x = x0;
    project_position(s.x, c, tol, max_iters);
    s.v = v0;
    project_velocity(s.v, s.x, c);
    s.t = 0.0;
    return s;
}

GeodesicTrajectory integrate_geodesic(const ParticleState& s0, const ConstraintSurface& c,
                                      double T, const IntegratorSettings& settings) {
    if (T < 0.0 || settings.dt <= 0.0)
        fail(errc::invalid_argument, "integrate_geodesic: need T >= 0 and dt > 0");

    GeodesicTrajectory traj;
    traj.epsilon = c.deformation().epsilon;
    traj.psi_text = c.deformation().psi.to_string();
    traj.settings = settings;

    const long nsteps = static_cast<long>(std::ceil(T / settings.dt - 1e-12));
    const int n = c.dim();

    ParticleState s = s0;
    auto record = [&](const ParticleState& state) { traj.samples.push_back(state); };
    auto track_drift = [&](const ParticleState& state) {
        traj.drift.max_abs_phi = std::max(traj.drift.max_abs_phi, std::abs(c.phi(state.x)));
        traj.drift.max_tangency =
            std::max(traj.drift.max_tangency, std::abs(c.grad(state.x).dot(state.v)));
        traj.drift.max_speed_defect =
            std::max(traj.drift.max_speed_defect, std::abs(state.v.squaredNorm() - 1.0));
    };

    record(s);
    track_drift(s);

    Eigen::VectorXd kx1(n), kv1(n), kx2(n), kv2(n), kx3(n), kv3(n), kx4(n), kv4(n);
    ParticleState tmp;
    tmp.x.resize(n);
    tmp.v.resize(n);

    for (long step = 0; step < nsteps; ++step) {
        const double dt = std::min(settings.dt, T - static_cast<double>(step) * settings.dt);

        auto eval = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& v, Eigen::VectorXd& kx,
                        Eigen::VectorXd& kv) {
            tmp.x = x;
            tmp.v = v;
            auto [dx, dv] = geodesic_rhs(tmp, c);
            kx = dx;
            kv = dv;
        };

        eval(s.x, s.v, kx1, kv1);
        eval(s.x + 0.5 * dt * kx1, s.v + 0.5 * dt * kv1, kx2, kv2);
        eval(s.x + 0.5 * dt * kx2, s.v + 0.5 * dt * kv2, kx3, kv3);
        eval(s.x + dt * kx3, s.v + dt * kv3, kx4, kv4);

        s.x += (dt / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4);
        s.v += (dt / 6.0) * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
        s.t += dt;

        traj.drift.max_step_defect = std::max(traj.drift.max_step_defect, std::abs(c.phi(s.x)));
        project_position(s.x, c, settings.projection_tol, settings.max_projection_iters);
        project_velocity(s.v, s.x, c);

        track_drift(s);
        if ((step + 1) % settings.sample_stride == 0 || step + 1 == nsteps) record(s);
    }
    traj.steps = nsteps;
    return traj;
}

}  // namespace grassflow
