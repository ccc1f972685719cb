#include "grassflow/liepoisson.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace grassflow {

namespace {

// Adds c * l_ab (arbitrary index order, a != b) to a linear form over the
// upper-triangle components.
void add_signed(LinearForm& form, int a, int b, double c, int n) {
    if (a == b || c == 0.0) return;
    if (a < b)
        form[pair_index(a, b, n)] += c;
    else
        form[pair_index(b, a, n)] -= c;
}

}  // namespace

LinearForm bracket_basis(int i, int j, int p, int q, int n) {
    if (i >= j || p >= q) fail(errc::invalid_index, "bracket_basis: need i < j and p < q");
    if (i < 0 || j >= n || p < 0 || q >= n) fail(errc::invalid_index, "bracket_basis: index out of range");
    LinearForm form = LinearForm::Zero(pair_count(n));
    // {l_ij, l_pq} = d_ip l_jq + d_jp l_qi + d_iq l_pj + d_jq l_ip
    if (i == p) add_signed(form, j, q, 1.0, n);
    if (j == p) add_signed(form, q, i, 1.0, n);
    if (i == q) add_signed(form, p, j, 1.0, n);
    if (j == q) add_signed(form, i, p, 1.0, n);
    return form;
}

BracketTable::BracketTable(int dim) : n(dim) {
    const int m = pair_count(n);
    forms.resize(m);
    for (int A = 0; A < m; ++A) {
        forms[A].reserve(m);
        const auto [i, j] = pair_from_index(A, n);
        for (int B = 0; B < m; ++B) {
            const auto [p, q] = pair_from_index(B, n);
            forms[A].push_back(bracket_basis(i, j, p, q, n));
        }
    }
}

Eigen::MatrixXd StructureConstants::basis_matrix(int i, int j, int n) {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
    E(i, j) = -1.0;
    E(j, i) = 1.0;
    return E;
}

double StructureConstants::operator()(int i, int j, int p, int q, int a, int b) const {
    auto d = [](int u, int v) { return u == v ? 1.0 : 0.0; };
    return 0.5 * (d(i, p) * (d(a, j) * d(b, q) - d(a, q) * d(b, j)) +
                  d(j, p) * (d(a, q) * d(b, i) - d(a, i) * d(b, q)) +
                  d(i, q) * (d(a, p) * d(b, j) - d(a, j) * d(b, p)) +
                  d(j, q) * (d(a, i) * d(b, p) - d(a, p) * d(b, i)));
}

MomentumFunction MomentumFunction::coordinate(int i, int j, int n) {
    const int k = pair_index(i, j, n);
    MomentumFunction f;
    f.value = [k](const SkewMatrix& l) { return l.comps[k]; };
    f.gradient = [k, n](const SkewMatrix& l) {
        SkewMatrix g(l.n);
        if (l.n != n) fail(errc::dimension_mismatch, "coordinate function: dimension mismatch");
        g.comps[k] = 1.0;
        return g;
    };
    return f;
}

MomentumFunction MomentumFunction::from_polynomial(Polynomial p, int n) {
    if (p.nvars() != pair_count(n))
        fail(errc::dimension_mismatch, "from_polynomial: poly vars != pair count");
    auto shared = std::make_shared<Polynomial>(std::move(p));
    std::vector<Polynomial> partials;
    for (int k = 0; k < shared->nvars(); ++k) partials.push_back(shared->partial(k));
    auto shared_partials = std::make_shared<std::vector<Polynomial>>(std::move(partials));
    MomentumFunction f;
    f.value = [shared](const SkewMatrix& l) { return shared->eval(l.comps); };
    f.gradient = [shared_partials](const SkewMatrix& l) {
        SkewMatrix g(l.n);
        for (size_t k = 0; k < shared_partials->size(); ++k)
            g.comps[static_cast<int>(k)] = (*shared_partials)[k].eval(l.comps);
        return g;
    };
    return f;
}

MomentumFunction MomentumFunction::numeric(std::function<double(const SkewMatrix&)> fn, int /*n*/,
                                           double fd_step, bool reproject_rank2) {
    MomentumFunction f;
    f.value = fn;
    f.gradient = [fn, fd_step, reproject_rank2](const SkewMatrix& l) {
        SkewMatrix g(l.n);
        for (int k = 0; k < l.comps.size(); ++k) {
            SkewMatrix lp = l, lm = l;
            lp.comps[k] += fd_step;
            lm.comps[k] -= fd_step;
            if (reproject_rank2) {
                lp = project_rank2(lp);
                lm = project_rank2(lm);
            }
            g.comps[k] = (fn(lp) - fn(lm)) / (2.0 * fd_step);
        }
        return g;
    };
    return f;
}

namespace {

// [A, B] for the skew matrices A = l, B = grad; the Hamiltonian field in
// component form is l'_ij = [L, M]_ij with M_ij = dH/dl_ij antisymmetrized.
SkewMatrix commutator_upper(const SkewMatrix& l, const SkewMatrix& m) {
    const Eigen::MatrixXd L = l.to_matrix();
    const Eigen::MatrixXd M = m.to_matrix();
    const Eigen::MatrixXd C = L * M - M * L;
    return SkewMatrix::from_matrix(C, 1e-9 * (1.0 + C.cwiseAbs().maxCoeff()));
}

}  // namespace

double bracket_of_functions(const MomentumFunction& F, const MomentumFunction& G,
                            const SkewMatrix& l) {
    const SkewMatrix gF = F.gradient(l);
    const SkewMatrix gG = G.gradient(l);
    const SkewMatrix field = commutator_upper(l, gG);
    return gF.comps.dot(field.comps);
}

SkewMatrix reduced_rhs(const ReducedHamiltonian& H, const SkewMatrix& l) {
    if (H.dim() != l.n) fail(errc::dimension_mismatch, "reduced_rhs: dimension mismatch");
    return commutator_upper(l, H.gradient(l));
}

std::vector<NamedValue> casimirs(const SkewMatrix& l) {
    std::vector<NamedValue> out;
    out.push_back({"l2", l.full_square_sum()});
    if (l.n == 4) {
        const double C = l(0, 1) * l(2, 3) - l(0, 2) * l(1, 3) + l(0, 3) * l(1, 2);
        out.push_back({"plucker_C", C});
    } else if (l.n > 4) {
        const Eigen::VectorXd res = plucker_residuals(l);
        for (int k = 0; k < res.size(); ++k)
            out.push_back({"plucker_" + std::to_string(k), res[k]});
    }
    return out;
}

SkewMatrix project_rank2(const SkewMatrix& l, double tie_tol) {
    if (l.n <= 3) {
        // Any 3x3 antisymmetric matrix already has rank <= 2.
        return l;
    }
    const Eigen::MatrixXd A = l.to_matrix();
    // S = A^T A is symmetric PSD with doubled eigenvalues theta_k^2, one pair
    // per 2x2 spectral block of A.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A);
    const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
    const int n = l.n;
    const double top = ev[n - 1];
    if (top <= 0.0) return SkewMatrix(n);  // zero matrix
    // Leading block theta_1^2 occupies the top two eigenvalues; the next
    // block starts at ev[n-3]. A tie between blocks leaves the projection
    // undefined.
    const double theta1 = std::sqrt(std::max(0.0, ev[n - 1]));
    const double theta2 = n >= 4 ? std::sqrt(std::max(0.0, ev[n - 3])) : 0.0;
    if (theta1 - theta2 <= tie_tol * theta1)
        fail(errc::ambiguous_projection, "project_rank2: leading blocks tie");
    const Eigen::MatrixXd V = es.eigenvectors().rightCols(2);
    const Eigen::MatrixXd P = V * V.transpose();
    const Eigen::MatrixXd proj = P * A * P;
    SkewMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            out.comps[pair_index(i, j, n)] = 0.5 * (proj(i, j) - proj(j, i));
    return out;
}

ReducedTrajectory integrate_reduced(const ReducedHamiltonian& H, const SkewMatrix& l0, double T,
                                    const ReducedIntegratorSettings& settings) {
    if (H.dim() != l0.n) fail(errc::dimension_mismatch, "integrate_reduced: dimension mismatch");
    if (T < 0.0 || settings.dt <= 0.0)
        fail(errc::invalid_argument, "integrate_reduced: need T >= 0 and dt > 0");

    ReducedTrajectory traj;
    traj.H0 = H.value(l0);
    traj.l2_0 = l0.full_square_sum();
    const double l2_scale = std::max(1.0, std::abs(traj.l2_0));
    const double H_scale = std::max(1e-30, std::abs(traj.H0));
    const double comps_norm0 = l0.comps.norm();
    const int n = l0.n;
    const long nsteps = static_cast<long>(std::ceil(T / settings.dt - 1e-12));

    SkewMatrix l = l0;
    const double l23_0 = n == 4 ? l(2, 3) : 0.0;

    auto audit = [&](double t, const SkewMatrix& cur, bool record) {
        const double h = H.value(cur);
        const double l2 = cur.full_square_sum();
        const Eigen::VectorXd res = plucker_residuals(cur);
        const double pmax = res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
        traj.max_H_drift_rel = std::max(traj.max_H_drift_rel, std::abs(h - traj.H0) / H_scale);
        traj.max_l2_drift_rel = std::max(traj.max_l2_drift_rel, std::abs(l2 - traj.l2_0) / l2_scale);
        traj.max_plucker = std::max(traj.max_plucker, pmax);
        if (n == 4)
            traj.max_l34_drift = std::max(traj.max_l34_drift, std::abs(cur(2, 3) - l23_0));
        if (record) traj.samples.push_back({t, cur, h, l2, pmax});
    };

    // Stationary start: emit a constant trajectory instead of integrating noise.
    if (reduced_rhs(H, l).comps.norm() < settings.stationary_tol) {
        traj.stationary = true;
        audit(0.0, l, true);
        audit(T, l, true);
        return traj;
    }

    audit(0.0, l, true);

    Eigen::VectorXd k1, k2, k3, k4;
    SkewMatrix tmp(n);
    double t = 0.0;
    for (long step = 0; step < nsteps; ++step) {
        const double dt = std::min(settings.dt, T - t);
        auto rhs = [&](const Eigen::VectorXd& c) {
            tmp.comps = c;
            return reduced_rhs(H, tmp).comps;
        };
        k1 = rhs(l.comps);
        k2 = rhs(l.comps + 0.5 * dt * k1);
        k3 = rhs(l.comps + 0.5 * dt * k2);
        k4 = rhs(l.comps + dt * k3);
        l.comps += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;

        if (settings.project && n >= 4) l = project_rank2(l);
        if (settings.renormalize) {
            const double norm = l.comps.norm();
            if (norm < settings.rank_floor)
                fail(errc::rank_collapse, "integrate_reduced: momentum collapsed");
            l.comps *= comps_norm0 / norm;
        }
        if (n >= 4) {
            // Rank-collapse guard: the second block magnitude after projection
            // is bounded by the projection residual; the dominant one must
            // stay well away from zero.
            if (l.comps.norm() < settings.rank_floor)
                fail(errc::rank_collapse, "integrate_reduced: dominant block vanished");
        }

        audit(t, l, (step + 1) % settings.sample_stride == 0 || step + 1 == nsteps);
    }
    traj.steps = nsteps;
    return traj;
}

DriftReport compare_full_vs_reduced(const Deformation& d, const ParticleState& s0, double T,
                                    const CompareSettings& settings) {
    if (d.epsilon > 0.05)
        fail(errc::invalid_argument, "compare_full_vs_reduced: epsilon above the averaging regime (0.05)");
    if (settings.samples < 2) fail(errc::invalid_argument, "compare: need >= 2 samples");

    const ConstraintSurface surface(d);
    const ParticleState start = prepare_state(s0.x, s0.v, surface);

    // Full flow, sampling the momentum at (roughly) the comparison times.
    IntegratorSettings gset;
    gset.dt = settings.dt_full;
    const long steps_per_sample =
        std::max<long>(1, static_cast<long>(std::llround(T / settings.samples / gset.dt)));
    gset.sample_stride = static_cast<int>(steps_per_sample);
    const GeodesicTrajectory full = integrate_geodesic(start, surface, T, gset);

    // Matched reduced flow on the scaled clock.
    const SkewMatrix l0 = momentum_from_state(start).plane_normalized();
    const auto H = hamiltonian_for_deformation(d, settings.quadrature_nodes);
    ReducedIntegratorSettings rset;
    rset.dt = settings.dt_reduced;
    const ReducedTrajectory reduced = integrate_reduced(*H, l0, settings.kappa * T, rset);

    // Deviation of unit-normalized momenta, reduced samples interpolated to
    // the full-flow sample times.
    auto reduced_at = [&](double tau) -> Eigen::VectorXd {
        if (reduced.stationary || reduced.samples.size() < 2)
            return reduced.samples.front().l.comps;
        const double dt = rset.dt;
        const size_t k = std::min(reduced.samples.size() - 2, static_cast<size_t>(tau / dt));
        const ReducedSample& a = reduced.samples[k];
        const ReducedSample& b = reduced.samples[k + 1];
        const double w = (tau - a.t) / (b.t - a.t);
        return (1.0 - w) * a.l.comps + w * b.l.comps;
    };

    DriftReport report;
    report.epsilon = d.epsilon;
    report.T = T;
    report.kappa = settings.kappa;
    for (const ParticleState& s : full.samples) {
        const Eigen::VectorXd lf = momentum_from_state(s).comps.normalized();
        const Eigen::VectorXd lr = reduced_at(settings.kappa * s.t).normalized();
        report.sup_deviation = std::max(report.sup_deviation, (lf - lr).cwiseAbs().maxCoeff());
        ++report.samples;
    }
    return report;
}

}  // namespace grassflow
