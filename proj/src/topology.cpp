#include "grassflow/topology.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <thread>
#include <cmath>

namespace grassflow {

namespace {

constexpr double kZeroTol = 1e-12;  // deciding-quantity tolerance on unit-normalized coeffs

Eigen::Vector3d unit_coeffs(const Eigen::Vector3d& c) {
    const double norm = c.norm();
    if (norm == 0.0) fail(errc::degenerate_surface, "all deformation coefficients vanish");
    return c / norm;
}

Eigen::Vector3d bilinear_forms(const Eigen::Vector3d& e) {
    const double p12 = e[0] * e[1], p23 = e[1] * e[2], p31 = e[2] * e[0];
    return Eigen::Vector3d(p12 - p23 + p31, p12 + p23 - p31, -p12 + p23 + p31);
}

// Canonical antipodal representative: first nonzero coordinate positive.
Eigen::Vector3d canonical_sign(Eigen::Vector3d L) {
    for (int k = 0; k < 3; ++k) {
        if (std::abs(L[k]) > kZeroTol) {
            if (L[k] < 0.0) L = -L;
            break;
        }
    }
    return L;
}

// Local probe for singular linearizations: sign of H - H(L0) on a small
// tangent circle. A strict extremum is a center, a sign change a saddle.
Stability probe_extremum(const Eigen::Vector3d& e, const Eigen::Vector3d& L0) {
    Eigen::Vector3d t1 = L0.unitOrthogonal();
    Eigen::Vector3d t2 = L0.cross(t1);
    const double h0 = hamiltonian_quartic_n3(1.0, e, L0);
    const double delta = 1e-2;
    double lo = 0.0, hi = 0.0;
    for (int k = 0; k < 64; ++k) {
        const double a = 2.0 * M_PI * k / 64;
        const Eigen::Vector3d L = (L0 + delta * (std::cos(a) * t1 + std::sin(a) * t2)).normalized();
        const double dh = hamiltonian_quartic_n3(1.0, e, L) - h0;
        lo = std::min(lo, dh);
        hi = std::max(hi, dh);
    }
    const double noise = 1e-12 * (1.0 + std::abs(h0));
    if (hi > noise && lo < -noise) return Stability::saddle;
    if (hi > noise || lo < -noise) return Stability::center;
    return Stability::degenerate;
}

// Axis stationary point with the deciding product on the boundary: with
// e_a = 0 the Hessian is singular and the quartic terms decide, giving a
// center exactly when e_b and the axis coefficient have opposite signs.
Stability classify_axis(const Eigen::Vector3d& e, int axis, int a, int b) {
    const double q = e[a] * e[b];
    if (q > kZeroTol) return Stability::center;
    if (q < -kZeroTol) return Stability::saddle;
    const bool a_zero = std::abs(e[a]) <= kZeroTol;
    const bool b_zero = std::abs(e[b]) <= kZeroTol;
    if (a_zero == b_zero) return Stability::degenerate;
    const double r = (a_zero ? e[b] : e[a]) * e[axis];
    if (r < -kZeroTol) return Stability::center;
    if (r > kZeroTol) return Stability::saddle;
    return Stability::degenerate;
}

struct FamilySpec {
    Family family;
    Eigen::Vector3d L;
};

std::vector<FamilySpec> assemble_points(const Eigen::Vector3d& e) {
    std::vector<FamilySpec> out;
    out.push_back({Family::S1c, Eigen::Vector3d(1, 0, 0)});
    out.push_back({Family::S1b, Eigen::Vector3d(0, 1, 0)});
    out.push_back({Family::S1a, Eigen::Vector3d(0, 0, 1)});

    // Coordinate-plane family with L_m = 0: the two nonzero squares are
    // proportional to the matching coefficients.
    auto add_s2 = [&](Family fam, int u, int v) {
        if (e[u] * e[v] <= kZeroTol) return;
        const double s = e[u] + e[v];
        const double cu = std::sqrt(e[u] / s);
        const double cv = std::sqrt(e[v] / s);
        Eigen::Vector3d L = Eigen::Vector3d::Zero();
        L[u] = cu;
        L[v] = cv;
        out.push_back({fam, canonical_sign(L)});
        L[v] = -cv;
        out.push_back({fam, canonical_sign(L)});
    };
    add_s2(Family::S2a, 1, 2);
    add_s2(Family::S2b, 0, 2);
    add_s2(Family::S2c, 0, 1);

    const Eigen::Vector3d B = bilinear_forms(e);
    if (B.minCoeff() > kZeroTol) {
        const double D = B.sum();
        const double a = std::sqrt(B[0] / D);
        const double b = std::sqrt(B[1] / D);
        const double c = std::sqrt(B[2] / D);
        for (int sb : {1, -1})
            for (int sc : {1, -1})
                out.push_back({Family::S3, Eigen::Vector3d(a, sb * b, sc * c)});
    }
    return out;
}

PortraitType type_from_conditions(const Eigen::Vector3d& e) {
    int zeros = 0;
    int zero_at = -1;
    for (int k = 0; k < 3; ++k)
        if (std::abs(e[k]) <= kZeroTol) {
            ++zeros;
            zero_at = k;
        }
    if (zeros >= 2) return PortraitType::boundary;
    if (zeros == 1) {
        const int u = (zero_at + 1) % 3, v = (zero_at + 2) % 3;
        return e[u] * e[v] < 0.0 ? PortraitType::IV : PortraitType::III;
    }
    const double p12 = e[0] * e[1], p23 = e[1] * e[2], p31 = e[2] * e[0];
    if (p12 < 0.0 || p23 < 0.0 || p31 < 0.0) return PortraitType::III;
    const Eigen::Vector3d B = bilinear_forms(e);
    if (B.cwiseAbs().minCoeff() <= kZeroTol) return PortraitType::boundary;
    return B.minCoeff() > 0.0 ? PortraitType::I : PortraitType::II;
}

}  // namespace

const char* stability_name(Stability s) {
    switch (s) {
        case Stability::center: return "center";
        case Stability::saddle: return "saddle";
        case Stability::degenerate: return "degenerate";
    }
    return "?";
}

const char* family_name(Family f) {
    switch (f) {
        case Family::S1a: return "S1a";
        case Family::S1b: return "S1b";
        case Family::S1c: return "S1c";
        case Family::S2a: return "S2a";
        case Family::S2b: return "S2b";
        case Family::S2c: return "S2c";
        case Family::S3: return "S3";
    }
    return "?";
}

const char* portrait_type_name(PortraitType t) {
    switch (t) {
        case PortraitType::I: return "I";
        case PortraitType::II: return "II";
        case PortraitType::III: return "III";
        case PortraitType::IV: return "IV";
        case PortraitType::boundary: return "boundary";
    }
    return "?";
}

Stability classify_stationary(const Eigen::Vector3d& coeffs, const StationaryPoint& p) {
    const Eigen::Vector3d e = unit_coeffs(coeffs);
    switch (p.family) {
        case Family::S1a: return classify_axis(e, 2, 0, 1);
        case Family::S1b: return classify_axis(e, 1, 2, 0);
        case Family::S1c: return classify_axis(e, 0, 1, 2);
        case Family::S2a:
        case Family::S2b:
        case Family::S2c: {
            const Eigen::Vector3d B = bilinear_forms(e);
            const int m = p.family == Family::S2a ? 0 : (p.family == Family::S2b ? 1 : 2);
            if (B[m] < -kZeroTol) return Stability::center;
            if (B[m] > kZeroTol) return Stability::saddle;
            return Stability::degenerate;
        }
        case Family::S3: return Stability::center;
    }
    return Stability::degenerate;
}

std::vector<StationaryPoint> stationary_points_n3(const Eigen::Vector3d& coeffs) {
    const Eigen::Vector3d e = unit_coeffs(coeffs);
    std::vector<StationaryPoint> out;
    for (const FamilySpec& spec : assemble_points(e)) {
        StationaryPoint p;
        p.L = spec.L;
        p.family = spec.family;
        p.rhs_norm = hamiltonian_quartic_n3_grad(1.0, e, p.L).cross(p.L).norm();
        p.stability = classify_stationary(e, p);
        out.push_back(p);
    }
    return out;
}

Linearization linearize_on_sphere(const Eigen::Vector3d& coeffs, const Eigen::Vector3d& L0) {
    const Eigen::Vector3d e = unit_coeffs(coeffs);
    Eigen::Vector3d rho, T;
    const double L2 = L0.squaredNorm();
    for (int k = 0; k < 3; ++k) rho[k] = L2 - L0[k] * L0[k];
    const double S = e.dot(rho);
    for (int a = 0; a < 3; ++a) T[a] = S - e[a] * rho[a];

    // Hessian of H (vector form, eps = 1).
    Eigen::Matrix3d hess;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            double dT;  // dT_a / dL_b
            if (a == b) {
                dT = 2.0 * L0[a] * (e.sum() - e[a]);
            } else {
                double s = 0.0;
                for (int k = 0; k < 3; ++k)
                    if (k != a && k != b) s += e[k];
                dT = 2.0 * L0[b] * s;
            }
            hess(a, b) = 1.5 * ((a == b ? T[a] : 0.0) + L0[a] * dT);
        }

    const Eigen::Vector3d grad = hamiltonian_quartic_n3_grad(1.0, e, L0);
    Eigen::Vector3d t1 = L0.unitOrthogonal();
    Eigen::Vector3d t2 = L0.cross(t1);

    // DF(L0) column along d: (Hess d) x L0 + grad H x d.
    auto column = [&](const Eigen::Vector3d& d) {
        return (hess * d).cross(L0) + grad.cross(d);
    };
    Linearization lin;
    const Eigen::Vector3d c1 = column(t1);
    const Eigen::Vector3d c2 = column(t2);
    lin.jacobian << t1.dot(c1), t1.dot(c2), t2.dot(c1), t2.dot(c2);
    lin.det = lin.jacobian.determinant();
    lin.trace = lin.jacobian.trace();
    return lin;
}

Stability classify_by_linearization(const Eigen::Vector3d& coeffs, const Eigen::Vector3d& L0) {
    const Eigen::Vector3d e = unit_coeffs(coeffs);
    const Linearization lin = linearize_on_sphere(e, L0);
    // The local probe is only for genuinely singular linearizations (exact
    // zeros in the parameters); anything merely close to a boundary keeps
    // the eigenvalue-pattern label.
    const double scale = lin.jacobian.squaredNorm();
    if (std::abs(lin.det) > 1e-12 * std::max(1e-30, scale))
        return lin.det > 0.0 ? Stability::center : Stability::saddle;
    return probe_extremum(e, L0);
}

PortraitReport phase_portrait_type(const Eigen::Vector3d& coeffs) {
    const Eigen::Vector3d e = unit_coeffs(coeffs);
    PortraitReport report;
    report.coeffs = coeffs;
    report.type = type_from_conditions(e);
    report.points = stationary_points_n3(e);
    for (const StationaryPoint& p : report.points) {
        if (p.stability == Stability::center) ++report.centers;
        if (p.stability == Stability::saddle) ++report.saddles;
    }
    return report;
}

std::vector<ScanRow> portrait_scan(int resolution, int threads) {
    if (resolution < 2) fail(errc::invalid_argument, "portrait_scan: resolution must be >= 2");
    if (threads < 1) fail(errc::invalid_argument, "portrait_scan: threads must be >= 1");
    const int nphi = 4 * resolution;
    std::vector<ScanRow> rows(static_cast<size_t>(resolution + 1) * nphi);
    auto fill_band = [&](int i0, int i1) {
        for (int i = i0; i < i1; ++i) {
            const double theta = 0.5 * M_PI * i / resolution;
            for (int j = 0; j < nphi; ++j) {
                const double phi = 2.0 * M_PI * j / nphi;
                const Eigen::Vector3d e(std::sin(theta) * std::cos(phi),
                                        std::sin(theta) * std::sin(phi), std::cos(theta));
                ScanRow& row = rows[static_cast<size_t>(i) * nphi + j];
                row.e1 = e[0];
                row.e2 = e[1];
                row.e3 = e[2];
                row.type = type_from_conditions(unit_coeffs(e));
            }
        }
    };
    if (threads == 1) {
        fill_band(0, resolution + 1);
        return rows;
    }
    std::vector<std::thread> pool;
    const int total = resolution + 1;
    const int band = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const int i0 = t * band;
        const int i1 = std::min(total, i0 + band);
        if (i0 >= i1) break;
        pool.emplace_back(fill_band, i0, i1);
    }
    for (std::thread& th : pool) th.join();
    return rows;
}

AxisymmetricReport axisymmetric_check(const ReducedTrajectory& traj) {
    if (!traj.samples.empty() && traj.samples.front().l.n != 4)
        fail(errc::dimension_mismatch, "axisymmetric_check: n != 4 trajectory");
    AxisymmetricReport r;
    r.l34_drift = traj.max_l34_drift;
    r.H_drift_rel = traj.max_H_drift_rel;
    return r;
}

std::vector<SectionPoint> poincare_section(const ReducedTrajectory& traj, int coord, double level,
                                           int direction) {
    std::vector<SectionPoint> out;
    if (traj.samples.size() < 2) return out;
    const int n = traj.samples.front().l.n;
    if (coord < 0 || coord >= pair_count(n))
        fail(errc::invalid_index, "poincare_section: coordinate out of range");
    const double norm0 = traj.samples.front().l.comps.norm();
    for (size_t k = 0; k + 1 < traj.samples.size(); ++k) {
        const double ga = traj.samples[k].l.comps[coord] - level;
        const double gb = traj.samples[k + 1].l.comps[coord] - level;
        const bool crossing = direction >= 0 ? (ga < 0.0 && gb >= 0.0) : (ga > 0.0 && gb <= 0.0);
        if (!crossing) continue;
        const double w = ga / (ga - gb);
        SectionPoint p;
        p.t = (1.0 - w) * traj.samples[k].t + w * traj.samples[k + 1].t;
        p.l = SkewMatrix(n, (1.0 - w) * traj.samples[k].l.comps + w * traj.samples[k + 1].l.comps);
        // Interpolation leaves the invariant set at second order; pull the
        // point back before reporting.
        if (n >= 4) p.l = project_rank2(p.l);
        const double norm = p.l.comps.norm();
        if (norm > 0.0) p.l.comps *= norm0 / norm;
        out.push_back(p);
    }
    return out;
}

double dimension_proxy(const std::vector<SectionPoint>& points, int k) {
    // Scaling of the mean k-th-neighbor distance: r_k ~ k^(1/d), estimated by
    // regressing the pooled mean log distance on log k over orders 2..k.
    // Unlike likelihood estimators this is unbiased for the nearly regular
    // spacing that quasi-periodic crossings produce.
    const int m = static_cast<int>(points.size());
    if (k < 4 || m < k + 2) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> mean_log(k, 0.0);
    long used = 0;
    std::vector<double> dist(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) dist[j] = (points[i].l.comps - points[j].l.comps).norm();
        dist[i] = std::numeric_limits<double>::infinity();
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        if (dist[0] <= 0.0) continue;  // duplicate point, no information
        for (int j = 0; j < k; ++j) mean_log[j] += std::log(dist[j]);
        ++used;
    }
    if (used == 0) return std::numeric_limits<double>::quiet_NaN();
    // least squares of mean_log[j] against log(j+1) for orders 2..k
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int npts = 0;
    for (int j = 1; j < k; ++j) {
        const double x = std::log(static_cast<double>(j + 1));
        const double y = mean_log[j] / used;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++npts;
    }
    const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    if (!(slope > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return 1.0 / slope;
}

}  // namespace grassflow
