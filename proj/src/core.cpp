#include "grassflow/core.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace grassflow {

const char* errc_name(errc c) {
    switch (c) {
        case errc::invalid_index: return "invalid_index";
        case errc::dimension_mismatch: return "dimension_mismatch";
        case errc::degenerate_plane: return "degenerate_plane";
        case errc::singular_constraint: return "singular_constraint";
        case errc::constraint_drift: return "constraint_drift";
        case errc::ambiguous_projection: return "ambiguous_projection";
        case errc::rank_collapse: return "rank_collapse";
        case errc::degenerate_surface: return "degenerate_surface";
        case errc::invalid_argument: return "invalid_argument";
        case errc::config: return "config";
        case errc::io: return "io";
    }
    return "unknown";
}

int pair_index(int i, int j, int n) {
    if (n < 2 || i < 0 || j >= n || i >= j)
        fail(errc::invalid_index, "pair_index: need 0 <= i < j < n");
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

std::pair<int, int> pair_from_index(int k, int n) {
    if (k < 0 || k >= pair_count(n)) fail(errc::invalid_index, "pair_from_index: out of range");
    int i = 0;
    int offset = 0;
    while (k >= offset + (n - i - 1)) {
        offset += n - i - 1;
        ++i;
    }
    return {i, k - offset + i + 1};
}

std::string pair_label(int i, int j) {
    std::ostringstream os;
    os << "l_" << i << "_" << j;
    return os.str();
}

SkewMatrix::SkewMatrix(int dim) : n(dim), comps(Eigen::VectorXd::Zero(pair_count(dim))) {
    if (dim < 2) fail(errc::invalid_argument, "SkewMatrix needs n >= 2");
}

SkewMatrix::SkewMatrix(int dim, Eigen::VectorXd c) : n(dim), comps(std::move(c)) {
    if (dim < 2) fail(errc::invalid_argument, "SkewMatrix needs n >= 2");
    if (comps.size() != pair_count(dim))
        fail(errc::dimension_mismatch, "SkewMatrix component count != n(n-1)/2");
}

SkewMatrix SkewMatrix::from_matrix(const Eigen::MatrixXd& m, double antisym_tol) {
    if (m.rows() != m.cols()) fail(errc::dimension_mismatch, "from_matrix: not square");
    const int n = static_cast<int>(m.rows());
    if ((m + m.transpose()).cwiseAbs().maxCoeff() > antisym_tol)
        fail(errc::invalid_argument, "from_matrix: matrix not antisymmetric");
    SkewMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.comps[pair_index(i, j, n)] = m(i, j);
    return out;
}

double SkewMatrix::operator()(int i, int j) const {
    if (i == j) return 0.0;
    if (i < j) return comps[pair_index(i, j, n)];
    return -comps[pair_index(j, i, n)];
}

void SkewMatrix::set(int i, int j, double value) {
    if (i == j) fail(errc::invalid_index, "set: diagonal element is fixed at 0");
    if (i < j)
        comps[pair_index(i, j, n)] = value;
    else
        comps[pair_index(j, i, n)] = -value;
}

Eigen::MatrixXd SkewMatrix::to_matrix() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = comps[pair_index(i, j, n)];
            m(i, j) = v;
            m(j, i) = -v;
        }
    return m;
}

bool SkewMatrix::is_normalized(double tol) const {
    return std::abs(full_square_sum() - 1.0) <= tol;
}

SkewMatrix SkewMatrix::normalized() const {
    const double s = std::sqrt(full_square_sum());
    if (s == 0.0) fail(errc::degenerate_plane, "normalized: zero matrix");
    return SkewMatrix(n, comps / s);
}

SkewMatrix SkewMatrix::plane_normalized() const {
    const double s = comps.norm();
    if (s == 0.0) fail(errc::degenerate_plane, "plane_normalized: zero matrix");
    return SkewMatrix(n, comps / s);
}

Deformation::Deformation(int dim, Polynomial p, double eps) : n(dim), psi(std::move(p)), epsilon(eps) {
    if (psi.nvars() != dim) fail(errc::dimension_mismatch, "deformation psi variable count != n");
    if (eps < 0.0) fail(errc::invalid_argument, "epsilon must be >= 0");
}

SkewMatrix momentum_from_state(const ParticleState& s) {
    if (s.x.size() != s.v.size()) fail(errc::dimension_mismatch, "momentum: x and v sizes differ");
    const int n = static_cast<int>(s.x.size());
    SkewMatrix l(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            l.comps[pair_index(i, j, n)] = s.x[i] * s.v[j] - s.x[j] * s.v[i];
    return l;
}

Eigen::VectorXd plucker_residuals(const SkewMatrix& l) {
    const int n = l.n;
    if (n < 4) return Eigen::VectorXd(0);
    std::vector<double> out;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                for (int d = c + 1; d < n; ++d)
                    out.push_back((l(a, b) * l(c, d) - l(a, c) * l(b, d) + l(a, d) * l(b, c)) / 3.0);
    return Eigen::Map<Eigen::VectorXd>(out.data(), static_cast<long>(out.size()));
}

namespace {

// Flip sign so the first coordinate above threshold is positive.
void fix_sign(Eigen::VectorXd& v) {
    const double thresh = 1e-12 * v.cwiseAbs().maxCoeff();
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > thresh) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

}  // namespace

PlaneBasis plane_basis(const SkewMatrix& l, double rank_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(l.to_matrix(), Eigen::ComputeFullU);
    const Eigen::VectorXd& sv = svd.singularValues();
    if (sv[0] <= 0.0 || sv[1] <= rank_tol * sv[0])
        fail(errc::degenerate_plane, "plane_basis: matrix rank < 2");
    if (l.n > 2 && sv[2] > rank_tol * sv[0])
        fail(errc::degenerate_plane, "plane_basis: matrix rank > 2");
    Eigen::VectorXd e1 = svd.matrixU().col(0);
    Eigen::VectorXd e2 = svd.matrixU().col(1);
    // Re-orthonormalize against roundoff, then fix signs deterministically.
    e1.normalize();
    e2 -= e1.dot(e2) * e1;
    e2.normalize();
    fix_sign(e1);
    fix_sign(e2);
    return PlaneBasis{e1, e2};
}

Eigen::Vector3d vector_form_n3(const SkewMatrix& l) {
    if (l.n != 3) fail(errc::dimension_mismatch, "vector_form_n3: n != 3");
    return Eigen::Vector3d(l(1, 2), -l(0, 2), l(0, 1));
}

SkewMatrix skew_from_vector_n3(const Eigen::Vector3d& L) {
    SkewMatrix l(3);
    l.set(1, 2, L[0]);
    l.set(0, 2, -L[1]);
    l.set(0, 1, L[2]);
    return l;
}

SkewMatrix wedge(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    ParticleState s;
    s.x = a;
    s.v = b;
    return momentum_from_state(s);
}

}  // namespace grassflow
