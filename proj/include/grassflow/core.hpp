#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "grassflow/errors.hpp"
#include "grassflow/polynomial.hpp"

namespace grassflow {

/// Lexicographic index of the pair (i, j), i < j, within the strict upper
/// triangle of an n x n matrix.
int pair_index(int i, int j, int n);

/// Inverse of pair_index.
std::pair<int, int> pair_from_index(int k, int n);

inline int pair_count(int n) { return n * (n - 1) / 2; }

/// Column label "l_i_j" (0-based) used by every CSV/JSON surface.
std::string pair_label(int i, int j);

/// Antisymmetric n x n matrix stored as its strict upper triangle in
/// pair_index order. Doubles as the Plucker coordinate vector of a 2-plane
/// when the matrix has rank 2.
struct SkewMatrix {
    int n = 0;
    Eigen::VectorXd comps;  // length n(n-1)/2

    SkewMatrix() = default;
    explicit SkewMatrix(int dim);
    SkewMatrix(int dim, Eigen::VectorXd c);

    static SkewMatrix from_matrix(const Eigen::MatrixXd& m, double antisym_tol = 1e-12);

    double operator()(int i, int j) const;        // signed logical element
    void set(int i, int j, double value);         // sets l_ij = value, l_ji = -value
    Eigen::MatrixXd to_matrix() const;

    /// Sum over BOTH triangles, i.e. 2 * sum_{i<j} l_ij^2 (the l^2 Casimir).
    double full_square_sum() const { return 2.0 * comps.squaredNorm(); }

    /// The `normalized` flag convention: full_square_sum == 1 within tol.
    bool is_normalized(double tol = 1e-12) const;

    /// Scaled so full_square_sum == 1.
    SkewMatrix normalized() const;

    /// Scaled so sum_{i<j} l_ij^2 == 1; for a rank-2 matrix this makes it the
    /// wedge of an orthonormal pair (unit singular values), the scale on which
    /// the closed-form Hamiltonians coincide with the ray transform.
    SkewMatrix plane_normalized() const;

    SkewMatrix scaled(double a) const { return SkewMatrix(n, comps * a); }
};

/// Position/velocity of the point mass on the hypersurface.
struct ParticleState {
    Eigen::VectorXd x;
    Eigen::VectorXd v;
    double t = 0.0;
};

/// Polynomial deformation psi of the unit sphere; the surface is
/// |x|^2 - 1 + epsilon * psi(x) = 0.
struct Deformation {
    int n = 0;
    Polynomial psi;
    double epsilon = 0.0;

    Deformation() : psi(1) {}
    Deformation(int dim, Polynomial p, double eps);

    int degree() const { return psi.degree(); }
};

/// Orthonormal basis of the 2-plane of a rank-2 SkewMatrix.
struct PlaneBasis {
    Eigen::VectorXd e1;
    Eigen::VectorXd e2;
};

/// l_ij = x_i v_j - x_j v_i; always rank <= 2.
SkewMatrix momentum_from_state(const ParticleState& s);

/// One residual (1/3)(l_ab l_cd - l_ac l_bd + l_ad l_bc) per index quadruple
/// a<b<c<d; all vanish iff the matrix is decomposable (rank <= 2). Empty for
/// n = 3.
Eigen::VectorXd plucker_residuals(const SkewMatrix& l);

/// Orthonormal basis of the column space of a numerically rank-2 matrix, with
/// deterministic sign fixing (first nonzero coordinate positive).
/// rank_tol bounds sigma_3 / sigma_1.
PlaneBasis plane_basis(const SkewMatrix& l, double rank_tol = 1e-10);

/// n = 3 vector form L = (l_23, -l_13, l_12) in 1-based notation.
Eigen::Vector3d vector_form_n3(const SkewMatrix& l);
SkewMatrix skew_from_vector_n3(const Eigen::Vector3d& L);

/// Wedge e1 ^ e2 as a SkewMatrix (rank 2 by construction).
SkewMatrix wedge(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace grassflow
