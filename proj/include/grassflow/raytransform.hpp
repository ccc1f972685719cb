#pragma once

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "grassflow/core.hpp"

namespace grassflow {

struct RayTransformResult {
    double value = 0.0;      // mean or integral, per `average` flag below
    SkewMatrix plane;        // the (normalized) plane the transform was taken on
    int quadrature_nodes = 0;
    bool average = true;     // true: (1/2pi) normalization; false: the raw integral
};

/// Mean of f over the great circle of the plane of l:
/// (1/2pi) Int f(cos t e1 + sin t e2) dt, by the equispaced rule with N nodes.
/// Exact for polynomials of degree <= N - 1. Basis-independent.
double ray_average(const Polynomial& f, const SkewMatrix& l, int nodes = 64);

/// Same, with a precomputed plane basis (used in inner loops).
double ray_average(const Polynomial& f, const PlaneBasis& basis, int nodes = 64);

/// The full ray transform J f = 2pi * mean.
RayTransformResult ray_transform(const Polynomial& f, const SkewMatrix& l, int nodes = 64,
                                 bool average = false);

/// Angular-momentum operator m_ij f = x_i df/dx_j - x_j df/dx_i (exact).
Polynomial apply_mij(const Polynomial& f, int i, int j);

/// H = eps * mean of psi over the circle of l (the averaged Hamiltonian).
double reduced_hamiltonian_numeric(const Deformation& d, const SkewMatrix& l, int nodes = 64);

/// Hamiltonian on the momentum space: value plus gradient with respect to the
/// independent upper-triangle components.
class ReducedHamiltonian {
public:
    virtual ~ReducedHamiltonian() = default;
    virtual int dim() const = 0;
    virtual double value(const SkewMatrix& l) const = 0;
    virtual SkewMatrix gradient(const SkewMatrix& l) const = 0;
    virtual std::string describe() const = 0;
};

/// H = (3/8) eps sum_k c_k (sum_{j != k} l_kj^2)^2 for psi = sum_k c_k x_k^4.
/// Covers the paper's n = 3 and n = 4 quartic deformations in one form.
class QuarticHamiltonian : public ReducedHamiltonian {
public:
    QuarticHamiltonian(double eps, Eigen::VectorXd coeffs);
    int dim() const override { return static_cast<int>(coeffs_.size()); }
    double value(const SkewMatrix& l) const override;
    SkewMatrix gradient(const SkewMatrix& l) const override;
    std::string describe() const override;
    double epsilon() const { return eps_; }
    const Eigen::VectorXd& coeffs() const { return coeffs_; }

private:
    double eps_;
    Eigen::VectorXd coeffs_;
    Eigen::VectorXd row_square_sums(const SkewMatrix& l) const;
};

/// H = (eps/2) sum_{i<j} (alpha_i + alpha_j) l_ij^2 for psi = sum alpha_k x_k^2.
class EllipsoidHamiltonian : public ReducedHamiltonian {
public:
    EllipsoidHamiltonian(double eps, Eigen::VectorXd alphas);
    int dim() const override { return static_cast<int>(alphas_.size()); }
    double value(const SkewMatrix& l) const override;
    SkewMatrix gradient(const SkewMatrix& l) const override;
    std::string describe() const override;

private:
    double eps_;
    Eigen::VectorXd alphas_;
};

/// Quadrature-backed H = eps * <psi>; gradient by central differences on the
/// upper-triangle components with rank-2 re-projection of perturbed points.
class NumericHamiltonian : public ReducedHamiltonian {
public:
    NumericHamiltonian(Deformation d, int nodes = 64, double fd_step = 1e-6);
    int dim() const override { return def_.n; }
    double value(const SkewMatrix& l) const override;
    SkewMatrix gradient(const SkewMatrix& l) const override;
    std::string describe() const override;

private:
    Deformation def_;
    int nodes_;
    double fd_step_;
};

/// H = l^2 (the Casimir); generates no motion. Useful as a null flow.
class CasimirHamiltonian : public ReducedHamiltonian {
public:
    explicit CasimirHamiltonian(int dim) : n_(dim) {}
    int dim() const override { return n_; }
    double value(const SkewMatrix& l) const override { return l.full_square_sum(); }
    SkewMatrix gradient(const SkewMatrix& l) const override { return SkewMatrix(l.n, 4.0 * l.comps); }
    std::string describe() const override { return "l^2"; }

private:
    int n_;
};

/// Closed form of the averaged quartic Hamiltonian for n = 3, in the vector
/// form L = (l_23, -l_13, l_12):
/// H = (3/8) eps [ c1 (L2^2+L3^2)^2 + c2 (L1^2+L3^2)^2 + c3 (L1^2+L2^2)^2 ].
double hamiltonian_quartic_n3(double eps, const Eigen::Vector3d& coeffs, const Eigen::Vector3d& L);
Eigen::Vector3d hamiltonian_quartic_n3_grad(double eps, const Eigen::Vector3d& coeffs,
                                            const Eigen::Vector3d& L);

/// Closed form of the averaged quartic Hamiltonian for n = 4 (matrix form).
double hamiltonian_quartic_n4(double eps, const Eigen::Vector4d& coeffs, const SkewMatrix& l);
SkewMatrix hamiltonian_quartic_n4_grad(double eps, const Eigen::Vector4d& coeffs, const SkewMatrix& l);

/// Closed form of the averaged ellipsoid Hamiltonian, any n.
double hamiltonian_ellipsoid(double eps, const Eigen::VectorXd& alphas, const SkewMatrix& l);
SkewMatrix hamiltonian_ellipsoid_grad(double eps, const Eigen::VectorXd& alphas, const SkewMatrix& l);

struct CommutationCheck {
    double lhs = 0.0;   // J(m_ij f)(l)
    double rhs = 0.0;   // {J f, l_ij}(l), finite-difference gradient
    double diff = 0.0;
};

/// Both sides of the commutation identity J o m_ij = {., l_ij} o J, computed
/// independently: the left by quadrature of the exact polynomial m_ij f, the
/// right through the Lie-Poisson bracket with a finite-difference gradient of
/// J f (perturbed points re-projected to rank 2).
CommutationCheck verify_commutation(const Polynomial& f, int i, int j, const SkewMatrix& l,
                                    int nodes = 64, double fd_step = 1e-6);

struct PairCoefficient {
    int i = 0, j = 0;
    double sum_form = 0.0;       // (alpha_i + alpha_j) / 2
    double quotient_form = 0.0;  // (a_i - a_j) / (b_i - b_j), a = alpha^2, b = 2 alpha
};

/// Per-pair coefficients identifying the averaged ellipsoid system with the
/// Schottky-Manakov Euler-equation Hamiltonian. Throws on repeated alphas
/// (quotient form divides by zero); use schottky_manakov_sum_form then.
std::vector<PairCoefficient> schottky_manakov_coefficients(const Eigen::VectorXd& alphas);

/// The (alpha_i + alpha_j)/2 list alone, defined for any alphas.
std::vector<PairCoefficient> schottky_manakov_sum_form(const Eigen::VectorXd& alphas);

/// Deformation -> Hamiltonian: closed form when psi matches a diagonal
/// quartic or quadratic pattern, quadrature-backed otherwise.
std::unique_ptr<ReducedHamiltonian> hamiltonian_for_deformation(const Deformation& d, int nodes = 64);

}  // namespace grassflow
