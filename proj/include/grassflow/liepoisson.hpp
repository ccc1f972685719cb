#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "grassflow/core.hpp"
#include "grassflow/geodesic.hpp"
#include "grassflow/raytransform.hpp"

namespace grassflow {

/// A linear form sum_k c_k l_k over the independent components; the value of
/// {l_ij, l_pq} is such a form.
using LinearForm = Eigen::VectorXd;

/// {l_ij, l_pq} = d_ip l_jq + d_jp l_qi + d_iq l_pj + d_jq l_ip as a linear
/// form over the upper-triangle components. Indices must satisfy i<j, p<q.
LinearForm bracket_basis(int i, int j, int p, int q, int n);

/// All basis brackets, indexed by (pair_index, pair_index).
struct BracketTable {
    int n = 0;
    std::vector<std::vector<LinearForm>> forms;  // forms[A][B] = {l_A, l_B}

    explicit BracketTable(int dim);
    const LinearForm& bracket(int A, int B) const { return forms[A][B]; }
};

/// so(n) structure constants C_{ij,pq,ab} with [E_ij, E_pq] = C_{ij,pq,ab} E_ab
/// (sum over ordered (a,b)).
class StructureConstants {
public:
    explicit StructureConstants(int n) : n_(n) {}
    double operator()(int i, int j, int p, int q, int a, int b) const;
    int dim() const { return n_; }

    /// Basis matrix (E_ij)_ab = -d_ia d_jb + d_ib d_ja.
    static Eigen::MatrixXd basis_matrix(int i, int j, int n);

private:
    int n_;
};

/// Differentiable scalar function of the momentum: value plus gradient over
/// the independent components.
struct MomentumFunction {
    std::function<double(const SkewMatrix&)> value;
    std::function<SkewMatrix(const SkewMatrix&)> gradient;
    static MomentumFunction coordinate(int i, int j, int n);      // F = l_ij
    static MomentumFunction from_polynomial(Polynomial p, int n); // poly in comps, analytic gradient
    static MomentumFunction numeric(std::function<double(const SkewMatrix&)> f, int n,
                                    double fd_step = 1e-6, bool reproject_rank2 = false);
};

/// {F, G}(l) = sum over pairs dF/dl_ij {l_ij, l_pq} dG/dl_pq.
double bracket_of_functions(const MomentumFunction& F, const MomentumFunction& G,
                            const SkewMatrix& l);

/// Hamiltonian vector field: l'_ij = {l_ij, H}(l) = [L, grad H]_ij.
SkewMatrix reduced_rhs(const ReducedHamiltonian& H, const SkewMatrix& l);

struct NamedValue {
    std::string name;
    double value;
};

/// Conserved/constrained quantities: l^2 always; the Pfaffian C for n = 4;
/// every Plucker residual for n > 4.
std::vector<NamedValue> casimirs(const SkewMatrix& l);

/// Nearest rank-2 antisymmetric matrix: keep the dominant 2x2 spectral block,
/// zero the rest. Exact identity on rank-2 input. Throws ambiguous_projection
/// when the two leading blocks tie within 1e-12 relative.
SkewMatrix project_rank2(const SkewMatrix& l, double tie_tol = 1e-12);

struct ReducedSample {
    double t = 0.0;
    SkewMatrix l;
    double H = 0.0;
    double l2 = 0.0;
    double plucker_max = 0.0;
};

struct ReducedIntegratorSettings {
    double dt = 1e-2;
    int sample_stride = 1;
    bool renormalize = true;        // rescale l^2 to its initial value each step
    bool project = true;            // rank-2 projection each step (n >= 4)
    double stationary_tol = 1e-13;  // |rhs| below this => emit constant trajectory
    double rank_floor = 1e-8;       // dominant singular values must stay above this
};

struct ReducedTrajectory {
    std::vector<ReducedSample> samples;
    long steps = 0;
    double H0 = 0.0;
    double l2_0 = 0.0;
    double max_H_drift_rel = 0.0;
    double max_l2_drift_rel = 0.0;
    double max_plucker = 0.0;
    double max_l34_drift = 0.0;     // n = 4 only: max |l_23(t) - l_23(0)| (0-based)
    bool stationary = false;
};

/// RK4 on the component vector with per-step Casimir renormalization and
/// rank-2 projection.
ReducedTrajectory integrate_reduced(const ReducedHamiltonian& H, const SkewMatrix& l0,
                                    double T, const ReducedIntegratorSettings& settings = {});

struct CompareSettings {
    double dt_full = 2.0 * M_PI * 1e-3;
    double dt_reduced = 1e-2;
    int samples = 200;              // matched comparison times
    double kappa = 0.5;             // reduced-clock calibration
    int quadrature_nodes = 64;
};

struct DriftReport {
    double sup_deviation = 0.0;
    double epsilon = 0.0;
    double T = 0.0;
    double kappa = 0.5;
    int samples = 0;
};

/// Integrates the exact geodesic flow and the averaged flow from matched
/// initial data and reports the sup-norm deviation of unit-normalized
/// momenta, with the reduced clock scaled by kappa.
DriftReport compare_full_vs_reduced(const Deformation& d, const ParticleState& s0, double T,
                                    const CompareSettings& settings = {});

}  // namespace grassflow
