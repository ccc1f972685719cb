#include "grassflow/raytransform.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "grassflow/liepoisson.hpp"

namespace grassflow {

double ray_average(const Polynomial& f, const PlaneBasis& basis, int nodes) {
    if (nodes < 1) fail(errc::invalid_argument, "ray_average: need nodes >= 1");
    if (nodes < f.degree() + 1)
        fail(errc::invalid_argument, "ray_average: nodes < degree + 1, rule not exact");
    const double step = 2.0 * M_PI / nodes;
    double sum = 0.0;
    Eigen::VectorXd x(basis.e1.size());
    for (int k = 0; k < nodes; ++k) {
        const double t = k * step;
        x = std::cos(t) * basis.e1 + std::sin(t) * basis.e2;
        sum += f.eval(x);
    }
    return sum / nodes;
}

double ray_average(const Polynomial& f, const SkewMatrix& l, int nodes) {
    return ray_average(f, plane_basis(l), nodes);
}

RayTransformResult ray_transform(const Polynomial& f, const SkewMatrix& l, int nodes, bool average) {
    RayTransformResult out;
    out.average = average;
    out.quadrature_nodes = nodes;
    out.plane = l.plane_normalized();
    const double mean = ray_average(f, l, nodes);
    out.value = average ? mean : 2.0 * M_PI * mean;
    return out;
}

Polynomial apply_mij(const Polynomial& f, int i, int j) {
    if (i < 0 || j < 0 || i >= f.nvars() || j >= f.nvars() || i >= j)
        fail(errc::invalid_index, "apply_mij: need 0 <= i < j < n");
    return f.partial(j).times_coord(i) - f.partial(i).times_coord(j);
}

double reduced_hamiltonian_numeric(const Deformation& d, const SkewMatrix& l, int nodes) {
    if (d.n != l.n) fail(errc::dimension_mismatch, "reduced_hamiltonian_numeric: dimension mismatch");
    return d.epsilon * ray_average(d.psi, l, nodes);
}

// ---------------------------------------------------------------------------
// Closed forms

QuarticHamiltonian::QuarticHamiltonian(double eps, Eigen::VectorXd coeffs)
    : eps_(eps), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 2) fail(errc::invalid_argument, "quartic Hamiltonian needs n >= 2");
}

Eigen::VectorXd QuarticHamiltonian::row_square_sums(const SkewMatrix& l) const {
    const int n = dim();
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v2 = l.comps[pair_index(i, j, n)] * l.comps[pair_index(i, j, n)];
            rho[i] += v2;
            rho[j] += v2;
        }
    return rho;
}

double QuarticHamiltonian::value(const SkewMatrix& l) const {
    if (l.n != dim()) fail(errc::dimension_mismatch, "quartic Hamiltonian: dimension mismatch");
    const Eigen::VectorXd rho = row_square_sums(l);
    double sum = 0.0;
    for (int k = 0; k < dim(); ++k) sum += coeffs_[k] * rho[k] * rho[k];
    return 0.375 * eps_ * sum;
}

SkewMatrix QuarticHamiltonian::gradient(const SkewMatrix& l) const {
    if (l.n != dim()) fail(errc::dimension_mismatch, "quartic Hamiltonian: dimension mismatch");
    const int n = dim();
    const Eigen::VectorXd rho = row_square_sums(l);
    SkewMatrix g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const int k = pair_index(i, j, n);
            g.comps[k] = 1.5 * eps_ * l.comps[k] * (coeffs_[i] * rho[i] + coeffs_[j] * rho[j]);
        }
    return g;
}

std::string QuarticHamiltonian::describe() const {
    std::ostringstream os;
    os << "quartic(eps=" << eps_ << ", coeffs=[";
    for (int k = 0; k < coeffs_.size(); ++k) os << (k ? "," : "") << coeffs_[k];
    os << "])";
    return os.str();
}

EllipsoidHamiltonian::EllipsoidHamiltonian(double eps, Eigen::VectorXd alphas)
    : eps_(eps), alphas_(std::move(alphas)) {
    if (alphas_.size() < 2) fail(errc::invalid_argument, "ellipsoid Hamiltonian needs n >= 2");
}

double EllipsoidHamiltonian::value(const SkewMatrix& l) const {
    if (l.n != dim()) fail(errc::dimension_mismatch, "ellipsoid Hamiltonian: dimension mismatch");
    const int n = dim();
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double v = l.comps[pair_index(i, j, n)];
            sum += (alphas_[i] + alphas_[j]) * v * v;
        }
    return 0.5 * eps_ * sum;
}

SkewMatrix EllipsoidHamiltonian::gradient(const SkewMatrix& l) const {
    if (l.n != dim()) fail(errc::dimension_mismatch, "ellipsoid Hamiltonian: dimension mismatch");
    const int n = dim();
    SkewMatrix g(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const int k = pair_index(i, j, n);
            g.comps[k] = eps_ * (alphas_[i] + alphas_[j]) * l.comps[k];
        }
    return g;
}

std::string EllipsoidHamiltonian::describe() const {
    std::ostringstream os;
    os << "ellipsoid(eps=" << eps_ << ", alphas=[";
    for (int k = 0; k < alphas_.size(); ++k) os << (k ? "," : "") << alphas_[k];
    os << "])";
    return os.str();
}

NumericHamiltonian::NumericHamiltonian(Deformation d, int nodes, double fd_step)
    : def_(std::move(d)), nodes_(nodes), fd_step_(fd_step) {
    if (nodes_ < def_.degree() + 1)
        fail(errc::invalid_argument, "NumericHamiltonian: nodes < degree + 1");
}

double NumericHamiltonian::value(const SkewMatrix& l) const {
    return reduced_hamiltonian_numeric(def_, l, nodes_);
}

SkewMatrix NumericHamiltonian::gradient(const SkewMatrix& l) const {
    // Central differences on the chart, re-projecting perturbed points onto
    // the rank-2 variety so the differencing stays on the Grassmannian.
    const int m = static_cast<int>(l.comps.size());
    SkewMatrix g(l.n);
    for (int k = 0; k < m; ++k) {
        SkewMatrix lp = l, lm = l;
        lp.comps[k] += fd_step_;
        lm.comps[k] -= fd_step_;
        if (l.n >= 4) {
            lp = project_rank2(lp);
            lm = project_rank2(lm);
        }
        g.comps[k] = (value(lp) - value(lm)) / (2.0 * fd_step_);
    }
    return g;
}

std::string NumericHamiltonian::describe() const {
    std::ostringstream os;
    os << "numeric(eps=" << def_.epsilon << ", psi=" << def_.psi.to_string() << ", N=" << nodes_ << ")";
    return os.str();
}

double hamiltonian_quartic_n3(double eps, const Eigen::Vector3d& coeffs, const Eigen::Vector3d& L) {
    const double L2 = L.squaredNorm();
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double rho = L2 - L[k] * L[k];
        sum += coeffs[k] * rho * rho;
    }
    return 0.375 * eps * sum;
}

Eigen::Vector3d hamiltonian_quartic_n3_grad(double eps, const Eigen::Vector3d& coeffs,
                                            const Eigen::Vector3d& L) {
    const double L2 = L.squaredNorm();
    Eigen::Vector3d rho, grad;
    for (int k = 0; k < 3; ++k) rho[k] = L2 - L[k] * L[k];
    const double S = coeffs.dot(rho);
    for (int a = 0; a < 3; ++a) grad[a] = 1.5 * eps * L[a] * (S - coeffs[a] * rho[a]);
    return grad;
}

double hamiltonian_quartic_n4(double eps, const Eigen::Vector4d& coeffs, const SkewMatrix& l) {
    if (l.n != 4) fail(errc::dimension_mismatch, "hamiltonian_quartic_n4: n != 4");
    return QuarticHamiltonian(eps, coeffs).value(l);
}

SkewMatrix hamiltonian_quartic_n4_grad(double eps, const Eigen::Vector4d& coeffs, const SkewMatrix& l) {
    if (l.n != 4) fail(errc::dimension_mismatch, "hamiltonian_quartic_n4: n != 4");
    return QuarticHamiltonian(eps, coeffs).gradient(l);
}

double hamiltonian_ellipsoid(double eps, const Eigen::VectorXd& alphas, const SkewMatrix& l) {
    return EllipsoidHamiltonian(eps, alphas).value(l);
}

SkewMatrix hamiltonian_ellipsoid_grad(double eps, const Eigen::VectorXd& alphas, const SkewMatrix& l) {
    return EllipsoidHamiltonian(eps, alphas).gradient(l);
}

CommutationCheck verify_commutation(const Polynomial& f, int i, int j, const SkewMatrix& l,
                                    int nodes, double fd_step) {
    CommutationCheck out;
    const Polynomial mf = apply_mij(f, i, j);
    out.lhs = mf.is_zero() ? 0.0 : 2.0 * M_PI * ray_average(mf, l, nodes);

    MomentumFunction Jf = MomentumFunction::numeric(
        [&f, nodes](const SkewMatrix& p) { return 2.0 * M_PI * ray_average(f, p, nodes); }, l.n,
        fd_step, /*reproject_rank2=*/l.n >= 4);
    MomentumFunction lij = MomentumFunction::coordinate(i, j, l.n);
    out.rhs = bracket_of_functions(Jf, lij, l);
    out.diff = std::abs(out.lhs - out.rhs);
    return out;
}

std::vector<PairCoefficient> schottky_manakov_sum_form(const Eigen::VectorXd& alphas) {
    const int n = static_cast<int>(alphas.size());
    std::vector<PairCoefficient> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            PairCoefficient c;
            c.i = i;
            c.j = j;
            c.sum_form = 0.5 * (alphas[i] + alphas[j]);
            c.quotient_form = std::numeric_limits<double>::quiet_NaN();
            out.push_back(c);
        }
    return out;
}

std::vector<PairCoefficient> schottky_manakov_coefficients(const Eigen::VectorXd& alphas) {
    std::vector<PairCoefficient> out = schottky_manakov_sum_form(alphas);
    for (PairCoefficient& c : out) {
        const double bi = 2.0 * alphas[c.i];
        const double bj = 2.0 * alphas[c.j];
        if (bi == bj)
            fail(errc::invalid_argument,
                 "schottky_manakov_coefficients: repeated alpha, quotient form divides by zero");
        const double ai = alphas[c.i] * alphas[c.i];
        const double aj = alphas[c.j] * alphas[c.j];
        c.quotient_form = (ai - aj) / (bi - bj);
    }
    return out;
}

std::unique_ptr<ReducedHamiltonian> hamiltonian_for_deformation(const Deformation& d, int nodes) {
    bool quartic = !d.psi.is_zero();
    bool quadratic = !d.psi.is_zero();
    Eigen::VectorXd c4 = Eigen::VectorXd::Zero(d.n);
    Eigen::VectorXd c2 = Eigen::VectorXd::Zero(d.n);
    for (const Polynomial::Term& t : d.psi.terms()) {
        int nz = -1;
        bool single = true;
        for (int v = 0; v < d.n; ++v) {
            if (t.powers[v] == 0) continue;
            if (nz >= 0) single = false;
            nz = v;
        }
        if (!single || nz < 0) {
            quartic = quadratic = false;
            break;
        }
        if (t.powers[nz] == 4)
            c4[nz] += t.coeff;
        else
            quartic = false;
        if (t.powers[nz] == 2)
            c2[nz] += t.coeff;
        else
            quadratic = false;
    }
    if (quartic) return std::make_unique<QuarticHamiltonian>(d.epsilon, c4);
    if (quadratic) return std::make_unique<EllipsoidHamiltonian>(d.epsilon, c2);
    return std::make_unique<NumericHamiltonian>(d, nodes);
}

}  // namespace grassflow
