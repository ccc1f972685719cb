#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "grassflow/errors.hpp"

namespace grassflow {

/// Sparse multivariate polynomial with real coefficients, kept in a canonical
/// form (terms sorted by exponent vector, like terms combined, zero terms
/// dropped). Exponents are small non-negative integers; evaluation uses plain
/// repeated multiplication, which is exact enough for the degrees (<= ~8)
/// that occur here.
class Polynomial {
public:
    struct Term {
        double coeff = 0.0;
        std::vector<int> powers;  // one exponent per variable
    };

    explicit Polynomial(int nvars) : nvars_(nvars) {
        if (nvars < 1) fail(errc::invalid_argument, "polynomial needs >= 1 variable");
    }

    static Polynomial zero(int nvars) { return Polynomial(nvars); }

    static Polynomial constant(int nvars, double c) {
        Polynomial p(nvars);
        p.add_term(c, std::vector<int>(nvars, 0));
        return p;
    }

    static Polynomial monomial(int nvars, double coeff, std::vector<int> powers) {
        Polynomial p(nvars);
        p.add_term(coeff, std::move(powers));
        return p;
    }

    int nvars() const { return nvars_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int degree() const {
        int d = 0;
        for (const Term& t : terms_) {
            int s = 0;
            for (int p : t.powers) s += p;
            d = std::max(d, s);
        }
        return d;
    }

    void add_term(double coeff, std::vector<int> powers) {
        if (static_cast<int>(powers.size()) != nvars_)
            fail(errc::dimension_mismatch, "term exponent count != variable count");
        for (int p : powers)
            if (p < 0) fail(errc::invalid_argument, "negative exponent");
        if (coeff == 0.0) return;
        auto it = std::lower_bound(terms_.begin(), terms_.end(), powers,
                                   [](const Term& t, const std::vector<int>& q) { return t.powers < q; });
        if (it != terms_.end() && it->powers == powers) {
            it->coeff += coeff;
            if (it->coeff == 0.0) terms_.erase(it);
        } else {
            terms_.insert(it, Term{coeff, std::move(powers)});
        }
    }

    double eval(const Eigen::VectorXd& x) const {
        if (x.size() != nvars_) fail(errc::dimension_mismatch, "eval point has wrong dimension");
        double sum = 0.0;
        for (const Term& t : terms_) {
            double m = t.coeff;
            for (int v = 0; v < nvars_; ++v) {
                const double xv = x[v];
                for (int k = 0; k < t.powers[v]; ++k) m *= xv;
            }
            sum += m;
        }
        return sum;
    }

    Polynomial partial(int var) const {
        if (var < 0 || var >= nvars_) fail(errc::invalid_index, "partial: variable out of range");
        Polynomial out(nvars_);
        for (const Term& t : terms_) {
            if (t.powers[var] == 0) continue;
            std::vector<int> p = t.powers;
            const int e = p[var]--;
            out.add_term(t.coeff * e, std::move(p));
        }
        return out;
    }

    Polynomial times_coord(int var) const {
        if (var < 0 || var >= nvars_) fail(errc::invalid_index, "times_coord: variable out of range");
        Polynomial out(nvars_);
        for (const Term& t : terms_) {
            std::vector<int> p = t.powers;
            ++p[var];
            out.add_term(t.coeff, std::move(p));
        }
        return out;
    }

    Polynomial scaled(double a) const {
        Polynomial out(nvars_);
        if (a == 0.0) return out;
        out.terms_ = terms_;
        for (Term& t : out.terms_) t.coeff *= a;
        return out;
    }

    Polynomial operator+(const Polynomial& other) const {
        if (other.nvars_ != nvars_) fail(errc::dimension_mismatch, "polynomial variable counts differ");
        Polynomial out = *this;
        for (const Term& t : other.terms_) out.add_term(t.coeff, t.powers);
        return out;
    }

    Polynomial operator-(const Polynomial& other) const { return *this + other.scaled(-1.0); }

    /// Substitute the in-plane rotation x_i -> c x_i + s x_j, x_j -> -s x_i + c x_j
    /// (the pullback by the rotation sending e_i, e_j by angle -a), expanding
    /// binomially. Used for rotation-covariance checks of the ray transform.
    Polynomial rotated(int i, int j, double angle) const;

    std::string to_string(const std::string& varname = "x") const;

private:
    int nvars_;
    std::vector<Term> terms_;
};

/// Binomial coefficient as double (n <= ~30 here, exact in double).
double binomial(int n, int k);

}  // namespace grassflow
