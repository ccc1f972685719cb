#include "grassflow/polynomial.hpp"

#include <sstream>

namespace grassflow {

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Polynomial Polynomial::rotated(int i, int j, double angle) const {
    if (i < 0 || j < 0 || i >= nvars_ || j >= nvars_ || i == j)
        fail(errc::invalid_index, "rotated: bad variable pair");
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Polynomial out(nvars_);
    for (const Term& t : terms_) {
        const int pi = t.powers[i];
        const int pj = t.powers[j];
        // (c x_i + s x_j)^pi (-s x_i + c x_j)^pj
        for (int a = 0; a <= pi; ++a) {
            const double fa = binomial(pi, a) * std::pow(c, a) * std::pow(s, pi - a);
            for (int b = 0; b <= pj; ++b) {
                const double fb = binomial(pj, b) * std::pow(-s, b) * std::pow(c, pj - b);
                std::vector<int> p = t.powers;
                p[i] = a + b;
                p[j] = (pi - a) + (pj - b);
                out.add_term(t.coeff * fa * fb, std::move(p));
            }
        }
    }
    return out;
}

std::string Polynomial::to_string(const std::string& varname) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const Term& t : terms_) {
        if (!first) os << " + ";
        first = false;
        os << t.coeff;
        for (int v = 0; v < nvars_; ++v) {
            if (t.powers[v] == 0) continue;
            os << "*" << varname << v;
            if (t.powers[v] > 1) os << "^" << t.powers[v];
        }
    }
    return os.str();
}

}  // namespace grassflow
