#include "casimir/quadrature.hpp"

#include "casimir/constants.hpp"

namespace casimir::quad {

const std::array<double, 8> GaussKronrod15::xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
const std::array<double, 8> GaussKronrod15::wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const std::array<double, 4> GaussKronrod15::wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780, 0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

Lanes abs_diff(const Lanes& a, const Lanes& b) {
    Lanes d(a.n);
    for (std::size_t i = 0; i < a.n; ++i) d[i] = std::abs(a[i] - b[i]);
    return d;
}

double Tolerance::ratio(const Lanes& error, const Lanes& value) const {
    double worst = 0.0;
    const double ref = std::abs(value[0]);
    for (std::size_t i = 0; i < value.n; ++i) {
        double allowed = rel_tol * std::abs(value[i]);
        if (i > 0) allowed = std::max(allowed, difference_floor * ref);
        if (allowed == 0.0) {
            if (error[i] > 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        worst = std::max(worst, error[i] / allowed);
    }
    return worst;
}

bool Tolerance::met(const Lanes& error, const Lanes& value) const { return ratio(error, value) <= 1.0; }

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

}  // namespace casimir::quad
