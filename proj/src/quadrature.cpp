#include "plapsys/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "plapsys/error.hpp"

namespace plapsys {

namespace {

using GL = boost::math::quadrature::gauss<double, 30>;

constexpr double kXMax = 690;  // exp(690) is still finite

double panel_sum(const std::function<double(double)>& g, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0;
    for (int i = 0; i < n; ++i) s += GL::integrate(g, a + i * h, a + (i + 1) * h);
    return s;
}

[[noreturn]] void fail(const char* who, double prev, double last) {
    std::ostringstream os;
    os.precision(17);
    os << who << ": no convergence, last two panel values " << prev << ", " << last;
    throw ConvergenceError(os.str(), {prev, last});
}

// Walks from x0 in direction dir until the integrand is negligible.
double truncate(const std::function<double(double)>& g, double x0, double dir, double tol) {
    double peak = 0, x = x0;
    int quiet = 0;
    for (int i = 0; i < 2 * int(kXMax); ++i) {
        const double v = std::abs(g(x));
        peak = std::max(peak, v);
        quiet = (peak > 0 && v <= tol * peak) ? quiet + 1 : 0;
        if (quiet >= 3) return x;
        if (std::abs(x + dir) > kXMax) return x;
        x += dir;
    }
    return x;
}

}  // namespace

double sphere_area(int n) {
    return 2 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

QuadResult integrate_radial(const std::function<double(double)>& f, double lo, double hi,
                            double scale, const QuadratureSpec& spec) {
    if (!(lo >= 0 && hi > lo && scale > 0)) throw DomainError("integrate_radial: need 0 <= lo < hi, scale > 0");
    auto g = [&](double x) {
        const double r = scale * std::exp(x);
        const double v = f(r) * r;
        return std::isfinite(v) ? v : 0.0;
    };
    const double tol = 1e-4 * spec.rel_tol;
    double xa = lo > 0 ? std::log(lo / scale) : -kInf;
    double xb = std::isinf(hi) ? kInf : std::log(hi / scale);
    const double x0 = std::clamp(0.0, std::isinf(xa) ? -kXMax : xa, std::isinf(xb) ? kXMax : xb);
    if (std::isinf(xa)) xa = truncate(g, x0, -1, tol);
    if (std::isinf(xb)) xb = truncate(g, x0, +1, tol);
    if (xb <= xa) return {0, 0, 0};

    int n = std::max(1, int(std::ceil(xb - xa)));
    double prev = panel_sum(g, xa, xb, n);
    for (int d = 0; d < spec.max_doublings; ++d) {
        n *= 2;
        const double cur = panel_sum(g, xa, xb, n);
        const double err = std::abs(cur - prev);
        if (err <= spec.rel_tol * std::abs(cur) || (cur == 0 && prev == 0)) return {cur, err, n};
        prev = cur;
    }
    fail("integrate_radial", prev, panel_sum(g, xa, xb, n));
}

QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                              const QuadratureSpec& spec) {
    if (!(b > a)) return {0, 0, 0};
    int n = 1;
    double prev = panel_sum(f, a, b, n);
    for (int d = 0; d < spec.max_doublings; ++d) {
        n *= 2;
        const double cur = panel_sum(f, a, b, n);
        const double err = std::abs(cur - prev);
        if (err <= spec.rel_tol * std::abs(cur) || (cur == 0 && prev == 0)) return {cur, err, n};
        prev = cur;
    }
    fail("integrate_interval", prev, panel_sum(f, a, b, n));
}

namespace {

template <int Order>
void panel_nodes(std::vector<double>& xs, std::vector<double>& ws) {
    using G = boost::math::quadrature::gauss<double, Order>;
    for (size_t i = 0; i < G::abscissa().size(); ++i) {
        for (int sgn : {-1, 1}) {
            if (i == 0 && sgn == 1 && G::abscissa()[0] == 0) continue;
            xs.push_back(sgn * G::abscissa()[i]);
            ws.push_back(G::weights()[i]);
        }
    }
}

}  // namespace

Rule1D graded_rule(const std::vector<double>& centers, double hmin, double hmax, bool half_line, int split,
                   int order) {
    std::vector<double> bp;
    const std::vector<double> cs = half_line ? std::vector<double>{0.0} : centers;
    if (cs.empty()) throw std::invalid_argument("graded_rule: no centers");
    for (double c : cs) {
        bp.push_back(c);
        for (double h = hmin; h < 2 * hmax; h *= 2) {
            bp.push_back(c + h);
            if (!half_line) bp.push_back(c - h);
        }
    }
    std::sort(bp.begin(), bp.end());
    // Drop breakpoints that refine a panel beyond its distance to the nearest center.
    auto dist = [&](double x) {
        double d = kInf;
        for (double c : cs) d = std::min(d, std::abs(x - c));
        return d;
    };
    std::vector<double> kept{bp.front()};
    for (size_t i = 1; i < bp.size(); ++i) {
        const double a = kept.back();
        const bool last = i + 1 == bp.size();
        const bool is_center = dist(bp[i]) == 0;
        if (!last && !is_center) {
            const double nx = bp[i + 1];
            if (nx - a <= std::max(hmin, std::min(dist(a), dist(nx))) * (1 + 1e-12)) continue;
        }
        if (bp[i] - a > 1e-3 * hmin) kept.push_back(bp[i]);
    }
    bp.swap(kept);

    std::vector<double> xs, ws;
    if (order == 5) panel_nodes<5>(xs, ws);
    else if (order == 10) panel_nodes<10>(xs, ws);
    else throw std::invalid_argument("graded_rule: order must be 5 or 10");

    Rule1D rule;
    auto add_panel = [&](double a, double b, auto&& map) {
        const double m = 0.5 * (a + b), h = 0.5 * (b - a);
        for (size_t i = 0; i < xs.size(); ++i) {
            double x, jac;
            map(m + h * xs[i], x, jac);
            rule.x.push_back(x);
            rule.w.push_back(h * ws[i] * jac);
        }
    };
    auto identity = [](double y, double& x, double& jac) {
        x = y;
        jac = 1;
    };
    const int sub = 1 << split;
    for (size_t k = 0; k + 1 < bp.size(); ++k) {
        const double h = (bp[k + 1] - bp[k]) / sub;
        for (int j = 0; j < sub; ++j) add_panel(bp[k] + j * h, bp[k] + (j + 1) * h, identity);
    }
    // Tails: x = T + d*(e^y - 1), y in [0, 24].
    const double d = hmax;
    const double ytail = 24;
    const int ntail = 12 * sub;
    auto tail = [&](double T, double dir) {
        auto map = [&](double y, double& x, double& jac) {
            const double e = std::exp(y);
            x = T + dir * d * (e - 1);
            jac = d * e;
        };
        for (int j = 0; j < ntail; ++j) add_panel(j * ytail / ntail, (j + 1) * ytail / ntail, map);
    };
    tail(bp.back(), +1);
    if (!half_line) tail(bp.front(), -1);
    return rule;
}

}  // namespace plapsys
