#include "plapsys/instanton.hpp"

#include <cmath>
#include <stdexcept>

#include "plapsys/error.hpp"

namespace plapsys {

namespace {

template <class T>
T value_t(T r, const InstantonSpec& s) {
    const T p = s.p, N = s.N, eps = s.eps;
    const T q = p / (p - 1);
    const T c = std::pow(N * std::pow((N - p) / (p - 1), p - 1), (N - p) / (p * p));
    const T inner = std::pow(eps, 1 / (p - 1)) / (std::pow(eps, q) + std::pow(r, q));
    return c * std::pow(inner, (N - p) / p);
}

template <class T>
T derivative_t(T r, const InstantonSpec& s) {
    if (r <= 0) return 0;
    const T p = s.p, N = s.N, eps = s.eps;
    const T q = p / (p - 1);
    const T rq = std::pow(r, q);
    return -(N - p) / (p - 1) * value_t<T>(r, s) * (rq / r) / (std::pow(eps, q) + rq);
}

long double flux(long double r, const InstantonSpec& s, long double amp) {
    const long double d = amp * derivative_t<long double>(r, s);
    return std::pow(r, (long double)(s.N - 1)) * std::pow(std::abs(d), (long double)s.p - 2) * d;
}

}  // namespace

double instanton_prefactor(int N, double p) {
    return std::pow(N * std::pow((N - p) / (p - 1), p - 1), (N - p) / (p * p));
}

double u_value(double r, const InstantonSpec& s) {
    if (r < 0) throw DomainError("u_value: r must be >= 0");
    return value_t<double>(r, s);
}

double u_radial_derivative(double r, const InstantonSpec& s) {
    if (r < 0) throw DomainError("u_radial_derivative: r must be >= 0");
    return derivative_t<double>(r, s);
}

long double u_value_ld(long double r, const InstantonSpec& s) { return value_t<long double>(r, s); }
long double u_radial_derivative_ld(long double r, const InstantonSpec& s) {
    return derivative_t<long double>(r, s);
}

double plap_residual_scaled(double r, const InstantonSpec& s, double amp, double mu) {
    if (!(r > 0)) throw DomainError("plap_residual: r must be > 0");
    const long double R = r;
    // Step proportional to r keeps the stencil resolved for r << eps as well.
    const long double h = 1e-4L * R;
    const long double dF = (-flux(R + 2 * h, s, amp) + 8 * flux(R + h, s, amp) - 8 * flux(R - h, s, amp) +
                            flux(R - 2 * h, s, amp)) /
                           (12 * h);
    const long double lhs = -dF / std::pow(R, (long double)(s.N - 1));
    const long double ps = (long double)s.N * s.p / (s.N - s.p);
    const long double rhs = mu * std::pow(amp * value_t<long double>(R, s), ps - 1);
    return double(std::abs(lhs - rhs) / rhs);
}

double plap_residual(double r, const InstantonSpec& s) { return plap_residual_scaled(r, s, 1, 1); }

Norms norms(const InstantonSpec& s, const QuadratureSpec& q) {
    const double N = s.N, p = s.p, ps = N * p / (N - p);
    const double sig = sphere_area(s.N);
    Norms n;
    auto grad = [&](double r) { return sig * std::pow(r, N - 1) * std::pow(std::abs(derivative_t<double>(r, s)), p); };
    auto crit = [&](double r) { return sig * std::pow(r, N - 1) * std::pow(value_t<double>(r, s), ps); };
    auto lp = [&](double r) { return sig * std::pow(r, N - 1) * std::pow(value_t<double>(r, s), p); };
    const QuadResult g = integrate_radial(grad, 0, kInf, s.eps, q);
    const QuadResult c = integrate_radial(crit, 0, kInf, s.eps, q);
    n.grad_p = g.value;
    n.crit = c.value;
    n.grad_err = g.error;
    n.crit_err = c.error;
    if (std::abs(N - p * p) <= 1e-12 * N) {
        n.lp_status = LpStatus::log_divergent;
        n.lp = kInf;
    } else if (N < p * p) {
        n.lp_status = LpStatus::divergent;
        n.lp = kInf;
    } else {
        n.lp = integrate_radial(lp, 0, kInf, s.eps, q).value;
    }
    return n;
}

SobolevResult sobolev_constant(int N, double p, const QuadratureSpec& q) {
    if (!(p > 1 && p < N)) throw DomainError("sobolev_constant: need 1 < p < N");
    SobolevResult r;
    r.n = norms(InstantonSpec{N, p, 1.0, 0.0}, q);
    r.S = std::pow(r.n.grad_p, p / N);
    const double ps = N * p / (N - p);
    r.S_from_quotient = r.n.grad_p / std::pow(r.n.crit, p / ps);
    return r;
}

double omega_mu(int N, double p, double mu) {
    if (!(mu > 0)) throw DomainError("omega_mu: mu must be > 0");
    return std::pow(mu, (p - N) / (p * p));
}

double eta(double s, const CutoffSpec& c) {
    if (s <= c.inner_plateau) return 1;
    if (s >= c.outer_support) return 0;
    const double x = (s - c.inner_plateau) / (c.outer_support - c.inner_plateau);
    return 1 - x * x * x * (10 - 15 * x + 6 * x * x);
}

double eta_prime(double s, const CutoffSpec& c) {
    if (s <= c.inner_plateau || s >= c.outer_support) return 0;
    const double w = c.outer_support - c.inner_plateau;
    const double x = (s - c.inner_plateau) / w;
    return -30 * x * x * (1 - x) * (1 - x) / w;
}

CutoffNorms cutoff_norms(const InstantonSpec& s, const CutoffSpec& c, const QuadratureSpec& q) {
    if (!(c.rho > 0)) throw DomainError("cutoff_norms: rho must be > 0");
    const double N = s.N, p = s.p, ps = N * p / (N - p), rho = c.rho;
    const double sig = sphere_area(s.N);
    const double r1 = c.inner_plateau * rho, r2 = c.outer_support * rho;
    CutoffNorms out;
    out.warn_ratio = s.eps / rho > 0.1;
    const Norms full = norms(s, q);
    out.full = full.crit;

    auto dU = [&](double r) { return derivative_t<double>(r, s); };
    auto U = [&](double r) { return value_t<double>(r, s); };
    auto grad_cut = [&](double r) {
        const double g = eta(r / rho, c) * dU(r) + eta_prime(r / rho, c) * U(r) / rho;
        return sig * std::pow(r, N - 1) * (std::pow(std::abs(g), p) - std::pow(std::abs(dU(r)), p));
    };
    auto grad_tail = [&](double r) { return sig * std::pow(r, N - 1) * std::pow(std::abs(dU(r)), p); };
    auto crit_loss = [&](double r) {
        return sig * std::pow(r, N - 1) * std::pow(U(r), ps) * (1 - std::pow(eta(r / rho, c), ps));
    };
    auto crit_tail = [&](double r) { return sig * std::pow(r, N - 1) * std::pow(U(r), ps); };
    auto lp = [&](double r) { return sig * std::pow(r, N - 1) * std::pow(eta(r / rho, c) * U(r), p); };

    out.grad_dev = integrate_radial(grad_cut, r1, r2, s.eps, q).value -
                   integrate_radial(grad_tail, r2, kInf, s.eps, q).value;
    out.crit_dev = integrate_radial(crit_loss, r1, r2, s.eps, q).value +
                   integrate_radial(crit_tail, r2, kInf, s.eps, q).value;
    out.lp = integrate_radial(lp, 0, r1, s.eps, q).value + integrate_radial(lp, r1, r2, s.eps, q).value;
    out.grad_p = full.grad_p + out.grad_dev;
    out.crit = full.crit - out.crit_dev;
    return out;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

SlopeFit cutoff_slope_fit(int N, double p, const std::vector<double>& eps_ladder, const CutoffSpec& c,
                          const QuadratureSpec& q) {
    SlopeFit fit;
    std::vector<double> lx_g, ly_g, lx_c, ly_c, lx_l, ly_l;
    for (double e : eps_ladder) {
        const CutoffNorms cn = cutoff_norms(InstantonSpec{N, p, e, 0}, c, q);
        fit.eps.push_back(e);
        fit.points.push_back(cn);
        const double le = std::log(e);
        if (cn.grad_dev != 0 && std::isfinite(cn.grad_dev)) {
            lx_g.push_back(le);
            ly_g.push_back(std::log(std::abs(cn.grad_dev)));
        }
        if (cn.crit_dev > 0 && std::isfinite(cn.crit_dev)) {
            lx_c.push_back(le);
            ly_c.push_back(std::log(cn.crit_dev));
        }
        if (cn.lp > 0 && std::isfinite(cn.lp)) {
            lx_l.push_back(le);
            ly_l.push_back(std::log(cn.lp));
        }
    }
    if (lx_g.size() < 5 || lx_c.size() < 5 || lx_l.size() < 5)
        throw std::invalid_argument("cutoff_slope_fit: fewer than 5 usable ladder points");
    fit.slope_grad = ls_slope(lx_g, ly_g);
    fit.slope_crit = ls_slope(lx_c, ly_c);
    fit.slope_lp = ls_slope(lx_l, ly_l);
    return fit;
}

}  // namespace plapsys
