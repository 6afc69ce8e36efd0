#include "plapsys/radial.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "plapsys/error.hpp"
#include "plapsys/instanton.hpp"

namespace plapsys {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

using Fields = std::vector<std::vector<double>>;

// Homogeneous lower-order functional: value and nodal gradients.
using PowerFn = std::function<double(const Fields&, Fields*)>;

double spow(double x, double e) { return x == 0 ? 0.0 : std::copysign(std::pow(std::abs(x), e), x); }

double energy(const RadialGrid& g, const std::vector<double>& u, double p) {
    double e = 0;
    for (int i = 0; i + 1 < g.n; ++i) e += g.cell[i] * std::pow(std::abs((u[i + 1] - u[i]) / g.h), p);
    return e;
}

std::vector<double> energy_grad(const RadialGrid& g, const std::vector<double>& u, double p) {
    std::vector<double> out(g.n, 0.0);
    for (int i = 0; i + 1 < g.n; ++i) {
        const double f = g.cell[i] * p * spow((u[i + 1] - u[i]) / g.h, p - 1) / g.h;
        out[i] -= f;
        out[i + 1] += f;
    }
    out[g.n - 1] = 0;
    return out;
}

// Solves the regularized tridiagonal Hessian of the p-energy on the free
// nodes 0..n-2 (Thomas algorithm).
std::vector<double> precondition(const RadialGrid& g, const std::vector<double>& u, double p, double delta,
                                 const std::vector<double>& rhs) {
    const int n = g.n, m = n - 1;
    double gmax = 0;
    std::vector<double> gr(m);
    for (int i = 0; i < m; ++i) {
        gr[i] = (u[i + 1] - u[i]) / g.h;
        gmax = std::max(gmax, std::abs(gr[i]));
    }
    const double d = std::max(delta, 1e-3 * gmax);
    std::vector<double> diag(n, 0.0), off(m, 0.0);
    for (int i = 0; i < m; ++i) {
        const double c = g.cell[i] * p * (p - 1) * std::pow(gr[i] * gr[i] + d * d, (p - 2) / 2) / (g.h * g.h);
        diag[i] += c;
        diag[i + 1] += c;
        off[i] = -c;
    }
    // Unknowns 0..m-1; the Dirichlet node is fixed.
    std::vector<double> cp(m), dp(m), x(n, 0.0);
    cp[0] = off[0] / diag[0];
    dp[0] = rhs[0] / diag[0];
    for (int i = 1; i < m; ++i) {
        const double den = diag[i] - off[i - 1] * cp[i - 1];
        cp[i] = i + 1 < m ? off[i] / den : 0;
        dp[i] = (rhs[i] - off[i - 1] * dp[i - 1]) / den;
    }
    x[m - 1] = dp[m - 1];
    for (int i = m - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
    return x;
}

std::vector<double> lumped(const RadialGrid& g) {
    std::vector<double> l(g.n, 0.0);
    for (int i = 0; i + 1 < g.n; ++i) {
        l[i] += 0.5 * g.cell[i];
        l[i + 1] += 0.5 * g.cell[i];
    }
    return l;
}

// Ratio of dual norms |a - b| / |a| over the free nodes.
double dual_rel(const RadialGrid& g, const Fields& a, const Fields& b) {
    const auto l = lumped(g);
    double num = 0, den = 0;
    for (size_t k = 0; k < a.size(); ++k)
        for (int i = 0; i + 1 < g.n; ++i) {
            num += (a[k][i] - b[k][i]) * (a[k][i] - b[k][i]) / l[i];
            den += a[k][i] * a[k][i] / l[i];
        }
    return den > 0 ? std::sqrt(num / den) : 0;
}

double total_energy(const RadialGrid& g, const Fields& f, double p) {
    double e = 0;
    for (const auto& u : f) e += energy(g, u, p);
    return e;
}

// Minimizes sum_k E(f_k) / P(f)^{p/m} for P homogeneous of degree m.
Minimization minimize_quotient(const RadialGrid& g, double p, double m, const PowerFn& P, Fields f,
                               const MinimizeOptions& o) {
    const int K = int(f.size());
    for (auto& u : f) u[g.n - 1] = 0;
    auto Q = [&](const Fields& x, double& Pv) {
        Pv = P(x, nullptr);
        return total_energy(g, x, p) / std::pow(Pv, p / m);
    };
    Minimization res;
    double Pv;
    double q = Q(f, Pv);
    if (!(Pv > 0) || !std::isfinite(q)) throw DomainError("minimize_quotient: initial field gives P <= 0");
    double tau = o.step;
    Fields gP(K, std::vector<double>(g.n)), dir(K);
    res.history.push_back(q);
    int it = 0;
    for (; it < o.max_iters; ++it) {
        const double e = total_energy(g, f, p);
        Pv = P(f, &gP);
        const double scale = std::pow(Pv, p / m);
        double dd = 0;
        Fields gq(K);
        for (int k = 0; k < K; ++k) {
            auto gE = energy_grad(g, f[k], p);
            gq[k].resize(g.n);
            for (int i = 0; i < g.n; ++i) gq[k][i] = (gE[i] - (p / m) * (e / Pv) * gP[k][i]) / scale;
            gq[k][g.n - 1] = 0;
            dir[k] = precondition(g, f[k], p, o.delta_reg, gq[k]);
            for (int i = 0; i < g.n; ++i) {
                dir[k][i] *= -scale;
                dd -= dir[k][i] * gq[k][i];
            }
        }
        // Relative Newton decrement: predicted relative decrease of the quotient.
        res.grad_norm = std::max(dd, 0.0) / q;
        if (res.grad_norm < o.tol) break;
        Fields trial(K);
        double qn = q;
        bool accepted = false;
        while (tau > 1e-14) {
            for (int k = 0; k < K; ++k) {
                trial[k] = f[k];
                for (int i = 0; i < g.n; ++i) trial[k][i] += tau * dir[k][i];
            }
            double Pn;
            qn = Q(trial, Pn);
            if (std::isfinite(qn) && Pn > 0 && qn <= q - 1e-4 * tau * dd) {
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if (!accepted) break;  // no further decrease representable
        double mx = 0;
        for (const auto& u : trial)
            for (double x : u) mx = std::max(mx, std::abs(x));
        for (auto& u : trial)
            for (double& x : u) x /= mx;
        f.swap(trial);
        const double qprev = q;
        q = Q(f, Pv);
        if (q > qprev) res.monotone = false;
        res.history.push_back(q);
        tau = std::min(o.step, 2 * tau);
    }
    res.iterations = it;
    res.value = q;
    if (!(res.grad_norm < o.tol) && it >= o.max_iters) {
        std::ostringstream os;
        os << "minimize_quotient: no convergence after " << it << " iterations, gradient measure "
           << res.grad_norm;
        std::vector<double> tail(res.history.end() - std::min<size_t>(res.history.size(), 20), res.history.end());
        throw ConvergenceError(os.str(), tail);
    }
    // Euler-Lagrange residual grad E = (p/m)(E/P) grad P.
    const double e = total_energy(g, f, p);
    Pv = P(f, &gP);
    Fields gE(K), rhs(K);
    for (int k = 0; k < K; ++k) {
        gE[k] = energy_grad(g, f[k], p);
        rhs[k].resize(g.n);
        for (int i = 0; i < g.n; ++i) rhs[k][i] = (p / m) * (e / Pv) * gP[k][i];
    }
    res.el_residual = dual_rel(g, gE, rhs);
    for (auto& u : f) res.fields.push_back(RadialField{u, true});
    return res;
}

std::vector<double> profile(const RadialGrid& g, int kind) {
    std::vector<double> u(g.n);
    for (int i = 0; i < g.n; ++i) {
        const double x = g.r[i] / g.R;
        const double b = 1 - x * x;
        u[i] = kind == 0 ? b : kind == 1 ? b * b * (1 + x) : 0.5 * b * b;
    }
    u[g.n - 1] = 0;
    return u;
}

PowerFn lp_functional(const RadialGrid& g, double m, double mu) {
    return [&g, m, mu](const Fields& f, Fields* grad) {
        double s = 0;
        for (int i = 0; i < g.n; ++i) s += g.w[i] * std::pow(std::abs(f[0][i]), m);
        if (grad)
            for (int i = 0; i < g.n; ++i) (*grad)[0][i] = mu * g.w[i] * m * spow(f[0][i], m - 1);
        return mu * s;
    };
}

// mu1|u|^m + mu2|v|^m + c|u|^a|v|^b integrated over the ball.
PowerFn pair_functional(const RadialGrid& g, double m, double mu1, double mu2, double c, double a, double b) {
    return [&g, m, mu1, mu2, c, a, b](const Fields& f, Fields* grad) {
        double s = 0;
        for (int i = 0; i < g.n; ++i) {
            const double u = std::abs(f[0][i]), v = std::abs(f[1][i]);
            const double ua = std::pow(u, a), vb = std::pow(v, b);
            double val = c * ua * vb;
            if (mu1 != 0) val += mu1 * std::pow(u, m);
            if (mu2 != 0) val += mu2 * std::pow(v, m);
            s += g.w[i] * val;
            if (grad) {
                double gu = c * a * spow(f[0][i], a - 1) * vb, gv = c * b * ua * spow(f[1][i], b - 1);
                if (mu1 != 0) gu += mu1 * m * spow(f[0][i], m - 1);
                if (mu2 != 0) gv += mu2 * m * spow(f[1][i], m - 1);
                (*grad)[0][i] = g.w[i] * gu;
                (*grad)[1][i] = g.w[i] * gv;
            }
        }
        return s;
    };
}

double max_abs(const std::vector<double>& u) {
    double m = 0;
    for (double x : u) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

RadialGrid RadialGrid::make(int N, double R, int n) {
    if (N < 1 || !(R > 0) || n < 8) throw DomainError("RadialGrid: need N >= 1, R > 0, n >= 8");
    RadialGrid g;
    g.N = N;
    g.R = R;
    g.n = n;
    g.h = R / (n - 1);
    g.r.resize(n);
    for (int i = 0; i < n; ++i) g.r[i] = i == n - 1 ? R : g.h * i;
    const double sig = sphere_area(N);
    // Product integration: the interpolant of f is integrated exactly against
    // r^{N-1}. Linear on the first 2N cells keeps weights positive near the
    // origin; piecewise quadratic on cell pairs beyond that.
    using GL = boost::math::quadrature::gauss<double, 30>;
    g.w.assign(n, 0.0);
    auto cell_integral = [&](double a, double b, const auto& basis) {
        return GL::integrate([&](double x) { return std::pow(x, N - 1) * basis(x); }, a, b);
    };
    const double h = g.h;
    const int K = N >= 3 ? std::min(2 * N, n - 1) : 0;
    for (int i = 0; i < K; ++i) {
        const double x0 = g.r[i];
        g.w[i] += cell_integral(x0, g.r[i + 1], [&](double x) { return 1 - (x - x0) / h; });
        g.w[i + 1] += cell_integral(x0, g.r[i + 1], [&](double x) { return (x - x0) / h; });
    }
    auto add_quadratic = [&](int i0, double a, double b) {
        const double x0 = g.r[i0];
        g.w[i0] += cell_integral(a, b, [&](double x) { const double s = (x - x0) / h; return (s - 1) * (s - 2) / 2; });
        g.w[i0 + 1] += cell_integral(a, b, [&](double x) { const double s = (x - x0) / h; return -s * (s - 2); });
        g.w[i0 + 2] += cell_integral(a, b, [&](double x) { const double s = (x - x0) / h; return s * (s - 1) / 2; });
    };
    int i = K;
    for (; i + 2 <= n - 1; i += 2) add_quadratic(i, g.r[i], g.r[i + 2]);
    if (i < n - 1) add_quadratic(n - 3, g.r[n - 2], g.r[n - 1]);
    for (double& w : g.w) w *= sig;
    g.cell.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i) g.cell[i] = sig * (std::pow(g.r[i + 1], N) - std::pow(g.r[i], N)) / N;
    return g;
}

double RadialGrid::integrate(const std::vector<double>& f) const {
    double s = 0;
    for (int i = 0; i < n; ++i) s += w[i] * f[i];
    return s;
}

double p_dirichlet(const RadialField& u, const RadialGrid& g, double p) {
    if (int(u.values.size()) != g.n) throw DomainError("p_dirichlet: field size does not match grid");
    if (!u.dirichlet_at_R || u.values.back() != 0)
        throw DomainError("p_dirichlet: field must vanish at R (dirichlet_at_R)");
    return energy(g, u.values, p);
}

Lambda1Result lambda1(const RadialGrid& g, double p, const MinimizeOptions& o) {
    Lambda1Result r;
    r.min = minimize_quotient(g, p, p, lp_functional(g, p, 1), {profile(g, 0)}, o);
    r.value = r.min.value;
    return r;
}

Minimization s_single(const RadialGrid& g, double p, double m, const MinimizeOptions& o) {
    const double ps = g.N > p ? g.N * p / (g.N - p) : kInf;
    if (!(m >= p && m < ps)) throw DomainError("s_single: exponent must satisfy p <= m < p*");
    return minimize_quotient(g, p, m, lp_functional(g, m, 1), {profile(g, 0)}, o);
}

double pair_factor(double q, double r) { return (q + r) / std::pow(std::pow(q, q) * std::pow(r, r), 1 / (q + r)); }

SPairResult s_pair(const RadialGrid& g, double p, double q, double r, const MinimizeOptions& o) {
    const double ps = g.N > p ? g.N * p / (g.N - p) : kInf;
    if (!(q > 1 && r > 1)) throw DomainError("s_pair: q, r > 1 required");
    if (!(q + r >= p && q + r < ps)) throw DomainError("s_pair: need p <= q + r < p*");
    SPairResult res;
    res.min = minimize_quotient(g, p, q + r, pair_functional(g, q + r, 0, 0, 1, q, r),
                                {profile(g, 0), profile(g, 1)}, o);
    const auto& u = res.min.fields[0].values;
    const auto& v = res.min.fields[1].values;
    const double want = std::pow(r / q, 1 / p);
    for (int i = 1; i < g.n - 1; ++i)
        if (u[i] > 1e-6 * max_abs(u)) res.ratio_dev = std::max(res.ratio_dev, std::abs(v[i] / u[i] / want - 1));
    return res;
}

Check011 check_011(const RadialGrid& g, double p, double a, double b, const MinimizeOptions& o) {
    if (std::abs(a + b - p) > 1e-12) throw DomainError("check_011: a + b = p required");
    Check011 c;
    c.lhs = s_pair(g, p, a, b, o).min.value;
    c.lambda1 = lambda1(g, p, o).value;
    c.rhs = p / std::pow(std::pow(a, a) * std::pow(b, b), 1 / p) * c.lambda1;
    c.rel_gap = std::abs(c.lhs - c.rhs) / c.rhs;
    return c;
}

double SubcriticalSpec::q_eps(const ProblemParams& pp) const {
    const double ps = pp.pstar();
    return pp.p * (ps - 2 * eps) / (ps - pp.p - 2 * eps);
}

void SubcriticalSpec::check(const ProblemParams& pp) const {
    if (!(eps > 0 && eps < std::min(pp.alpha, pp.beta) - 1))
        throw DomainError("SubcriticalSpec: eps must lie in (0, min(alpha, beta) - 1)");
    const double qe = pp.pstar() - 2 * eps;
    if (!(qe > pp.p)) throw DomainError("SubcriticalSpec: p*-2eps must exceed p");
}

AEpsResult a_eps(const RadialGrid& g, const ProblemParams& pp, const SubcriticalSpec& spec, const MinimizeOptions& o) {
    spec.check(pp);
    if (!(pp.gamma > 0)) throw RegimeError("a_eps: gamma > 0 required");
    const double p = pp.p, qe = spec.qe(pp);
    const PowerFn P = pair_functional(g, qe, pp.mu1, pp.mu2, pp.gamma, spec.alpha_e(pp), spec.beta_e(pp));
    AEpsResult r;
    r.min = minimize_quotient(g, p, qe, P, {profile(g, 0), profile(g, 2)}, o);
    Fields f{r.min.fields[0].values, r.min.fields[1].values};
    // Scale onto N'_eps: tau^{qe-p} = E/P.
    const double tau = std::pow(total_energy(g, f, p) / P(f, nullptr), 1 / (qe - p));
    for (auto& u : f)
        for (double& x : u) x *= tau;
    const double E = total_energy(g, f, p);
    Fields gP(2, std::vector<double>(g.n));
    const double Pv = P(f, &gP);
    r.grad_sum = E;
    r.A_eps = E / p - Pv / qe;
    r.identity_coefficient = (qe - p) / (p * qe);
    r.literal_coefficient = (qe - 2) / (2 * qe);
    r.identity_gap = std::abs(r.A_eps - r.identity_coefficient * E) / r.A_eps;
    r.nehari_residual = std::abs(E - Pv) / E;
    Fields gE{energy_grad(g, f[0], p), energy_grad(g, f[1], p)};
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < g.n; ++i) {
            gE[k][i] /= p;
            gP[k][i] /= qe;
        }
    r.lagrange_residual = dual_rel(g, gE, gP);
    double d = 0;
    for (int i = 0; i < g.n; ++i) d = std::max(d, std::abs(f[0][i] - f[1][i]));
    r.symmetry_gap = d / max_abs(f[0]);
    r.min_value = std::min(*std::min_element(f[0].begin(), f[0].end()), *std::min_element(f[1].begin(), f[1].end()));
    r.min.fields = {RadialField{f[0], true}, RadialField{f[1], true}};
    return r;
}

Minimization single_level_min(const RadialGrid& g, const ProblemParams& pp, const SubcriticalSpec& spec, double mu,
                              const MinimizeOptions& o) {
    spec.check(pp);
    if (!(mu > 0)) throw DomainError("single_level_min: mu must be > 0");
    const double p = pp.p, qe = spec.qe(pp);
    Minimization m = minimize_quotient(g, p, qe, lp_functional(g, qe, mu), {profile(g, 0)}, o);
    auto& u = m.fields[0].values;
    double P = 0;
    for (int i = 0; i < g.n; ++i) P += g.w[i] * mu * std::pow(std::abs(u[i]), qe);
    const double tau = std::pow(energy(g, u, p) / P, 1 / (qe - p));
    for (double& x : u) x *= tau;
    return m;
}

double single_level(const Minimization& m, const ProblemParams& pp, const SubcriticalSpec& spec) {
    const double p = pp.p, qe = spec.qe(pp);
    return (1 / p - 1 / qe) * std::pow(m.value, qe / (qe - p));
}

double nehari_scale(double A, double B, double p, double qe) {
    if (!(A > 0 && B > 0)) throw DomainError("nehari_scale: A, B > 0 required");
    // log t solves log A = (qe/p - 1) log t + log B.
    const double k = qe / p - 1;
    auto f = [&](double x) { return std::log(A) - k * x - std::log(B); };
    double lo = -1, hi = 1;
    while (f(lo) < 0) lo *= 2;
    while (f(hi) > 0) hi *= 2;
    std::uintmax_t it = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), it);
    return std::exp(0.5 * (r.first + r.second));
}

LemmaL4Check lemma_l4_check(const RadialGrid& g, const ProblemParams& pp, const SubcriticalSpec& spec,
                            const std::vector<double>& s_ladder, const MinimizeOptions& o) {
    if (classify_subcase(pp) != Subcase::C2) throw RegimeError("lemma_l4_check: subcase C2 required");
    LemmaL4Check c;
    const double p = pp.p, qe = spec.qe(pp), q = spec.q_eps(pp);
    c.A_eps = a_eps(g, pp, spec, o).A_eps;
    const Minimization m1 = single_level_min(g, pp, spec, pp.mu1, o);
    const Minimization m2 = pp.mu2 == pp.mu1 ? m1 : single_level_min(g, pp, spec, pp.mu2, o);
    c.a1 = single_level(m1, pp, spec);
    c.a2 = single_level(m2, pp, spec);
    c.strict = c.A_eps < std::min(c.a1, c.a2) - 1e-6;
    const auto& u1 = m1.fields[0].values;
    const auto& u2 = m2.fields[0].values;
    double X = 0;
    for (int i = 0; i < g.n; ++i)
        X += g.w[i] * std::pow(u1[i], spec.alpha_e(pp)) * std::pow(u2[i], spec.beta_e(pp));
    c.cross_integral = pp.gamma * X;
    c.expected_exponent = spec.beta_e(pp);
    c.predicted_coefficient = c.cross_integral / (qe * c.a1);
    auto t_of = [&](double s) {
        const double as = std::abs(s);
        const double A = q * c.a1 + q * c.a2 * std::pow(as, p);
        const double B = q * c.a1 + q * c.a2 * std::pow(as, qe) + std::pow(as, spec.beta_e(pp)) * c.cross_integral;
        return nehari_scale(A, B, p, qe);
    };
    c.t_at_zero = t_of(0);
    std::vector<double> lx, ly;
    for (double s : s_ladder) {
        const double t = t_of(s);
        c.t_of_s.push_back({s, t, 1 - t});
        if (1 - t > 0) {
            lx.push_back(std::log(std::abs(s)));
            ly.push_back(std::log(1 - t));
        }
    }
    c.t_of_s_exponent = lx.size() >= 2 ? ls_slope(lx, ly) : kNaN;
    return c;
}

APrimeCheck aprime_R_invariance(const ProblemParams& pp, double R1, double R2, const SubcriticalSpec& spec, int n,
                                const MinimizeOptions& o) {
    if (!(R1 > 0 && R2 > 0)) throw DomainError("aprime_R_invariance: radii must be > 0");
    APrimeCheck c;
    const RadialGrid g1 = RadialGrid::make(pp.N, R1, n);
    const AEpsResult a1 = a_eps(g1, pp, spec, o);
    c.level_R1 = a1.A_eps;
    const double N = pp.N, p = pp.p, qe = spec.qe(pp);
    c.defect_factor = std::pow(R2 / R1, -2 * spec.eps * (N - p) / (qe - p));
    if (R1 == R2) {
        c.level_R2 = c.level_R1;
        return c;
    }
    const RadialGrid g2 = RadialGrid::make(pp.N, R2, n);
    c.level_R2 = a_eps(g2, pp, spec, o).A_eps;
    c.raw_gap = std::abs(c.level_R2 - c.level_R1) / c.level_R1;
    c.rel_gap = std::abs(c.level_R2 / c.defect_factor - c.level_R1) / c.level_R1;
    // Transport the R1 minimizer: w(r) = lam^{(N-p)/p} u(lam r), lam = R1/R2, then rescale onto N'_eps.
    const double lam = R1 / R2;
    Fields f{a1.min.fields[0].values, a1.min.fields[1].values};
    for (auto& u : f)
        for (double& x : u) x *= std::pow(lam, (N - p) / p);
    const PowerFn P = pair_functional(g2, qe, pp.mu1, pp.mu2, pp.gamma, spec.alpha_e(pp), spec.beta_e(pp));
    const double E = total_energy(g2, f, p), Pv = P(f, nullptr);
    const double t = std::pow(E / Pv, 1 / (qe - p));
    const double level = (1 / p - 1 / qe) * std::pow(t, p) * E;
    c.transported_gap = std::abs(level - c.level_R2) / c.level_R2;
    return c;
}

RayMax max_over_ray(double A, double B, double p, double pstar) {
    if (!(A > 0 && B > 0)) throw DomainError("max_over_ray: A, B > 0 required");
    if (!(pstar > p && p > 1)) throw DomainError("max_over_ray: need 1 < p < p*");
    const double N = p * pstar / (pstar - p);
    RayMax r;
    r.value = std::pow(A / std::pow(B, p / pstar), N / p) / N;
    r.tstar = std::pow(A / B, 1 / (pstar - p));
    return r;
}

MpResult mp_level(const ProblemParams& pp, const std::vector<double>& eps_ladder, double rho, double lambda1,
                  double S, const QuadratureSpec& q) {
    const Regime reg = validate(pp);
    if (reg.kind != Case::H2) throw RegimeError("mp_level: case H2 required");
    if (!(pp.p <= std::sqrt(double(pp.N)))) throw RegimeError("mp_level: p <= sqrt(N) required");
    if (!(lambda1 > 0)) throw DomainError("mp_level: lambda1 must be > 0");
    MpResult res;
    res.lambda_cap = th5_lambda_cap(pp, lambda1);
    if (!(pp.lambda < res.lambda_cap)) {
        std::ostringstream os;
        os << "mp_level: lambda = " << pp.lambda << " must lie below p/(a^a b^b)^{1/p} lambda1 = " << res.lambda_cap;
        throw RegimeError(os.str());
    }
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta;
    const double kappa = std::pow(std::pow(al, pp.a) * std::pow(be, pp.b), 1 / p);
    const double S_ab = ps * S / std::pow(std::pow(al, al) * std::pow(be, be), 1 / ps);
    std::vector<double> lx, ly;
    for (double e : eps_ladder) {
        const CutoffNorms cn = cutoff_norms(InstantonSpec{pp.N, p, e, 0}, CutoffSpec{rho}, q);
        const double x = cn.grad_dev / cn.full, z = cn.crit_dev / cn.full;
        const double y = pp.lambda * kappa * cn.lp / (ps * cn.full);
        // S_eps / S_ab = (1 + x - y) / (1 - z)^{p/p*}
        const double lr = std::log1p(x - y) - (p / ps) * std::log1p(-z);
        MpRow row;
        row.eps = e;
        row.S_ab = S_ab;
        row.S_eps = S_ab * std::exp(lr);
        row.gap = -S_ab * std::expm1(lr);
        row.below = row.gap > 0;
        row.warn_ratio = cn.warn_ratio;
        res.rows.push_back(row);
        if (row.gap > 0) {
            lx.push_back(std::log(e));
            ly.push_back(std::log(row.gap));
        }
    }
    res.slope_points = int(lx.size());
    res.gap_slope = lx.size() >= 2 ? ls_slope(lx, ly) : kNaN;
    return res;
}

}  // namespace plapsys
