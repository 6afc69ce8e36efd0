#pragma once
#include <cstdint>
#include <functional>
#include <vector>

#include "plapsys/params.hpp"
#include "plapsys/quadrature.hpp"

namespace plapsys {

// Uniform grid on [0, R] for radial integrals over the ball B(0, R) in R^N.
struct RadialGrid {
    int N = 3;
    double R = 1;
    int n = 2001;
    double h = 0;
    std::vector<double> r;
    std::vector<double> w;     // node weights for integral of f(|x|) dx, exact for quadratic f
    std::vector<double> cell;  // exact measure of each annulus [r_i, r_{i+1}]

    static RadialGrid make(int N, double R, int n = 2001);
    double integrate(const std::vector<double>& f) const;
};

struct RadialField {
    std::vector<double> values;
    bool dirichlet_at_R = true;
};

struct MinimizeOptions {
    double step = 1;
    double tol = 1e-9;
    int max_iters = 50000;
    double delta_reg = 1e-8;
    std::uint64_t seed = 0;
};

// Outcome of a preconditioned descent on a homogeneous Rayleigh quotient.
struct Minimization {
    double value = 0;            // minimized quotient
    std::vector<RadialField> fields;
    int iterations = 0;
    double grad_norm = 0;        // final relative Newton decrement g.H^{-1}g / value
    double el_residual = 0;      // relative dual-norm Euler-Lagrange residual
    bool monotone = true;        // objective never increased on accepted steps
    std::vector<double> history;
};

// Integral of |u'|^p over the ball, with the gradient taken per cell.
double p_dirichlet(const RadialField& u, const RadialGrid& g, double p);

struct Lambda1Result {
    double value = 0;
    Minimization min;
};
Lambda1Result lambda1(const RadialGrid& g, double p, const MinimizeOptions& o = {});

// S_m on the ball: inf of the p-energy over (integral |u|^m)^{p/m}, p <= m < p*.
Minimization s_single(const RadialGrid& g, double p, double m, const MinimizeOptions& o = {});

struct SPairResult {
    Minimization min;
    double ratio_dev = 0;  // max relative deviation of v/u from (r/q)^{1/p} on interior nodes
};
// S_{q,r} on the ball: inf of (E(u)+E(v)) / (integral |u|^q |v|^r)^{p/(q+r)}.
SPairResult s_pair(const RadialGrid& g, double p, double q, double r, const MinimizeOptions& o = {});

// Closed-form factor (q+r)/(q^q r^r)^{1/(q+r)}.
double pair_factor(double q, double r);

struct Check011 {
    double lhs = 0, rhs = 0, rel_gap = 0, lambda1 = 0;
};
Check011 check_011(const RadialGrid& g, double p, double a, double b, const MinimizeOptions& o = {});

struct SubcriticalSpec {
    double eps = 0.2;
    double qe(const ProblemParams& pp) const { return pp.pstar() - 2 * eps; }
    double alpha_e(const ProblemParams& pp) const { return pp.alpha - eps; }
    double beta_e(const ProblemParams& pp) const { return pp.beta - eps; }
    // p(p*-2eps)/(p*-p-2eps)
    double q_eps(const ProblemParams& pp) const;
    void check(const ProblemParams& pp) const;  // throws DomainError
};

struct AEpsResult {
    double A_eps = 0;
    double grad_sum = 0;             // integral of |u'|^p + |v'|^p at the minimizer on N'_eps
    double identity_coefficient = 0; // (p*-2eps-p)/(p(p*-2eps))
    double literal_coefficient = 0;  // (p*-2eps-2)/(2(p*-2eps)), recorded only
    double identity_gap = 0;         // |A_eps - identity_coefficient*grad_sum| / A_eps
    double nehari_residual = 0;      // relative residual of the N'_eps constraint
    double symmetry_gap = 0;         // max |u - v| / max |u|
    double lagrange_residual = 0;
    double min_value = 0;            // smallest nodal value of both components
    Minimization min;                // fields scaled onto N'_eps
};
AEpsResult a_eps(const RadialGrid& g, const ProblemParams& pp, const SubcriticalSpec& spec,
                 const MinimizeOptions& o = {});

// Single-component level inf I_eps(u, 0) on N'_eps with coefficient mu.
Minimization single_level_min(const RadialGrid& g, const ProblemParams& pp, const SubcriticalSpec& spec,
                              double mu, const MinimizeOptions& o = {});
double single_level(const Minimization& m, const ProblemParams& pp, const SubcriticalSpec& spec);

struct TOfS {
    double s = 0, t = 0;
    double one_minus_t = 0;
};
struct LemmaL4Check {
    double A_eps = 0, a1 = 0, a2 = 0;
    bool strict = false;
    std::vector<TOfS> t_of_s;
    double t_at_zero = 0;
    double t_of_s_exponent = 0;
    double expected_exponent = 0;  // beta - eps
    double predicted_coefficient = 0;  // X / ((p*-2eps) a1)
    double cross_integral = 0;     // gamma * integral u1^{alpha-eps} u2^{beta-eps}
};
LemmaL4Check lemma_l4_check(const RadialGrid& g, const ProblemParams& pp, const SubcriticalSpec& spec,
                            const std::vector<double>& s_ladder = {0.2, 0.1, 0.05},
                            const MinimizeOptions& o = {});

// Unique t > 0 with t A = t^{qe/p} B, i.e. the factor that puts
// (t^{1/p} u, t^{1/p} v) on N'_eps (bracketed root finding in log t).
double nehari_scale(double A, double B, double p, double qe);

struct APrimeCheck {
    double level_R1 = 0, level_R2 = 0;
    double raw_gap = 0;        // |level_R2 - level_R1| / level_R1
    double defect_factor = 0;  // (R2/R1)^{-2 eps (N-p)/(qe-p)}
    double rel_gap = 0;        // gap after removing the defect factor
    double transported_gap = 0;  // level of the rescaled R1 minimizer on the R2 grid vs level_R2
};
APrimeCheck aprime_R_invariance(const ProblemParams& pp, double R1, double R2, const SubcriticalSpec& spec,
                                int n = 2001, const MinimizeOptions& o = {});

struct RayMax {
    double value = 0, tstar = 0;
};
RayMax max_over_ray(double A, double B, double p, double pstar);

struct MpRow {
    double eps = 0;
    double S_eps = 0;
    double S_ab = 0;
    double gap = 0;  // S_ab - S_eps
    bool below = false;
    bool warn_ratio = false;
};
struct MpResult {
    std::vector<MpRow> rows;
    double lambda_cap = 0;
    double gap_slope = 0;  // least-squares slope of log gap over rows with gap > 0
    int slope_points = 0;
};
MpResult mp_level(const ProblemParams& pp, const std::vector<double>& eps_ladder, double rho, double lambda1,
                  double S, const QuadratureSpec& q = {});

}  // namespace plapsys
