#pragma once
#include <vector>

#include "plapsys/quadrature.hpp"

namespace plapsys {

// Member of the extremal family: radial profile with scale eps, centred at
// distance center_offset along the first axis.
struct InstantonSpec {
    int N = 4;
    double p = 2;
    double eps = 1;
    double center_offset = 0;
};

enum class CutoffProfile { quintic_smoothstep };

struct CutoffSpec {
    double rho = 1;
    CutoffProfile profile = CutoffProfile::quintic_smoothstep;
    double inner_plateau = 0.25;
    double outer_support = 0.5;
};

// Prefactor c_{N,p} = [N((N-p)/(p-1))^{p-1}]^{(N-p)/p^2}.
double instanton_prefactor(int N, double p);

double u_value(double r, const InstantonSpec& s);
double u_radial_derivative(double r, const InstantonSpec& s);
long double u_value_ld(long double r, const InstantonSpec& s);
long double u_radial_derivative_ld(long double r, const InstantonSpec& s);

// Relative residual |(-Delta_p U)(r) - U^{p*-1}| / U^{p*-1}; the divergence of
// the flux r^{N-1}|U'|^{p-2}U' is taken by a five-point central difference.
double plap_residual(double r, const InstantonSpec& s);

// Same residual for amp*U against the right-hand side mu*u^{p*-1}.
double plap_residual_scaled(double r, const InstantonSpec& s, double amp, double mu);

enum class LpStatus { finite, log_divergent, divergent };

struct Norms {
    double grad_p = 0;  // integral of |grad U|^p over R^N
    double crit = 0;    // integral of U^{p*}
    double lp = 0;      // integral of U^p, only meaningful when lp_status == finite
    LpStatus lp_status = LpStatus::finite;
    double grad_err = 0, crit_err = 0;
};

Norms norms(const InstantonSpec& s, const QuadratureSpec& q = {});

struct SobolevResult {
    double S = 0;
    double S_from_quotient = 0;  // grad_p / crit^{p/p*}
    Norms n;
};

SobolevResult sobolev_constant(int N, double p, const QuadratureSpec& q = {});

// Amplitude mu^{(p-N)/p^2} turning U_{1,0} into a solution of
// -Delta_p w = mu w^{p*-1}.
double omega_mu(int N, double p, double mu);

// Cut-off profile eta on [0, inf) in units of rho, and its derivative.
double eta(double s, const CutoffSpec& c);
double eta_prime(double s, const CutoffSpec& c);

struct CutoffNorms {
    double grad_p = 0, lp = 0, crit = 0;
    // Signed deviations from the full-space value S^{N/p}, integrated
    // directly over the transition and tail regions.
    double grad_dev = 0;  // grad_p - S^{N/p}
    double crit_dev = 0;  // S^{N/p} - crit (>= 0)
    double full = 0;      // S^{N/p} from the same quadrature
    bool warn_ratio = false;  // eps/rho > 0.1
};

CutoffNorms cutoff_norms(const InstantonSpec& s, const CutoffSpec& c, const QuadratureSpec& q = {});

struct SlopeFit {
    double slope_grad = 0, slope_crit = 0, slope_lp = 0;
    std::vector<double> eps;
    std::vector<CutoffNorms> points;
};

// Least-squares slopes of log|deviation| against log eps.
SlopeFit cutoff_slope_fit(int N, double p, const std::vector<double>& eps_ladder, const CutoffSpec& c,
                          const QuadratureSpec& q = {});

// Ordinary least-squares slope of y against x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace plapsys
