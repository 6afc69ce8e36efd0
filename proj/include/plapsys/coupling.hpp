#pragma once
#include <string>
#include <vector>

#include "plapsys/params.hpp"

namespace plapsys {

enum class Branch { minimal_k, minimal_l, continuation, other };
std::string to_string(Branch b);

struct KLPair {
    double k = 0, l = 0;
    double res1 = 0, res2 = 0;
    Branch branch = Branch::other;
    bool accepted() const;  // max residual < 1e-10
};

// Residuals of the algebraic system; k = 0 or l = 0 is allowed where the
// formula has a limit, negative arguments throw DomainError.
double F1(double k, double l, const ProblemParams& pp);
double F2(double k, double l, const ProblemParams& pp);

// Decoupled roots mu_i^{-p/(p*-p)}.
double k_max(const ProblemParams& pp);
double l_max(const ProblemParams& pp);

// Zero set of F1 solved for l (domain 0 < k <= k_max), and of F2 for k.
double curve_l_of_k(double k, const ProblemParams& pp);
double curve_k_of_l(double l, const ProblemParams& pp);
// Derivative of curve_l_of_k in closed form.
double curve_l_prime(double k, const ProblemParams& pp);

// Scalar reduction: F2(k, l(k)) multiplied by a positive factor.
double f_of_k(double k, const ProblemParams& pp);

struct Jac2 {
    double a11, a12, a21, a22;
    double det() const { return a11 * a22 - a12 * a21; }
};
Jac2 jacobian(double k, double l, const ProblemParams& pp);

KLPair make_pair(double k, double l, const ProblemParams& pp, Branch b);

// Smallest root in k of the reduced equation (bisection on the first sign
// change, then Newton polish).
KLPair solve_minimal_branch(const ProblemParams& pp, int resolution = 10000);
// Smallest root in l (roles of the two equations exchanged).
KLPair solve_minimal_l_branch(const ProblemParams& pp, int resolution = 10000);

struct MinimalBranch {
    KLPair primal, dual;
    bool dual_agrees = false;  // |k0-k1| + |l0-l1| <= 1e-9
};
MinimalBranch solve_minimal_pair(const ProblemParams& pp, int resolution = 10000);

// Every sign change of the reduced equation on a log grid, polished and
// deduplicated at 1e-6 relative, sorted by k.
std::vector<KLPair> enumerate_solutions(const ProblemParams& pp, int resolution = 10000);

enum class Claim { prop_p1, prop_p2, remark_r1 };
std::string to_string(Claim c);

struct UniquenessCertificate {
    Claim claim = Claim::remark_r1;
    bool holds = false;  // exactly one witness
    std::vector<KLPair> witnesses;
    int scan_resolution = 0;
};

struct P1Certificate {
    UniquenessCertificate cert;
    double x1 = 0, x2 = 0, g1_x1 = 0, g2_x2 = 0;
    bool analytic_ok = false;   // g1(x1) <= 0 and g2(x2) >= 0
    bool f1_decreasing = false; // sampled on 10^3 points
    bool f2_increasing = false;
};
P1Certificate prop_p1_certificate(const ProblemParams& pp, int resolution = 10000);

// The two one-variable functions whose monotonicity drives the C1 argument.
double p1_f1(double x, const ProblemParams& pp);
double p1_f2(double x, const ProblemParams& pp);

struct L2Certificate {
    double kbar = 0;
    double min_lprime = 0;         // closed form
    double lprime_at_kbar = 0;     // derivative formula evaluated at kbar
    double sum_bound_value = 0;    // (k0+l0)^{(p*-p)/p} max(mu1, mu2)
    bool sum_bound_ok = false;
    bool k_plus_l_increasing = false;
    bool dual_agrees = false;
    KLPair root;
};
L2Certificate lemma_l2_certificate(const ProblemParams& pp);

struct P2Certificate {
    UniquenessCertificate cert;
    KLPair root;
    double spacing = 0;
    int feasible_points = 0;
    bool boundary_violates_F1 = false;  // F1(k0+l0, 0) < 0
};
P2Certificate prop_p2_certificate(const ProblemParams& pp, int resolution = 500);

struct BranchPoint {
    double gamma = 0;
    KLPair pair;
    double jacobian_det = 0;
    double energy_level = 0;  // (1/N)(k+l) S^{N/p}
};

struct ContinuationResult {
    std::vector<BranchPoint> points;
    double gamma1_estimate = 0;  // last good gamma, or located degeneracy
    std::string stop_reason;     // completed, jacobian_degenerate, jacobian_sign_change, corrector_failed
    double literal_cap = 0;      // cap with exponents (2-beta)/2 as printed; NaN if undefined
    double p_analogue_cap = 0;   // same with exponents (p-beta)/p
};
ContinuationResult branch_continue(const ProblemParams& pp, const std::vector<double>& gamma_ladder,
                                   double S);

enum class LevelFormula { not_attained, attained };
std::string to_string(LevelFormula f);

struct LeastEnergy {
    double A = 0;
    LevelFormula formula = LevelFormula::attained;
    KLPair root;  // set when attained
};
LeastEnergy least_energy_level(const ProblemParams& pp, double S,
                               ConstantVariant v = ConstantVariant::derived_Np);

// (1/N)(k + l) S^{N/p}
double level_of(double k, double l, const ProblemParams& pp, double S);

}  // namespace plapsys
