#pragma once
#include <string>
#include <vector>

namespace plapsys {

// Parameters of the coupled critical p-Laplacian system.
// p* is always derived from (N, p); b and beta are normalized to p - a and
// p* - alpha by make().
struct ProblemParams {
    int N = 5;
    double p = 2.2;
    double mu1 = 1, mu2 = 1;
    double lambda = 0;
    double gamma = 1;
    double a = 1.1, b = 1.1;
    double alpha = 0, beta = 0;

    double pstar() const { return N * p / (N - p); }

    // Builds a normalized parameter set; alpha <= 0 selects alpha = p*/2,
    // a <= 0 selects a = p/2.
    static ProblemParams make(int N, double p, double mu1, double mu2, double gamma,
                              double alpha = 0, double lambda = 0, double a = 0);
    // Symmetric two-field case with mu1 = mu2 = mu and alpha = beta.
    static ProblemParams symmetric(int N, double p, double mu, double gamma);
    void normalize();
};

enum class Case { H1, H2, Other };
enum class Subcase { C1, C2, None };
enum class ConstantVariant { derived_Np, literal_paper };

std::string to_string(Case c);
std::string to_string(Subcase s);
std::string to_string(ConstantVariant v);
ConstantVariant parse_variant(const std::string& s);

struct Regime {
    Case kind = Case::Other;
    Subcase subcase = Subcase::None;
    bool feasible = false;
    std::vector<std::string> notes;
};

// Never throws; every violated inequality is listed in notes.
Regime validate(const ProblemParams& pp);

// Subcase from (N, p, alpha, beta) alone.
Subcase classify_subcase(const ProblemParams& pp);

struct GammaThresholds {
    double c1_upper = 0;       // NaN when C1 does not apply
    double c2_lower = 0;       // NaN when C2 does not apply
    double th5_lambda_cap = 0; // NaN unless lambda1 was supplied
    ConstantVariant constant_variant = ConstantVariant::derived_Np;
};

double c1_prefactor(const ProblemParams& pp, ConstantVariant v);
double c1_upper(const ProblemParams& pp, ConstantVariant v = ConstantVariant::derived_Np);
double c2_lower(const ProblemParams& pp);
double th5_lambda_cap(const ProblemParams& pp, double lambda1);

// Throws RegimeError when neither subcase applies and the case is not H2.
GammaThresholds gamma_thresholds(const ProblemParams& pp,
                                 ConstantVariant v = ConstantVariant::derived_Np,
                                 double lambda1 = -1);

struct DerivedExponents {
    double pstar;
    double p_over_pstar_minus_p;  // equals (N - p)/p
    double N_over_p;
};
DerivedExponents derived_exponents(const ProblemParams& pp);

}  // namespace plapsys
