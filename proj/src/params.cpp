#include "plapsys/params.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "plapsys/error.hpp"

namespace plapsys {

namespace {
constexpr double kSumTol = 1e-12;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}
}  // namespace

ProblemParams ProblemParams::make(int N, double p, double mu1, double mu2, double gamma,
                                  double alpha, double lambda, double a) {
    ProblemParams pp;
    pp.N = N;
    pp.p = p;
    pp.mu1 = mu1;
    pp.mu2 = mu2;
    pp.gamma = gamma;
    pp.lambda = lambda;
    pp.alpha = alpha > 0 ? alpha : pp.pstar() / 2;
    pp.a = a > 0 ? a : p / 2;
    pp.normalize();
    return pp;
}

ProblemParams ProblemParams::symmetric(int N, double p, double mu, double gamma) {
    return make(N, p, mu, mu, gamma);
}

void ProblemParams::normalize() {
    b = p - a;
    beta = pstar() - alpha;
}

std::string to_string(Case c) {
    switch (c) {
        case Case::H1: return "H1";
        case Case::H2: return "H2";
        default: return "Other";
    }
}

std::string to_string(Subcase s) {
    switch (s) {
        case Subcase::C1: return "C1";
        case Subcase::C2: return "C2";
        default: return "None";
    }
}

std::string to_string(ConstantVariant v) {
    return v == ConstantVariant::derived_Np ? "derived_Np" : "literal_paper";
}

ConstantVariant parse_variant(const std::string& s) {
    if (s == "derived_Np") return ConstantVariant::derived_Np;
    if (s == "literal_paper") return ConstantVariant::literal_paper;
    throw std::invalid_argument("unknown constant variant '" + s +
                                "' (expected derived_Np or literal_paper)");
}

Subcase classify_subcase(const ProblemParams& pp) {
    const double N = pp.N, p = pp.p;
    if (N / 2 < p && p < N && pp.alpha > p && pp.beta > p) return Subcase::C1;
    if (2 * N / (N + 2) < p && p < N / 2 && pp.alpha < p && pp.beta < p) return Subcase::C2;
    return Subcase::None;
}

Regime validate(const ProblemParams& pp) {
    Regime r;
    auto& n = r.notes;
    bool standing = true;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) {
            n.push_back(msg);
            standing = false;
        }
    };
    need(pp.N >= 3, "N >= 3 violated (N = " + std::to_string(pp.N) + ")");
    need(pp.p > 1 && pp.p < pp.N, "1 < p < N violated (p = " + fmt(pp.p) + ")");
    if (!standing) return r;  // p* undefined beyond this point

    const double ps = pp.pstar();
    need(std::abs(pp.a + pp.b - pp.p) <= kSumTol, "a + b = p violated (a + b = " + fmt(pp.a + pp.b) + ")");
    need(std::abs(pp.alpha + pp.beta - ps) <= kSumTol,
         "alpha + beta = p* violated (alpha + beta = " + fmt(pp.alpha + pp.beta) + ", p* = " + fmt(ps) + ")");
    need(pp.a > 1, "a > 1 violated");
    need(pp.b > 1, "b > 1 violated");
    need(pp.alpha > 1, "alpha > 1 violated");
    need(pp.beta > 1, "beta > 1 violated");
    need(pp.mu1 >= 0 && pp.mu2 >= 0, "mu1, mu2 >= 0 violated");
    need(pp.lambda >= 0, "lambda >= 0 violated");
    need(pp.gamma != 0, "gamma != 0 violated");

    if (pp.lambda == 0 && pp.mu1 > 0 && pp.mu2 > 0) {
        r.kind = Case::H1;
    } else if (pp.lambda > 0 && pp.mu1 == 0 && pp.mu2 == 0 && pp.gamma == 1) {
        r.kind = Case::H2;
    } else {
        r.kind = Case::Other;
        n.push_back("neither H1 (lambda = 0, mu1, mu2 > 0) nor H2 (lambda > 0, mu1 = mu2 = 0, gamma = 1)");
    }
    r.subcase = classify_subcase(pp);

    bool ok = standing && r.kind != Case::Other;
    if (r.kind == Case::H1 && pp.gamma > 0 && r.subcase == Subcase::None) {
        n.push_back("gamma > 0 needs C1 (N/2 < p < N, alpha, beta > p) or C2 (2N/(N+2) < p < N/2, alpha, beta < p)");
        ok = false;
    }
    if (r.kind == Case::H2 && pp.p > std::sqrt(double(pp.N))) {
        n.push_back("p <= sqrt(N) violated");
        ok = false;
    }
    r.feasible = ok;
    return r;
}

double c1_prefactor(const ProblemParams& pp, ConstantVariant v) {
    const double p = pp.p, N = pp.N;
    if (v == ConstantVariant::literal_paper) return 3 * p * p / ((3 - p) * (3 - p));
    return N * p * p / ((N - p) * (N - p));
}

double c1_upper(const ProblemParams& pp, ConstantVariant v) {
    if (classify_subcase(pp) != Subcase::C1)
        throw RegimeError("c1_upper needs subcase C1 (N/2 < p < N, alpha, beta > p)");
    const double p = pp.p, al = pp.alpha, be = pp.beta;
    const double t1 = pp.mu1 / al * std::pow((al - p) / (be - p), (be - p) / p);
    const double t2 = pp.mu2 / be * std::pow((be - p) / (al - p), (al - p) / p);
    return c1_prefactor(pp, v) * std::min(t1, t2);
}

double c2_lower(const ProblemParams& pp) {
    if (classify_subcase(pp) != Subcase::C2)
        throw RegimeError("c2_lower needs subcase C2 (2N/(N+2) < p < N/2, alpha, beta < p)");
    const double p = pp.p, N = pp.N, al = pp.alpha, be = pp.beta;
    const double t1 = pp.mu1 / al * std::pow((p - be) / (p - al), (p - be) / p);
    const double t2 = pp.mu2 / be * std::pow((p - al) / (p - be), (p - al) / p);
    return N * p * p / ((N - p) * (N - p)) * std::max(t1, t2);
}

double th5_lambda_cap(const ProblemParams& pp, double lambda1) {
    return pp.p / std::pow(std::pow(pp.a, pp.a) * std::pow(pp.b, pp.b), 1 / pp.p) * lambda1;
}

GammaThresholds gamma_thresholds(const ProblemParams& pp, ConstantVariant v, double lambda1) {
    GammaThresholds g{kNaN, kNaN, kNaN, v};
    const Subcase s = classify_subcase(pp);
    const Regime r = validate(pp);
    if (s == Subcase::None && r.kind != Case::H2)
        throw RegimeError("no gamma threshold applies: subcase C1 or C2 (or case H2) required");
    if (s == Subcase::C1) g.c1_upper = c1_upper(pp, v);
    if (s == Subcase::C2) g.c2_lower = c2_lower(pp);
    if (lambda1 > 0) g.th5_lambda_cap = th5_lambda_cap(pp, lambda1);
    return g;
}

DerivedExponents derived_exponents(const ProblemParams& pp) {
    return {pp.pstar(), (pp.N - pp.p) / pp.p, pp.N / pp.p};
}

}  // namespace plapsys
