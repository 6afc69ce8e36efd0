#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "plapsys/coupling.hpp"
#include "plapsys/params.hpp"

namespace plapsys {

// amp * U_{eps}(|x - center e_1|)
struct Bump {
    double amp = 1, eps = 1, center = 0;
};

// Axially symmetric field built from instanton bumps centred on the first axis.
struct AxialField {
    std::vector<Bump> bumps;
    bool radial() const;  // every center at the origin
    bool zero() const;
};

struct PairField {
    AxialField u, v;
};

// Pair of translated profiles: u centred at 0 and v at R e_1.
PairField two_center(double amp_u, double amp_v, double eps, double R);

struct PairQuad {
    double rel_tol = 1e-9;   // relative change between refinement levels
    int max_split = 4;       // 2D panel bisection levels
    bool force_2d = false;   // skip the radial shortcut
};

struct PairIntegrals {
    double Gu = 0, Gv = 0;  // integrals of |grad u|^p, |grad v|^p
    double Cu = 0, Cv = 0;  // integrals of |u|^{p*}, |v|^{p*}
    double X = 0;           // integral of |u|^alpha |v|^beta
    double rel_change = 0;  // last refinement change (0 on the radial path)
    bool two_d = false;
};

PairIntegrals pair_integrals(const PairField& pf, const ProblemParams& pp, const PairQuad& q = {});

// Functionals expressed through the scalar integrals.
double energy_I(const PairIntegrals& in, const ProblemParams& pp);
double energy_I(const PairField& pf, const ProblemParams& pp, const PairQuad& q = {});

struct NehariResiduals {
    double G1 = 0, G2 = 0;
};
NehariResiduals nehari_residuals(const PairIntegrals& in, const ProblemParams& pp);
NehariResiduals nehari_residuals(const PairField& pf, const ProblemParams& pp, const PairQuad& q = {});

// Residuals at (t^{1/p} u, s^{1/p} v) from the integrals of (u, v).
NehariResiduals scaled_residuals(const PairIntegrals& in, const ProblemParams& pp, double t, double s);
// Integrals of (t^{1/p} u, s^{1/p} v).
PairIntegrals scale_integrals(const PairIntegrals& in, const ProblemParams& pp, double t, double s);

struct NehariProjection {
    double t = 1, s = 1;
    double G1 = 0, G2 = 0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> trace;  // residual norm per iteration
};

NehariProjection project_to_N(const PairIntegrals& in, const ProblemParams& pp);
NehariProjection project_to_N(const PairField& pf, const ProblemParams& pp, const PairQuad& q = {});
double project_to_Nprime(const PairIntegrals& in, const ProblemParams& pp);
double project_to_Nprime(const PairField& pf, const ProblemParams& pp, const PairQuad& q = {});

struct Theorem2Check {
    double energy_at_candidate = 0;
    double closed_form_A = 0;
    double rel_gap = 0;
    NehariResiduals residuals;
    double grad_sum = 0;  // integral of |grad u|^p + |grad v|^p at the candidate
    bool match = false;
    bool thresholds_hold = false;  // gamma inside the C1/C2 window
    KLPair root;
};
Theorem2Check verify_theorem2(const ProblemParams& pp, double S, double eps = 1, const PairQuad& q = {});

struct LowerBoundEvidence {
    int samples = 0;
    int projection_failures = 0;  // draws discarded because projection failed
    double min_energy = 0;
    double level = 0;
    bool all_above = false;  // every projected energy >= level - 1e-6
    std::vector<double> energies;
};
// Random sums of 1-3 shifted and scaled bumps per component, projected onto the
// Nehari set; deterministic for a given seed.
PairField random_pair(std::uint64_t seed, int index);
LowerBoundEvidence random_lower_bound(const ProblemParams& pp, double level, int count, std::uint64_t seed,
                                      const PairQuad& q = {});

struct Theorem1Row {
    double R = 0;
    double cross_term = 0;
    double t_R = 0, s_R = 0;
    double energy = 0;
    double gap_to_limit = 0;  // energy - limit
    bool converged = false;
    std::string error;
};
struct Theorem1Result {
    double limit = 0;  // (1/N)(mu1^{-(N-p)/p} + mu2^{-(N-p)/p}) S^{N/p}
    double cross_term_R0 = 0;
    std::vector<Theorem1Row> rows;
};
Theorem1Result theorem1_experiment(const ProblemParams& pp, const std::vector<double>& R_ladder, double S,
                                   const PairQuad& q = {});

struct L3Matrix {
    double M[2][2] = {{0, 0}, {0, 0}};
    double det = 0;
    bool positive = false;
};
L3Matrix lemma_l3_matrix(const PairIntegrals& in, const ProblemParams& pp);
// The field overload projects onto the Nehari set before forming M.
L3Matrix lemma_l3_matrix(const PairField& pf, const ProblemParams& pp, const PairQuad& q = {});

// (u, v) -> c^{(N-p)/p} (u, v)(c x) applied to a bump field.
PairField rescale(const PairField& pf, double c);

struct RescalingCheck {
    double I0 = 0, I1 = 0, rel_gap = 0;
};
RescalingCheck rescaling_invariance(const PairField& pf, const ProblemParams& pp, double c, const PairQuad& q = {});

}  // namespace plapsys
