#include "plapsys/energy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "plapsys/error.hpp"
#include "plapsys/instanton.hpp"
#include "plapsys/quadrature.hpp"

namespace plapsys {

namespace {

// Per-bump constants so that a field value costs two pow calls.
struct BumpEval {
    double amp, center, eq, pre, ex, q, slope;
};

struct FieldEval {
    std::vector<BumpEval> b;
    FieldEval(const AxialField& f, const ProblemParams& pp) {
        const double N = pp.N, p = pp.p, q = p / (p - 1);
        const double c = instanton_prefactor(pp.N, p);
        for (const Bump& x : f.bumps) {
            if (!(x.eps > 0)) throw DomainError("bump eps must be > 0");
            BumpEval e;
            e.amp = x.amp;
            e.center = x.center;
            e.eq = std::pow(x.eps, q);
            e.ex = -(N - p) / p;
            e.pre = x.amp * c * std::pow(std::pow(x.eps, 1 / (p - 1)), (N - p) / p);
            e.q = q;
            e.slope = -(N - p) / (p - 1);
            b.push_back(e);
        }
    }
    // Value and gradient components (axial, transverse) at (t, s).
    void at(double t, double s, double& u, double& gt, double& gs) const {
        u = gt = gs = 0;
        for (const BumpEval& e : b) {
            const double dt = t - e.center;
            const double rho = std::hypot(dt, s);
            const double rq = std::pow(rho, e.q);
            const double U = e.pre * std::pow(e.eq + rq, e.ex);
            u += U;
            if (rho > 0) {
                const double dU = e.slope * U * rq / (rho * (e.eq + rq));
                gt += dU * dt / rho;
                gs += dU * s / rho;
            }
        }
    }
    // Radial value and derivative at r (all centers zero).
    void radial(double r, double& u, double& du) const {
        u = du = 0;
        for (const BumpEval& e : b) {
            const double rq = std::pow(r, e.q);
            const double U = e.pre * std::pow(e.eq + rq, e.ex);
            u += U;
            if (r > 0) du += e.slope * U * rq / (r * (e.eq + rq));
        }
    }
};

double min_eps(const PairField& pf) {
    double m = kInf;
    for (const auto* f : {&pf.u, &pf.v})
        for (const Bump& b : f->bumps) m = std::min(m, b.eps);
    return m;
}

double max_eps(const PairField& pf) {
    double m = 0;
    for (const auto* f : {&pf.u, &pf.v})
        for (const Bump& b : f->bumps) m = std::max(m, b.eps);
    return m;
}

struct Acc {
    double Gu = 0, Gv = 0, Cu = 0, Cv = 0, X = 0;
};

void add_point(Acc& a, double w, double u, double ut, double us, double v, double vt, double vs,
               const ProblemParams& pp) {
    const double p = pp.p, ps = pp.pstar();
    const double gu = ut * ut + us * us, gv = vt * vt + vs * vs;
    if (gu > 0) a.Gu += w * std::pow(gu, p / 2);
    if (gv > 0) a.Gv += w * std::pow(gv, p / 2);
    const double lu = u > 0 ? std::log(u) : -kInf, lv = v > 0 ? std::log(v) : -kInf;
    if (u > 0) a.Cu += w * std::exp(ps * lu);
    if (v > 0) a.Cv += w * std::exp(ps * lv);
    if (u > 0 && v > 0) a.X += w * std::exp(pp.alpha * lu + pp.beta * lv);
}

Acc integrate_2d(const FieldEval& fu, const FieldEval& fv, const std::vector<double>& centers, double hmin,
                 double hmax, int split, int order, const ProblemParams& pp) {
    const Rule1D rt = graded_rule(centers, hmin, hmax, false, split, order);
    const Rule1D rs = graded_rule({}, hmin, hmax, true, split, order);
    const double sig = sphere_area(pp.N - 1);
    Acc a;
    for (size_t j = 0; j < rs.x.size(); ++j) {
        const double s = rs.x[j];
        const double ws = rs.w[j] * sig * std::pow(s, pp.N - 2);
        if (!(ws > 0)) continue;
        for (size_t i = 0; i < rt.x.size(); ++i) {
            double u, ut, us, v, vt, vs;
            fu.at(rt.x[i], s, u, ut, us);
            fv.at(rt.x[i], s, v, vt, vs);
            add_point(a, rt.w[i] * ws, u, ut, us, v, vt, vs, pp);
        }
    }
    return a;
}

double rel(double a, double b) {
    const double m = std::max(std::abs(a), std::abs(b));
    return m > 0 ? std::abs(a - b) / m : 0;
}

double max_rel(const Acc& a, const Acc& b) {
    return std::max({rel(a.Gu, b.Gu), rel(a.Gv, b.Gv), rel(a.Cu, b.Cu), rel(a.Cv, b.Cv), rel(a.X, b.X)});
}

}  // namespace

bool AxialField::radial() const {
    return std::all_of(bumps.begin(), bumps.end(), [](const Bump& b) { return b.center == 0; });
}

bool AxialField::zero() const {
    return std::all_of(bumps.begin(), bumps.end(), [](const Bump& b) { return b.amp == 0; });
}

PairField two_center(double amp_u, double amp_v, double eps, double R) {
    return PairField{AxialField{{Bump{amp_u, eps, 0}}}, AxialField{{Bump{amp_v, eps, R}}}};
}

PairIntegrals pair_integrals(const PairField& pf, const ProblemParams& pp, const PairQuad& q) {
    const FieldEval fu(pf.u, pp), fv(pf.v, pp);
    PairIntegrals out;
    if (fu.b.empty() && fv.b.empty()) return out;
    const double N = pp.N;
    if (!q.force_2d && pf.u.radial() && pf.v.radial()) {
        const double sig = sphere_area(pp.N);
        QuadratureSpec qs;
        qs.rel_tol = std::min(q.rel_tol, 1e-12);
        const double scale = min_eps(pf);
        auto integral = [&](int which) {
            auto f = [&](double r) {
                double u, du, v, dv;
                fu.radial(r, u, du);
                fv.radial(r, v, dv);
                Acc a;
                add_point(a, 1, u, du, 0, v, dv, 0, pp);
                const double vals[5] = {a.Gu, a.Gv, a.Cu, a.Cv, a.X};
                return sig * std::pow(r, N - 1) * vals[which];
            };
            return integrate_radial(f, 0, kInf, scale, qs).value;
        };
        out.Gu = integral(0);
        out.Gv = integral(1);
        out.Cu = integral(2);
        out.Cv = integral(3);
        out.X = integral(4);
        return out;
    }
    std::vector<double> centers;
    for (const auto* f : {&pf.u, &pf.v})
        for (const Bump& b : f->bumps) centers.push_back(b.center);
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
    const double hmin = min_eps(pf) / 64;
    const double spread = centers.back() - centers.front();
    const double hmax = std::max(4 * max_eps(pf), spread);
    // The 5-point rule on the base panels gives a cheap first error estimate;
    // panel bisection takes over when it is not conclusive.
    Acc prev = integrate_2d(fu, fv, centers, hmin, hmax, 0, 10, pp);
    double change = max_rel(integrate_2d(fu, fv, centers, hmin, hmax, 0, 5, pp), prev);
    for (int split = 1; split <= q.max_split && !(change < q.rel_tol); ++split) {
        const Acc cur = integrate_2d(fu, fv, centers, hmin, hmax, split, 10, pp);
        change = max_rel(prev, cur);
        prev = cur;
        if (change < q.rel_tol) break;
    }
    if (!(change < q.rel_tol)) {
        std::ostringstream os;
        os << "pair_integrals: 2D refinement stalled at relative change " << change;
        throw ConvergenceError(os.str(), {change});
    }
    out = PairIntegrals{prev.Gu, prev.Gv, prev.Cu, prev.Cv, prev.X, change, true};
    return out;
}

double energy_I(const PairIntegrals& in, const ProblemParams& pp) {
    return (in.Gu + in.Gv) / pp.p - (pp.mu1 * in.Cu + pp.mu2 * in.Cv + pp.gamma * in.X) / pp.pstar();
}

double energy_I(const PairField& pf, const ProblemParams& pp, const PairQuad& q) {
    return energy_I(pair_integrals(pf, pp, q), pp);
}

NehariResiduals nehari_residuals(const PairIntegrals& in, const ProblemParams& pp) {
    return scaled_residuals(in, pp, 1, 1);
}

NehariResiduals nehari_residuals(const PairField& pf, const ProblemParams& pp, const PairQuad& q) {
    return nehari_residuals(pair_integrals(pf, pp, q), pp);
}

PairIntegrals scale_integrals(const PairIntegrals& in, const ProblemParams& pp, double t, double s) {
    const double p = pp.p, r = pp.pstar() / p;
    PairIntegrals o = in;
    o.Gu = t * in.Gu;
    o.Gv = s * in.Gv;
    o.Cu = std::pow(t, r) * in.Cu;
    o.Cv = std::pow(s, r) * in.Cv;
    o.X = std::pow(t, pp.alpha / p) * std::pow(s, pp.beta / p) * in.X;
    return o;
}

NehariResiduals scaled_residuals(const PairIntegrals& in, const ProblemParams& pp, double t, double s) {
    const PairIntegrals o = scale_integrals(in, pp, t, s);
    const double ps = pp.pstar();
    return {o.Gu - pp.mu1 * o.Cu - pp.alpha * pp.gamma / ps * o.X,
            o.Gv - pp.mu2 * o.Cv - pp.beta * pp.gamma / ps * o.X};
}

NehariProjection project_to_N(const PairIntegrals& in, const ProblemParams& pp) {
    if (!(in.X > 0)) throw DomainError("project_to_N: coupling integral must be positive");
    if (!(in.Gu > 0 && in.Gv > 0)) throw DomainError("project_to_N: both components must be nonzero");
    const double p = pp.p, ps = pp.pstar(), e = p / (ps - p);
    NehariProjection pr;
    double x = pp.mu1 > 0 ? e * std::log(in.Gu / (pp.mu1 * in.Cu)) : 0;
    double y = pp.mu2 > 0 ? e * std::log(in.Gv / (pp.mu2 * in.Cv)) : 0;
    auto norm = [](const NehariResiduals& r) { return std::hypot(r.G1, r.G2); };
    NehariResiduals r = scaled_residuals(in, pp, std::exp(x), std::exp(y));
    for (int it = 0; it < 200; ++it) {
        pr.trace.push_back(norm(r));
        pr.iterations = it;
        if (std::max(std::abs(r.G1), std::abs(r.G2)) < 1e-9) {
            pr.converged = true;
            break;
        }
        const PairIntegrals o = scale_integrals(in, pp, std::exp(x), std::exp(y));
        const double c1 = pp.alpha * pp.gamma / ps * o.X, c2 = pp.beta * pp.gamma / ps * o.X;
        const double a11 = o.Gu - ps / p * pp.mu1 * o.Cu - pp.alpha / p * c1;
        const double a12 = -pp.beta / p * c1;
        const double a21 = -pp.alpha / p * c2;
        const double a22 = o.Gv - ps / p * pp.mu2 * o.Cv - pp.beta / p * c2;
        const double d = a11 * a22 - a12 * a21;
        if (!(std::abs(d) > 0) || !std::isfinite(d)) break;
        const double dx = -(r.G1 * a22 - a12 * r.G2) / d, dy = -(a11 * r.G2 - a21 * r.G1) / d;
        double lam = 1;
        bool moved = false;
        while (lam >= std::ldexp(1.0, -20)) {
            const NehariResiduals rn = scaled_residuals(in, pp, std::exp(x + lam * dx), std::exp(y + lam * dy));
            if (std::isfinite(rn.G1) && std::isfinite(rn.G2) && norm(rn) < norm(r)) {
                x += lam * dx;
                y += lam * dy;
                r = rn;
                moved = true;
                break;
            }
            lam *= 0.5;
        }
        if (!moved) break;
    }
    pr.t = std::exp(x);
    pr.s = std::exp(y);
    pr.G1 = r.G1;
    pr.G2 = r.G2;
    if (!pr.converged && std::max(std::abs(r.G1), std::abs(r.G2)) < 1e-9) pr.converged = true;
    if (!pr.converged) {
        std::ostringstream os;
        os << "project_to_N: no convergence after " << pr.trace.size() << " iterations, residual "
           << std::hypot(r.G1, r.G2);
        throw ConvergenceError(os.str(), pr.trace);
    }
    return pr;
}

NehariProjection project_to_N(const PairField& pf, const ProblemParams& pp, const PairQuad& q) {
    return project_to_N(pair_integrals(pf, pp, q), pp);
}

double project_to_Nprime(const PairIntegrals& in, const ProblemParams& pp) {
    const double num = in.Gu + in.Gv;
    const double den = pp.mu1 * in.Cu + pp.mu2 * in.Cv + pp.gamma * in.X;
    if (!(den > 0)) throw DomainError("project_to_Nprime: denominator must be positive");
    if (!(num > 0)) throw DomainError("project_to_Nprime: pair must be nonzero");
    return std::pow(num / den, pp.p / (pp.pstar() - pp.p));
}

double project_to_Nprime(const PairField& pf, const ProblemParams& pp, const PairQuad& q) {
    return project_to_Nprime(pair_integrals(pf, pp, q), pp);
}

Theorem2Check verify_theorem2(const ProblemParams& pp, double S, double eps, const PairQuad& q) {
    const Regime reg = validate(pp);
    if (reg.kind != Case::H1 || !(pp.gamma > 0))
        throw RegimeError("verify_theorem2: case H1 with gamma > 0 required");
    Theorem2Check c;
    if (reg.subcase == Subcase::C1) c.thresholds_hold = pp.gamma <= c1_upper(pp);
    if (reg.subcase == Subcase::C2) c.thresholds_hold = pp.gamma >= c2_lower(pp) * (1 - 1e-12);
    c.root = solve_minimal_branch(pp);
    const double p = pp.p;
    PairField pf{AxialField{{Bump{std::pow(c.root.k, 1 / p), eps, 0}}},
                 AxialField{{Bump{std::pow(c.root.l, 1 / p), eps, 0}}}};
    const PairIntegrals in = pair_integrals(pf, pp, q);
    c.energy_at_candidate = energy_I(in, pp);
    c.closed_form_A = level_of(c.root.k, c.root.l, pp, S);
    c.rel_gap = std::abs(c.energy_at_candidate - c.closed_form_A) / std::abs(c.closed_form_A);
    c.residuals = nehari_residuals(in, pp);
    c.grad_sum = in.Gu + in.Gv;
    c.match = c.rel_gap < 1e-6 && std::abs(c.residuals.G1) < 1e-8 && std::abs(c.residuals.G2) < 1e-8;
    return c;
}

PairField random_pair(std::uint64_t seed, int index) {
    std::seed_seq ss{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index)};
    std::mt19937_64 rng(ss);
    std::uniform_real_distribution<double> amp(0.3, 1.5), eps(0.5, 2.0), ctr(-2.0, 2.0);
    std::uniform_int_distribution<int> count(1, 3);
    PairField pf;
    for (AxialField* f : {&pf.u, &pf.v}) {
        const int n = count(rng);
        for (int i = 0; i < n; ++i) {
            const double a = amp(rng), e = eps(rng), c = ctr(rng);
            f->bumps.push_back(Bump{a, e, c});
        }
    }
    return pf;
}

LowerBoundEvidence random_lower_bound(const ProblemParams& pp, double level, int count, std::uint64_t seed,
                                      const PairQuad& q) {
    LowerBoundEvidence ev;
    ev.level = level;
    ev.min_energy = kInf;
    int index = 0;
    while (ev.samples < count) {
        if (index > 10 * count + 100) throw ConvergenceError("random_lower_bound: too many projection failures");
        const PairField pf = random_pair(seed, index++);
        try {
            const PairIntegrals in = pair_integrals(pf, pp, q);
            const NehariProjection pr = project_to_N(in, pp);
            const double E = energy_I(scale_integrals(in, pp, pr.t, pr.s), pp);
            ev.energies.push_back(E);
            ev.min_energy = std::min(ev.min_energy, E);
            ++ev.samples;
        } catch (const ConvergenceError&) {
            ++ev.projection_failures;
        }
    }
    ev.all_above = ev.min_energy >= level - 1e-6;
    return ev;
}

Theorem1Result theorem1_experiment(const ProblemParams& pp, const std::vector<double>& R_ladder, double S,
                                   const PairQuad& q) {
    if (!(pp.gamma < 0)) throw RegimeError("theorem1_experiment: gamma < 0 required");
    if (!(pp.mu1 > 0 && pp.mu2 > 0)) throw RegimeError("theorem1_experiment: mu1, mu2 > 0 required");
    for (size_t i = 1; i < R_ladder.size(); ++i)
        if (!(R_ladder[i] > R_ladder[i - 1])) throw std::invalid_argument("theorem1_experiment: R ladder must increase");
    const double N = pp.N, p = pp.p, e = (N - p) / p;
    Theorem1Result res;
    res.limit = (std::pow(pp.mu1, -e) + std::pow(pp.mu2, -e)) * std::pow(S, N / p) / N;
    const double a1 = omega_mu(pp.N, p, pp.mu1), a2 = omega_mu(pp.N, p, pp.mu2);
    res.cross_term_R0 = pair_integrals(two_center(a1, a2, 1, 0), pp, q).X;
    for (double R : R_ladder) {
        Theorem1Row row;
        row.R = R;
        try {
            PairQuad q2 = q;
            q2.force_2d = true;
            const PairIntegrals in = pair_integrals(two_center(a1, a2, 1, R), pp, q2);
            row.cross_term = in.X;
            const NehariProjection pr = project_to_N(in, pp);
            row.t_R = pr.t;
            row.s_R = pr.s;
            row.energy = (pr.t * in.Gu + pr.s * in.Gv) / N;
            row.gap_to_limit = row.energy - res.limit;
            row.converged = pr.converged;
        } catch (const std::exception& ex) {
            row.error = ex.what();
        }
        res.rows.push_back(row);
    }
    return res;
}

L3Matrix lemma_l3_matrix(const PairIntegrals& in, const ProblemParams& pp) {
    if (!(pp.gamma < 0)) throw RegimeError("lemma_l3_matrix: gamma < 0 required");
    if (!(in.X > 0 && in.Gu > 0 && in.Gv > 0)) throw DomainError("lemma_l3_matrix: both components must be nonzero");
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta, g = pp.gamma;
    L3Matrix m;
    m.M[0][0] = p * in.Gu - ps * pp.mu1 * in.Cu - al * (al * g / ps) * in.X;
    m.M[0][1] = -be * (al * g / ps) * in.X;
    m.M[1][0] = -al * (be * g / ps) * in.X;
    m.M[1][1] = p * in.Gv - ps * pp.mu2 * in.Cv - be * (be * g / ps) * in.X;
    m.det = m.M[0][0] * m.M[1][1] - m.M[0][1] * m.M[1][0];
    m.positive = m.det > 0;
    return m;
}

L3Matrix lemma_l3_matrix(const PairField& pf, const ProblemParams& pp, const PairQuad& q) {
    if (!(pp.gamma < 0)) throw RegimeError("lemma_l3_matrix: gamma < 0 required");
    const PairIntegrals in = pair_integrals(pf, pp, q);
    const NehariProjection pr = project_to_N(in, pp);
    return lemma_l3_matrix(scale_integrals(in, pp, pr.t, pr.s), pp);
}

PairField rescale(const PairField& pf, double c) {
    if (!(c > 0)) throw DomainError("rescale: factor must be > 0");
    PairField o = pf;
    for (AxialField* f : {&o.u, &o.v})
        for (Bump& b : f->bumps) {
            b.eps /= c;
            b.center /= c;
        }
    return o;
}

RescalingCheck rescaling_invariance(const PairField& pf, const ProblemParams& pp, double c, const PairQuad& q) {
    RescalingCheck r;
    r.I0 = energy_I(pf, pp, q);
    r.I1 = energy_I(rescale(pf, c), pp, q);
    r.rel_gap = std::abs(r.I1 - r.I0) / std::max(std::abs(r.I0), 1e-300);
    return r;
}

}  // namespace plapsys
