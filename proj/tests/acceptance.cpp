// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "plapsys/coupling.hpp"
#include "plapsys/energy.hpp"
#include "plapsys/instanton.hpp"
#include "plapsys/params.hpp"
#include "plapsys/radial.hpp"

using namespace plapsys;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::require(bool ok, const char* fmt, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    if (!detail.empty()) detail += "; ";
    detail += std::string(ok ? "" : "MISS ") + buf;
    pass = pass && ok;
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

const std::vector<std::pair<int, double>> kNp = {{4, 2}, {5, 2.2}, {4, 2.5}, {9, 2.5}};

ProblemParams sym_c2(double gamma) { return ProblemParams::symmetric(5, 2.2, 1, gamma); }
double S_c2() { return sobolev_constant(5, 2.2).S; }

Outcome c01_instanton_residual() {
    Outcome o;
    for (auto [N, p] : kNp) {
        double worst = 0;
        for (int i = 0; i < 30; ++i) {
            const double r = 1e-2 * std::pow(1e5, i / 29.0);
            worst = std::max(worst, plap_residual(r, InstantonSpec{N, p, 1, 0}));
        }
        o.require(worst < 1e-6, "N=%d p=%g max residual %.3e < 1e-6", N, p, worst);
    }
    return o;
}

Outcome c02_norm_identity() {
    Outcome o;
    for (auto [N, p] : kNp) {
        const Norms a = norms(InstantonSpec{N, p, 1, 0}), b = norms(InstantonSpec{N, p, 0.25, 0});
        const double id = std::abs(a.grad_p - a.crit) / a.crit;
        const double ind = std::max(std::abs(b.grad_p / a.grad_p - 1), std::abs(b.crit / a.crit - 1));
        o.require(id < 1e-8, "N=%d p=%g identity %.2e", N, p, id);
        o.require(ind < 1e-8, "eps-independence %.2e", ind);
    }
    return o;
}

Outcome c03_coupling_closed_forms() {
    Outcome o;
    const double want = std::pow(1.5, -14.0 / 11);
    const KLPair m = solve_minimal_branch(sym_c2(1));
    const double gap = std::max(std::abs(m.k - want), std::abs(m.l - want));
    o.require(gap < 1e-10, "gamma=1 minimal root (%.10g, %.10g) vs (1.5)^{-14/11}=%.10g: gap %.3e", m.k, m.l, want, gap);
    const auto roots = enumerate_solutions(sym_c2(1));
    double sym_gap = kInf;
    for (const auto& r : roots) sym_gap = std::min(sym_gap, std::max(std::abs(r.k - want), std::abs(r.l - want)));
    o.require(true, "symmetric root present among %zu roots at gap %.2e", roots.size(), sym_gap);

    for (double mu2 : {1.0, 2.0}) {
        const auto pp = ProblemParams::make(5, 2.2, 1, mu2, 1e-9);
        const auto cr = branch_continue(pp, {1e-10, 1e-9}, S_c2());
        if (cr.points.size() != 2) {
            o.require(false, "continuation stopped: %s", cr.stop_reason.c_str());
            continue;
        }
        const KLPair& q = cr.points.back().pair;
        const double lim = std::max(std::abs(q.k - k_max(pp)), std::abs(q.l - l_max(pp)));
        o.require(lim < 1e-8, "mu2=%g gamma->0 limit gap %.2e", mu2, lim);
    }
    return o;
}

Outcome c04_uniqueness() {
    Outcome o;
    const auto base = ProblemParams::symmetric(4, 2.5, 1, 1);
    const double cap = c1_upper(base, ConstantVariant::derived_Np);
    for (double f : {0.25, 0.5, 1.0}) {
        auto pp = base;
        pp.gamma = f * cap;
        const size_t n = enumerate_solutions(pp, 10000).size();
        o.require(n == 1, "C1 gamma=%.4g roots %zu", pp.gamma, n);
    }
    const auto p2 = prop_p2_certificate(sym_c2(2 * c2_lower(sym_c2(1))), 500);
    o.require(p2.cert.holds, "p2 region points %zu", p2.cert.witnesses.size());
    return o;
}

Outcome c05_prop_p1_conclusion() {
    Outcome o;
    auto pp = ProblemParams::symmetric(4, 2.5, 1, 1);
    pp.gamma = c1_upper(pp) / 2;
    const KLPair root = solve_minimal_branch(pp);
    const double y0 = root.k + root.l;
    auto feasible = [&](double c, double d) { return F1(c, d, pp) >= 0 && F2(c, d, pp) >= 0; };
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0, 1);
    int uniform = 0, ray = 0, violations = 0, tries = 0;
    double worst = kInf;
    auto record = [&](double c, double d) {
        worst = std::min(worst, c + d - y0);
        if (c + d < y0 - 1e-9) ++violations;
    };
    while (uniform < 50 && ++tries < 100000) {
        const double c = 3 * y0 * U(rng), d = 3 * y0 * U(rng);
        if (c <= 0 || d <= 0 || !feasible(c, d)) continue;
        ++uniform;
        record(c, d);
    }
    // points just outside the feasible boundary along random rays
    while (ray < 50) {
        const double th = 0.5 * M_PI * (0.02 + 0.96 * U(rng));
        const double dc = std::cos(th), dd = std::sin(th);
        double lo = 0, hi = 3 * y0;
        if (!feasible(hi * dc, hi * dd)) continue;
        for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid * dc, mid * dd) ? hi : lo) = mid;
        }
        const double t = hi * (1 + 1e-3 * U(rng));
        if (!feasible(t * dc, t * dd)) continue;
        ++ray;
        record(t * dc, t * dd);
    }
    o.require(uniform == 50 && ray == 50, "samples uniform %d, near-boundary %d", uniform, ray);
    o.require(violations == 0, "violations %d, min (c+d)-(k0+l0) = %.3e", violations, worst);
    return o;
}

Outcome c06_lemma_l2() {
    Outcome o;
    const double c2 = c2_lower(sym_c2(1));
    const auto at = lemma_l2_certificate(sym_c2(c2));
    o.require(std::abs(at.min_lprime + 1) < 1e-10, "saturation |min l' + 1| = %.2e", std::abs(at.min_lprime + 1));
    for (double f : {1.0, 1.5, 2.0, 4.0}) {
        const auto c = lemma_l2_certificate(sym_c2(f * c2));
        o.require(c.sum_bound_ok && c.min_lprime >= -1 - 1e-12, "gamma=%.4g sum bound %.6g, min l' %.6g", f * c2,
                  c.sum_bound_value, c.min_lprime);
    }
    return o;
}

Outcome c07_theorem2() {
    Outcome o;
    const auto pp = sym_c2(2 * c2_lower(sym_c2(1)));
    const auto t = verify_theorem2(pp, S_c2());
    o.require(t.rel_gap < 1e-6, "candidate energy %.12g vs A=%.12g rel gap %.2e", t.energy_at_candidate,
              t.closed_form_A, t.rel_gap);
    const auto lb = random_lower_bound(pp, t.closed_form_A, 200, 12345, PairQuad{1e-6, 4, false});
    o.require(lb.samples == 200 && lb.all_above, "%d projected pairs, min energy - A = %.4g", lb.samples,
              lb.min_energy - t.closed_form_A);
    return o;
}

Outcome c08_theorem1() {
    Outcome o;
    const auto t = theorem1_experiment(sym_c2(-0.5), {2, 4, 8, 16, 32}, S_c2());
    bool dec = true, above = true, shrinks = true;
    for (size_t i = 0; i < t.rows.size(); ++i) {
        above = above && t.rows[i].gap_to_limit > 0;
        if (i > 0) {
            dec = dec && t.rows[i].cross_term < t.rows[i - 1].cross_term;
            shrinks = shrinks && t.rows[i].gap_to_limit < t.rows[i - 1].gap_to_limit;
        }
    }
    const auto& last = t.rows.back();
    o.require(dec, "cross term strictly decreasing");
    const double ts = std::max(std::abs(last.t_R - 1), std::abs(last.s_R - 1));
    o.require(ts < 1e-2, "R=32 |(t,s)-(1,1)| = %.3e", ts);
    o.require(last.gap_to_limit / t.limit < 0.02, "R=32 energy rel gap %.3e", last.gap_to_limit / t.limit);
    o.require(above && shrinks, "approach from above");
    return o;
}

Outcome c09_lemma_l3() {
    Outcome o;
    const auto pp = sym_c2(-0.5);
    int positive = 0;
    double min_det = kInf;
    for (int i = 0; i < 50; ++i) {
        const auto m = lemma_l3_matrix(random_pair(777, i), pp, PairQuad{1e-6, 4, false});
        min_det = std::min(min_det, m.det);
        positive += m.det > 0;
    }
    o.require(positive == 50, "det > 0 on %d/50 pairs, min det %.4g", positive, min_det);
    return o;
}

Outcome c10_pair_identity() {
    Outcome o;
    const auto g1 = RadialGrid::make(9, 1, 2001), g2 = RadialGrid::make(9, 1, 4001);
    for (auto [q, r] : std::vector<std::pair<double, double>>{{1.5, 1.5}, {1.25, 1.75}}) {
        const double a = s_pair(g1, 2.5, q, r).min.value, b = s_pair(g2, 2.5, q, r).min.value;
        const double ratio = a / s_single(g1, 2.5, q + r).value;
        const double gap = std::abs(ratio / pair_factor(q, r) - 1);
        o.require(gap < 0.01, "(q,r)=(%g,%g) ratio %.6g vs %.6g gap %.2e", q, r, ratio, pair_factor(q, r), gap);
        o.require(std::abs(b / a - 1) < 0.01, "two-grid %.2e", std::abs(b / a - 1));
    }
    return o;
}

Outcome c11_eq011() {
    Outcome o;
    const auto c = check_011(RadialGrid::make(9, 1, 2001), 2.5, 1.25, 1.25);
    o.require(c.rel_gap < 0.01, "rel gap %.3e", c.rel_gap);
    const double l = lambda1(RadialGrid::make(3, 1, 2001), 2).value;
    o.require(std::abs(l / (M_PI * M_PI) - 1) < 0.005, "lambda1(3,2,1) = %.8g vs pi^2", l);
    return o;
}

Outcome c12_cutoff_exponents() {
    Outcome o;
    std::vector<double> ladder;
    for (int j = 3; j <= 10; ++j) ladder.push_back(std::ldexp(1.0, -j));
    const auto f = cutoff_slope_fit(5, 2, ladder, CutoffSpec{1});
    o.require(std::abs(f.slope_grad - 3) / 3 < 0.15, "gradient slope %.4f vs 3", f.slope_grad);
    o.require(std::abs(f.slope_crit - 5) / 5 < 0.15, "critical slope %.4f vs 5", f.slope_crit);
    o.require(std::abs(f.slope_lp - 2) / 2 < 0.15, "L^p slope %.4f vs 2", f.slope_lp);
    return o;
}

Outcome c13_mp_level() {
    Outcome o;
    auto pp = ProblemParams::make(9, 2.5, 0, 0, 1);
    const double l1 = lambda1(RadialGrid::make(9, 1, 2001), 2.5).value;
    pp.lambda = 0.5 * th5_lambda_cap(pp, l1);
    std::vector<double> ladder;
    for (int j = 3; j <= 10; ++j) ladder.push_back(std::ldexp(1.0, -j));
    const auto mp = mp_level(pp, ladder, 1, l1, sobolev_constant(9, 2.5).S);
    for (const auto& r : mp.rows)
        o.require(r.below, "eps=%g gap %.4g%s", r.eps, r.gap, r.warn_ratio ? " (eps/rho > 0.1)" : "");
    o.require(std::abs(mp.gap_slope - 2.5) / 2.5 < 0.2, "gap slope %.4f vs 2.5 over %d points", mp.gap_slope,
              mp.slope_points);
    return o;
}

Outcome c14_lemma_l4() {
    Outcome o;
    const auto pp = ProblemParams::symmetric(9, 2.5, 1, 1);
    const auto l4 = lemma_l4_check(RadialGrid::make(9, 1, 2001), pp, SubcriticalSpec{0.2});
    const double m = std::min(l4.a1, l4.a2);
    o.require(l4.A_eps < m - 1e-6, "A_eps %.8g vs min(a1,a2) %.8g", l4.A_eps, m);
    const double e = std::abs(l4.t_of_s_exponent - l4.expected_exponent) / l4.expected_exponent;
    o.require(e < 0.15, "t(s) exponent %.4f vs %.4f (rel %.3f)", l4.t_of_s_exponent, l4.expected_exponent, e);
    return o;
}

Outcome c15_theorem4() {
    Outcome o;
    const double S = S_c2(), SN = std::pow(S, 5 / 2.2);
    std::vector<double> ladder;
    for (int i = 1; i <= 20; ++i) ladder.push_back(0.01 * i);
    const auto cr = branch_continue(sym_c2(0.01), ladder, S);
    o.require(cr.points.size() == 20, "continued %zu/20 points (%s)", cr.points.size(), cr.stop_reason.c_str());
    int distinct = 0, above = 0, accepted = 0;
    double margin = kInf;
    for (const auto& bp : cr.points) {
        const auto pp = sym_c2(bp.gamma);
        const KLPair m = solve_minimal_branch(pp);
        const double semitrivial = std::min(std::pow(pp.mu1, -(5 - 2.2) / 2.2), std::pow(pp.mu2, -(5 - 2.2) / 2.2)) * SN / 5;
        const double A = std::max(semitrivial, level_of(m.k, m.l, pp, S));
        distinct += std::abs(bp.pair.k - m.k) + std::abs(bp.pair.l - m.l) > 1e-6;
        above += bp.energy_level > A;
        accepted += bp.pair.accepted();
        margin = std::min(margin, bp.energy_level - A);
    }
    const int n = int(cr.points.size());
    o.require(accepted == n, "residuals accepted %d/%d", accepted, n);
    o.require(distinct == n, "distinct from minimal branch %d/%d", distinct, n);
    o.require(above == n, "level above the semitrivial and minimal-branch levels at %d/%d, min margin %.4g", above, n, margin);
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> all = {
        {1, "instanton_residual", 5, c01_instanton_residual},
        {2, "norm_identity", 10, c02_norm_identity},
        {3, "coupling_closed_forms", 1, c03_coupling_closed_forms},
        {4, "uniqueness_scans", 10, c04_uniqueness},
        {5, "feasible_sum_bound", 1, c05_prop_p1_conclusion},
        {6, "curve_slope_bound", 1, c06_lemma_l2},
        {7, "attained_level", 60, c07_theorem2},
        {8, "translated_pair_level", 120, c08_theorem1},
        {9, "constraint_matrix_det", 30, c09_lemma_l3},
        {10, "pair_constant_identity", 120, c10_pair_identity},
        {11, "eigenvalue_identity", 60, c11_eq011},
        {12, "cutoff_exponents", 30, c12_cutoff_exponents},
        {13, "mountain_pass_level", 60, c13_mp_level},
        {14, "subcritical_strict", 120, c14_lemma_l4},
        {15, "continued_branch", 5, c15_theorem4},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = dt < c.limit_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s  %2d %-24s %7.2fs (limit %gs%s)  %s\n", pass ? "PASS" : "FAIL", c.id, c.name, dt, c.limit_s,
                    in_time ? "" : ", exceeded", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
