#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "plapsys/coupling.hpp"
#include "plapsys/error.hpp"
#include "plapsys/instanton.hpp"

using namespace plapsys;

namespace {

// Independent residuals of the algebraic system.
struct Sys {
    ProblemParams pp;
    double f1(double k, double l) const {
        const double p = pp.p, ps = pp.pstar();
        return pp.mu1 * std::pow(k, (ps - p) / p) +
               pp.alpha * pp.gamma / ps * std::pow(k, (pp.alpha - p) / p) * std::pow(l, pp.beta / p) - 1;
    }
    double f2(double k, double l) const {
        const double p = pp.p, ps = pp.pstar();
        return pp.mu2 * std::pow(l, (ps - p) / p) +
               pp.beta * pp.gamma / ps * std::pow(k, pp.alpha / p) * std::pow(l, (pp.beta - p) / p) - 1;
    }
    // Newton with a finite-difference Jacobian from (k, l).
    bool newton(double& k, double& l) const {
        for (int it = 0; it < 60; ++it) {
            const double a = f1(k, l), b = f2(k, l);
            if (std::abs(a) + std::abs(b) < 1e-14) return true;
            const double hk = 1e-7 * k, hl = 1e-7 * l;
            const double j11 = (f1(k + hk, l) - f1(k - hk, l)) / (2 * hk), j12 = (f1(k, l + hl) - f1(k, l - hl)) / (2 * hl);
            const double j21 = (f2(k + hk, l) - f2(k - hk, l)) / (2 * hk), j22 = (f2(k, l + hl) - f2(k, l - hl)) / (2 * hl);
            const double det = j11 * j22 - j12 * j21;
            const double dk = (a * j22 - b * j12) / det, dl = (j11 * b - j21 * a) / det;
            double t = 1;
            while (k - t * dk <= 0 || l - t * dl <= 0) t /= 2;
            k -= t * dk;
            l -= t * dl;
        }
        return std::abs(f1(k, l)) + std::abs(f2(k, l)) < 1e-12;
    }
};

ProblemParams sym_c2(double gamma) { return ProblemParams::symmetric(5, 2.2, 1, gamma); }

}  // namespace

TEST_CASE("residuals agree with the independent formulas") {
    const auto pp = ProblemParams::make(5, 2.2, 1, 2, 0.3);
    const Sys s{pp};
    for (double k : {0.1, 0.5, 0.9})
        for (double l : {0.2, 0.6})
            CHECK(F1(k, l, pp) == doctest::Approx(s.f1(k, l)).epsilon(1e-13));
    CHECK(F2(0.3, 0.4, pp) == doctest::Approx(s.f2(0.3, 0.4)).epsilon(1e-13));
    CHECK_THROWS_AS(F1(-1, 0.5, pp), DomainError);
}

TEST_CASE("reduction curves lie on the zero sets") {
    const auto pp = ProblemParams::make(5, 2.2, 1, 2, 0.3);
    for (int i = 1; i < 100; ++i) {
        const double k = k_max(pp) * i / 100.0, l = l_max(pp) * i / 100.0;
        CHECK(std::abs(F1(k, curve_l_of_k(k, pp), pp)) < 1e-12);
        CHECK(std::abs(F2(curve_k_of_l(l, pp), l, pp)) < 1e-12);
    }
    const double k = 0.4, h = 1e-6;
    CHECK(curve_l_prime(k, pp) ==
          doctest::Approx((curve_l_of_k(k + h, pp) - curve_l_of_k(k - h, pp)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("symmetric closed form above the C2 threshold") {
    const double g = 2 * c2_lower(sym_c2(1));
    const auto r = solve_minimal_branch(sym_c2(g));
    const double want = std::pow(1 + g / 2, -14.0 / 11);
    CHECK(std::abs(r.k - want) < 1e-10);
    CHECK(std::abs(r.l - want) < 1e-10);
    CHECK(r.accepted());
}

TEST_CASE("gamma = 1 below the C2 threshold: the symmetric root is not the minimal one") {
    const auto pp = sym_c2(1);
    const auto roots = enumerate_solutions(pp);
    REQUIRE(roots.size() == 3);
    const double want = std::pow(1.5, -14.0 / 11);
    CHECK(std::abs(roots[1].k - want) < 1e-10);
    CHECK(std::abs(roots[1].l - want) < 1e-10);
    const auto m = solve_minimal_branch(pp);
    CHECK(m.k == doctest::Approx(roots[0].k).epsilon(1e-9));
    CHECK(m.k < want);
}

TEST_CASE("asymmetric root matches an independent Newton oracle") {
    const auto pp = ProblemParams::make(5, 2.2, 1, 2, 0.3);
    const Sys s{pp};
    const auto roots = enumerate_solutions(pp);
    REQUIRE_FALSE(roots.empty());
    for (const auto& r : roots) {
        double k = r.k * 1.01, l = r.l * 0.99;
        REQUIRE(s.newton(k, l));
        CHECK(std::abs(k - r.k) < 1e-6);
        CHECK(std::abs(l - r.l) < 1e-6);
        CHECK(r.accepted());
    }
    const auto m = solve_minimal_branch(pp);
    CHECK(m.k == doctest::Approx(roots.front().k).epsilon(1e-9));
}

TEST_CASE("decoupled limits along the continued branch") {
    const auto pp = ProblemParams::make(5, 2.2, 1, 2, 0.01);
    const double S = sobolev_constant(5, 2.2).S;
    const auto cr = branch_continue(pp, {1e-10, 1e-9}, S);
    REQUIRE(cr.points.size() == 2);
    const double e = 2.2 / (11.0 / 2.8 - 2.2);
    CHECK(std::abs(cr.points[1].pair.k - 1) < 1e-8);
    CHECK(std::abs(cr.points[1].pair.l - std::pow(2.0, -e)) < 1e-8);
    CHECK(k_max(pp) == doctest::Approx(1.0));
    CHECK(l_max(pp) == doctest::Approx(std::pow(2.0, -e)));
}

TEST_CASE("uniqueness certificate in C1") {
    const auto base = ProblemParams::symmetric(4, 2.5, 1, 1);
    const double cap = c1_upper(base);
    auto half = base;
    half.gamma = cap / 2;
    const auto c = prop_p1_certificate(half);
    CHECK(c.cert.holds);
    CHECK(c.cert.witnesses.size() == 1);
    CHECK(c.analytic_ok);
    CHECK(c.f1_decreasing);
    CHECK(c.f2_increasing);
    CHECK(enumerate_solutions(half).size() == 1);

    auto at = base;
    at.gamma = cap;
    const auto s = prop_p1_certificate(at);
    CHECK(std::abs(std::min(-s.g1_x1, s.g2_x2)) < 1e-10);

    auto big = base;
    big.gamma = 10 * cap;
    CHECK_FALSE(prop_p1_certificate(big).analytic_ok);
}

TEST_CASE("random feasible points lie above the minimal root sum") {
    auto pp = ProblemParams::symmetric(4, 2.5, 1, 1);
    pp.gamma = c1_upper(pp) / 2;
    const Sys s{pp};
    const auto root = solve_minimal_branch(pp);
    const double y0 = root.k + root.l;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> U(0, 1);
    int accepted = 0, tries = 0;
    while (accepted < 100 && tries < 100000) {
        ++tries;
        const double c = 3 * y0 * U(rng), d = 3 * y0 * U(rng);
        if (c <= 0 || d <= 0 || s.f1(c, d) < 0 || s.f2(c, d) < 0) continue;
        ++accepted;
        CHECK(c + d >= y0 - 1e-9);
    }
    CHECK(accepted == 100);
}

TEST_CASE("reduction curve slope bound certificate") {
    const auto at = sym_c2(c2_lower(sym_c2(1)));
    const auto l2 = lemma_l2_certificate(at);
    CHECK(std::abs(l2.min_lprime + 1) < 1e-10);

    const auto twice = sym_c2(2 * c2_lower(sym_c2(1)));
    const auto c = lemma_l2_certificate(twice);
    CHECK(c.min_lprime > -1);
    CHECK(c.lprime_at_kbar == doctest::Approx(c.min_lprime).epsilon(1e-10));
    CHECK(c.sum_bound_ok);
    CHECK(c.k_plus_l_increasing);
    CHECK(c.dual_agrees);
}

TEST_CASE("uniqueness certificate in C2") {
    const auto pp = sym_c2(2 * c2_lower(sym_c2(1)));
    const auto c = prop_p2_certificate(pp, 500);
    CHECK(c.cert.holds);
    CHECK(c.boundary_violates_F1);
    const double want = std::pow(1 + pp.gamma / 2, -14.0 / 11);
    CHECK(c.root.k == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("continuation from gamma = 0") {
    const auto pp = sym_c2(0.01);
    const double S = sobolev_constant(5, 2.2).S;
    std::vector<double> ladder;
    for (int i = 1; i <= 20; ++i) ladder.push_back(0.01 * i);
    const auto cr = branch_continue(pp, ladder, S);
    REQUIRE(cr.points.size() == 20);
    const double bound = std::pow(S, 5 / 2.2) / 5;
    for (const auto& bp : cr.points) {
        CHECK(bp.pair.accepted());
        CHECK(bp.energy_level > bound);
        CHECK(bp.jacobian_det > 0);
    }
    auto g = pp;
    g.gamma = 0.05;
    CHECK(cr.points[4].pair.k > solve_minimal_branch(g).k);

    // past the threshold the Jacobian degenerates
    std::vector<double> longer;
    for (int i = 1; i <= 200; ++i) longer.push_back(0.01 * i);
    const auto stop = branch_continue(pp, longer, S);
    CHECK(stop.stop_reason != "completed");
    CHECK(stop.gamma1_estimate == doctest::Approx(c2_lower(pp)).epsilon(1e-6));
}

TEST_CASE("least energy levels") {
    const double S = sobolev_constant(5, 2.2).S;
    const double SN = std::pow(S, 5 / 2.2);
    const auto neg = least_energy_level(sym_c2(-0.5), S);
    CHECK(neg.formula == LevelFormula::not_attained);
    CHECK(neg.A == doctest::Approx(2 * SN / 5).epsilon(1e-14));
    CHECK_THROWS_AS(least_energy_level(sym_c2(1), S), RegimeError);
    double prev = kInf;
    for (double g = 1.6; g <= 4; g += 0.3) {
        const auto le = least_energy_level(sym_c2(g), S);
        CHECK(le.formula == LevelFormula::attained);
        CHECK(le.A == doctest::Approx(2 * std::pow(1 + g / 2, -14.0 / 11) * SN / 5).epsilon(1e-10));
        CHECK(le.A <= prev);
        prev = le.A;
    }
}
