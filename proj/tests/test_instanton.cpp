#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "plapsys/error.hpp"
#include "plapsys/instanton.hpp"
#include "plapsys/quadrature.hpp"

using namespace plapsys;

namespace {

// Closed-form best constant of the D^{1,p} -> L^{p*} embedding, S = K^{-p}.
double talenti_S(int N, double p) {
    const double n = N;
    const double K = std::pow(M_PI, -0.5) * std::pow(n, -1 / p) * std::pow((p - 1) / (n - p), 1 - 1 / p) *
                     std::pow(std::tgamma(1 + n / 2) * std::tgamma(n) /
                                  (std::tgamma(n / p) * std::tgamma(1 + n - n / p)),
                              1 / n);
    return std::pow(K, -p);
}

const std::vector<std::pair<int, double>> kCases = {{4, 2}, {5, 2.2}, {4, 2.5}, {9, 2.5}};

}  // namespace

TEST_CASE("Sobolev constant matches the closed-form best constant") {
    for (auto [N, p] : kCases) {
        CAPTURE(N);
        CAPTURE(p);
        const auto s = sobolev_constant(N, p);
        CHECK(s.S == doctest::Approx(talenti_S(N, p)).epsilon(1e-9));
        CHECK(s.S_from_quotient == doctest::Approx(s.S).epsilon(1e-9));
    }
}

TEST_CASE("frozen Sobolev constants") {
    CHECK(sobolev_constant(4, 2).S == doctest::Approx(10.2603986412949).epsilon(1e-12));
    CHECK(sobolev_constant(5, 2.2).S == doctest::Approx(14.3215658048252).epsilon(1e-12));
    CHECK(sobolev_constant(9, 2.5).S == doctest::Approx(39.2750992506565).epsilon(1e-12));
    // p = 2: S = N(N-2)/4 * |S^N|^{2/N}
    const double area5 = sphere_area(5);
    CHECK(sobolev_constant(4, 2).S == doctest::Approx(4 * 2 / 4.0 * std::pow(area5, 0.5)).epsilon(1e-10));
}

TEST_CASE("norm identity and eps independence") {
    for (auto [N, p] : kCases) {
        CAPTURE(N);
        const auto n1 = norms(InstantonSpec{N, p, 1, 0});
        const auto n2 = norms(InstantonSpec{N, p, 0.1, 0});
        CHECK(std::abs(n1.grad_p - n1.crit) / n1.crit < 1e-8);
        CHECK(std::abs(n2.grad_p - n1.grad_p) / n1.grad_p < 1e-8);
        CHECK(std::abs(n2.crit - n1.crit) / n1.crit < 1e-8);
    }
}

TEST_CASE("Lp status of the instanton") {
    CHECK(norms(InstantonSpec{9, 2.5, 1, 0}).lp_status == LpStatus::finite);
    CHECK(norms(InstantonSpec{4, 2, 1, 0}).lp_status == LpStatus::log_divergent);
    CHECK(norms(InstantonSpec{5, 2.5, 1, 0}).lp_status == LpStatus::divergent);
}

TEST_CASE("PDE residual of the instanton") {
    for (auto [N, p] : kCases) {
        CAPTURE(N);
        for (int i = 0; i < 30; ++i) {
            const double r = 1e-2 * std::pow(1e5, i / 29.0);
            CHECK(plap_residual(r, InstantonSpec{N, p, 1, 0}) < 1e-6);
        }
    }
    // scaling equivariance (eps, r) -> (c eps, c r)
    const double a = plap_residual(0.7, InstantonSpec{5, 2.2, 1, 0});
    const double b = plap_residual(7.0, InstantonSpec{5, 2.2, 10, 0});
    CHECK(std::abs(a - b) < 1e-6);
}

TEST_CASE("instanton profile") {
    const InstantonSpec s{5, 2.2, 1, 0};
    CHECK(u_value(0, s) > u_value(1, s));
    CHECK(u_radial_derivative(1, s) < 0);
    // centered difference oracle for the derivative
    const double h = 1e-6;
    CHECK(u_radial_derivative(1.3, s) ==
          doctest::Approx((u_value(1.3 + h, s) - u_value(1.3 - h, s)) / (2 * h)).epsilon(1e-7));
    CHECK(omega_mu(5, 2.2, 1) == doctest::Approx(1.0));
}

TEST_CASE("cutoff exponents") {
    std::vector<double> ladder;
    for (int j = 3; j <= 10; ++j) ladder.push_back(std::ldexp(1.0, -j));
    const auto f = cutoff_slope_fit(5, 2, ladder, CutoffSpec{1});
    CHECK(std::abs(f.slope_grad - 3.0) / 3.0 < 0.15);
    CHECK(std::abs(f.slope_crit - 5.0) / 5.0 < 0.15);
    CHECK(std::abs(f.slope_lp - 2.0) / 2.0 < 0.15);
    CHECK_THROWS(cutoff_slope_fit(5, 2, {0.1, 0.05}, CutoffSpec{1}));
}

TEST_CASE("cutoff function") {
    const CutoffSpec c{1};
    CHECK(eta(0.1, c) == 1.0);
    CHECK(eta(2.0, c) == 0.0);
    for (double s = 0; s <= 1.2; s += 0.01) {
        CHECK(eta(s, c) >= 0);
        CHECK(eta(s, c) <= 1);
        CHECK(eta_prime(s, c) <= 0);
    }
}

TEST_CASE("radial quadrature on known integrals") {
    // integral of r^2/(1+r^2)^3 over (0, inf) = pi/16
    const auto r = integrate_radial([](double x) { return x * x / std::pow(1 + x * x, 3); }, 0, kInf, 1);
    CHECK(r.value == doctest::Approx(M_PI / 16).epsilon(1e-10));
    const auto g = integrate_interval([](double x) { return std::exp(x); }, 0, 1);
    CHECK(g.value == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-12));
    CHECK(sphere_area(3) == doctest::Approx(4 * M_PI));
}

TEST_CASE("graded rule integrates algebraic tails") {
    const auto rule = graded_rule({0.0, 3.0}, 1e-3, 4, false, 1);
    double s = 0;
    for (size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] / (1 + rule.x[i] * rule.x[i]);
    CHECK(s == doctest::Approx(M_PI).epsilon(1e-6));
    CHECK_THROWS(graded_rule({}, 1e-3, 4, false, 0));
}
