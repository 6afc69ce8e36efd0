#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "plapsys/error.hpp"
#include "plapsys/params.hpp"

using namespace plapsys;

TEST_CASE("make normalizes b and beta") {
    const auto pp = ProblemParams::make(5, 2.2, 1, 2, 0.3, 1.5, 0, 1.15);
    CHECK(pp.pstar() == doctest::Approx(11.0 / 2.8).epsilon(1e-15));
    CHECK(pp.b == doctest::Approx(1.05).epsilon(1e-14));
    CHECK(pp.beta == doctest::Approx(pp.pstar() - 1.5).epsilon(1e-15));
    const auto sym = ProblemParams::symmetric(5, 2.2, 1, 1);
    CHECK(sym.alpha == doctest::Approx(sym.pstar() / 2));
    CHECK(sym.a == doctest::Approx(1.1));
}

TEST_CASE("validate classifies cases and lists violations") {
    const auto h1 = validate(ProblemParams::symmetric(5, 2.2, 1, 1));
    CHECK(h1.kind == Case::H1);
    CHECK(h1.subcase == Subcase::C2);
    CHECK(h1.feasible);

    const auto h2 = validate(ProblemParams::make(9, 2.5, 0, 0, 1, 0, 0.5, 0));
    CHECK(h2.kind == Case::H2);
    CHECK(h2.feasible);

    auto bad = ProblemParams::symmetric(5, 2.2, 1, 1);
    bad.gamma = 0;
    const auto r = validate(bad);
    CHECK_FALSE(r.feasible);
    CHECK_FALSE(r.notes.empty());

    // N/2 < p with alpha, beta > p is C1
    CHECK(classify_subcase(ProblemParams::symmetric(4, 2.5, 1, 1)) == Subcase::C1);
    // p > sqrt(N) breaks H2
    CHECK_FALSE(validate(ProblemParams::make(5, 2.4, 0, 0, 1, 0, 0.5, 0)).feasible);
}

TEST_CASE("gamma thresholds") {
    const auto c2 = ProblemParams::symmetric(5, 2.2, 1, 1);
    // symmetric C2: N p^2/(N-p)^2 * mu/alpha with alpha = p*/2
    const double want = 5 * 2.2 * 2.2 / (2.8 * 2.8) * (1 / (c2.pstar() / 2));
    CHECK(c2_lower(c2) == doctest::Approx(want).epsilon(1e-14));
    CHECK(c2_lower(c2) == doctest::Approx(11.0 / 7).epsilon(1e-14));
    CHECK_THROWS_AS(c1_upper(c2), RegimeError);

    const auto c1 = ProblemParams::symmetric(4, 2.5, 1, 1);
    const double t = 1 / (c1.pstar() / 2);
    CHECK(c1_upper(c1) == doctest::Approx(4 * 6.25 / 2.25 * t).epsilon(1e-14));
    CHECK(c1_upper(c1, ConstantVariant::literal_paper) == doctest::Approx(3 * 6.25 / 0.25 * t).epsilon(1e-14));
    CHECK(c1_upper(c1) != doctest::Approx(c1_upper(c1, ConstantVariant::literal_paper)));

    const auto g = gamma_thresholds(c2);
    CHECK(std::isnan(g.c1_upper));
    CHECK(std::isnan(g.th5_lambda_cap));
}

TEST_CASE("mountain-pass lambda cap") {
    const auto h2 = ProblemParams::make(9, 2.5, 0, 0, 1, 0, 0.5, 0);
    // a = b = p/2 collapses the cap to 2 lambda1
    CHECK(th5_lambda_cap(h2, 3.0) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("variant parsing") {
    CHECK(parse_variant("derived_Np") == ConstantVariant::derived_Np);
    CHECK(parse_variant("literal_paper") == ConstantVariant::literal_paper);
    CHECK_THROWS(parse_variant("other"));
    CHECK(to_string(ConstantVariant::literal_paper) == "literal_paper");
}

TEST_CASE("derived exponents") {
    const auto d = derived_exponents(ProblemParams::symmetric(5, 2.2, 1, 1));
    CHECK(d.p_over_pstar_minus_p == doctest::Approx(14.0 / 11).epsilon(1e-14));
    CHECK(d.N_over_p == doctest::Approx(5 / 2.2));
}
