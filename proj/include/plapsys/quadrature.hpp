#pragma once
#include <functional>
#include <limits>
#include <vector>

namespace plapsys {

enum class QuadScheme { gauss_legendre_panels };
enum class ChangeOfVariable { rational_map_to_unit };

struct QuadratureSpec {
    QuadScheme scheme = QuadScheme::gauss_legendre_panels;
    double rel_tol = 1e-10;
    int max_doublings = 30;
    ChangeOfVariable change_of_variable = ChangeOfVariable::rational_map_to_unit;
};

struct QuadResult {
    double value = 0;
    double error = 0;  // |last - previous| of the panel-doubling sequence
    int panels = 0;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integral of f over (lo, hi) with 0 <= lo < hi <= inf. The substitution
// r = scale*e^x turns algebraic decay into exponential decay; x-panels of unit
// width (geometric in r) are doubled until the relative change is below
// spec.rel_tol. Infinite ends are truncated where the mapped integrand has
// decayed below 1e-4*rel_tol of its peak.
QuadResult integrate_radial(const std::function<double(double)>& f, double lo, double hi,
                            double scale, const QuadratureSpec& spec = {});

// Plain composite Gauss-Legendre on a finite interval with panel doubling.
QuadResult integrate_interval(const std::function<double(double)>& f, double a, double b,
                              const QuadratureSpec& spec = {});

// Tensor-ready 1D rule: nodes and weights.
struct Rule1D {
    std::vector<double> x, w;
};

// Composite Gauss-Legendre rule graded geometrically towards each center
// (breakpoints c +- hmin*2^k up to hmax) with exponentially mapped tails.
// half_line restricts to [0, inf) with grading at 0; centers are ignored then.
// Each base panel is split into 2^split pieces; order selects the 5- or
// 10-point Gauss-Legendre rule per panel.
Rule1D graded_rule(const std::vector<double>& centers, double hmin, double hmax, bool half_line,
                   int split, int order = 10);

// Surface area of the unit sphere in R^n.
double sphere_area(int n);

}  // namespace plapsys
