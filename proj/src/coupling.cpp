#include "plapsys/coupling.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "plapsys/error.hpp"

namespace plapsys {

namespace {

const double kInfinity = std::numeric_limits<double>::infinity();

double ex(const ProblemParams& pp) { return (pp.pstar() - pp.p) / pp.p; }

ProblemParams swapped(const ProblemParams& pp) {
    ProblemParams q = pp;
    std::swap(q.mu1, q.mu2);
    std::swap(q.alpha, q.beta);
    return q;
}

void need_gamma_positive(const ProblemParams& pp, const char* who) {
    if (!(pp.gamma > 0)) throw RegimeError(std::string(who) + ": gamma > 0 required");
}

// Reduced equation at k = u*k_max with v = 1 - u supplied separately so that
// 1 - mu1 k^e keeps full precision near the right endpoint.
double f_uv(double u, double v, const ProblemParams& pp) {
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta, g = pp.gamma;
    const double e = ex(pp);
    const double k = u * k_max(pp);
    const double w = v < 0.5 ? -std::expm1(e * std::log1p(-v)) : 1 - std::pow(u, e);
    const double A0 = ps / (al * g);
    const double t1 = pp.mu2 * std::pow(A0, al / be) * std::pow(w, al / be);
    const double t2 = be * g / ps * std::pow(k, e * al / be);
    const double t3 = std::pow(A0, (p - be) / be) * std::pow(k, -e * (p - al) / be) * std::pow(w, (p - be) / be);
    return t1 + t2 - t3;
}

double l_of_uv(double u, double v, const ProblemParams& pp) {
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta;
    const double e = ex(pp);
    const double k = u * k_max(pp);
    const double w = v < 0.5 ? -std::expm1(e * std::log1p(-v)) : 1 - std::pow(u, e);
    return std::pow(ps / (al * pp.gamma), p / be) * std::pow(k, (p - al) / be) * std::pow(w, p / be);
}

struct GridPt {
    double u, v;
};

std::vector<GridPt> scan_grid(int resolution) {
    const int n1 = std::max(2, resolution / 2), n2 = std::max(2, resolution - n1);
    std::vector<GridPt> g;
    const double lo = -150, mid = std::log10(0.5);
    for (int i = 0; i < n1; ++i) {
        const double u = std::pow(10.0, lo + (mid - lo) * i / (n1 - 1));
        g.push_back({u, 1 - u});
    }
    for (int j = 1; j < n2; ++j) {
        const double v = std::pow(10.0, mid + (-15 - mid) * j / (n2 - 1));
        g.push_back({1 - v, v});
    }
    return g;
}

// Bisection between two adjacent grid points with a sign change.
GridPt bisect_between(const GridPt& a, const GridPt& b, const ProblemParams& pp) {
    using boost::math::tools::bisect;
    using boost::math::tools::eps_tolerance;
    std::uintmax_t it = 200;
    if (b.u <= 0.5) {
        auto fn = [&](double u) { return f_uv(u, 1 - u, pp); };
        const auto r = bisect(fn, a.u, b.u, eps_tolerance<double>(46), it);
        const double u = 0.5 * (r.first + r.second);
        return {u, 1 - u};
    }
    auto fn = [&](double v) { return f_uv(1 - v, v, pp); };
    const auto r = bisect(fn, b.v, a.v, eps_tolerance<double>(46), it);
    const double v = 0.5 * (r.first + r.second);
    return {1 - v, v};
}

double max_res(double k, double l, const ProblemParams& pp) {
    return std::max(std::abs(F1(k, l, pp)), std::abs(F2(k, l, pp)));
}

// Newton in (log k, log l); a step is kept only if it lowers the residual.
void polish(double& k, double& l, const ProblemParams& pp, int steps) {
    double r0 = max_res(k, l, pp);
    for (int i = 0; i < steps; ++i) {
        const Jac2 J = jacobian(k, l, pp);
        const double b1 = -F1(k, l, pp), b2 = -F2(k, l, pp);
        const double a11 = J.a11 * k, a12 = J.a12 * l, a21 = J.a21 * k, a22 = J.a22 * l;
        const double d = a11 * a22 - a12 * a21;
        if (!(std::abs(d) > 0) || !std::isfinite(d)) return;
        const double dx = (b1 * a22 - a12 * b2) / d, dy = (a11 * b2 - a21 * b1) / d;
        const double kn = k * std::exp(dx), ln = l * std::exp(dy);
        const double r1 = max_res(kn, ln, pp);
        if (!(r1 < r0)) return;
        k = kn;
        l = ln;
        r0 = r1;
    }
}

KLPair root_from(const GridPt& g, const ProblemParams& pp, Branch b) {
    double k = g.u * k_max(pp), l = l_of_uv(g.u, g.v, pp);
    polish(k, l, pp, 3);
    return make_pair(k, l, pp, b);
}

std::vector<GridPt> sign_changes(const ProblemParams& pp, int resolution, bool first_only,
                                 std::vector<double>* trace) {
    const auto grid = scan_grid(resolution);
    std::vector<GridPt> roots;
    double prev = f_uv(grid[0].u, grid[0].v, pp);
    for (size_t i = 1; i < grid.size(); ++i) {
        const double cur = f_uv(grid[i].u, grid[i].v, pp);
        if (trace && (i % std::max<size_t>(1, grid.size() / 64) == 0)) {
            trace->push_back(grid[i].u);
            trace->push_back(cur);
        }
        if (std::isfinite(prev) && std::isfinite(cur) && ((prev < 0) != (cur < 0))) {
            roots.push_back(bisect_between(grid[i - 1], grid[i], pp));
            if (first_only) break;
        }
        prev = cur;
    }
    return roots;
}

}  // namespace

std::string to_string(Branch b) {
    switch (b) {
        case Branch::minimal_k: return "minimal_k";
        case Branch::minimal_l: return "minimal_l";
        case Branch::continuation: return "continuation";
        default: return "other";
    }
}

std::string to_string(Claim c) {
    switch (c) {
        case Claim::prop_p1: return "prop_p1";
        case Claim::prop_p2: return "prop_p2";
        default: return "remark_r1";
    }
}

std::string to_string(LevelFormula f) { return f == LevelFormula::attained ? "attained" : "not_attained"; }

bool KLPair::accepted() const { return std::max(std::abs(res1), std::abs(res2)) < 1e-10; }

double F1(double k, double l, const ProblemParams& pp) {
    if (k < 0 || l < 0) throw DomainError("F1: k and l must be >= 0");
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta;
    double coupling = 0;
    if (l > 0) {
        if (k > 0) coupling = al * pp.gamma / ps * std::pow(k, (al - p) / p) * std::pow(l, be / p);
        else if (al < p) coupling = pp.gamma > 0 ? kInfinity : -kInfinity;
        else if (al == p) coupling = al * pp.gamma / ps * std::pow(l, be / p);
    }
    return pp.mu1 * std::pow(k, ex(pp)) + coupling - 1;
}

double F2(double k, double l, const ProblemParams& pp) {
    if (k < 0 || l < 0) throw DomainError("F2: k and l must be >= 0");
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta;
    double coupling = 0;
    if (k > 0) {
        if (l > 0) coupling = be * pp.gamma / ps * std::pow(k, al / p) * std::pow(l, (be - p) / p);
        else if (be < p) coupling = pp.gamma > 0 ? kInfinity : -kInfinity;
        else if (be == p) coupling = be * pp.gamma / ps * std::pow(k, al / p);
    }
    return pp.mu2 * std::pow(l, ex(pp)) + coupling - 1;
}

double k_max(const ProblemParams& pp) { return std::pow(pp.mu1, -1 / ex(pp)); }
double l_max(const ProblemParams& pp) { return std::pow(pp.mu2, -1 / ex(pp)); }

double curve_l_of_k(double k, const ProblemParams& pp) {
    need_gamma_positive(pp, "curve_l_of_k");
    const double km = k_max(pp);
    if (!(k > 0 && k <= km * (1 + 1e-15))) throw DomainError("curve_l_of_k: k outside (0, k_max]");
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta;
    const double w = std::max(0.0, 1 - pp.mu1 * std::pow(k, ex(pp)));
    return std::pow(ps / (al * pp.gamma), p / be) * std::pow(k, (p - al) / be) * std::pow(w, p / be);
}

double curve_k_of_l(double l, const ProblemParams& pp) { return curve_l_of_k(l, swapped(pp)); }

double curve_l_prime(double k, const ProblemParams& pp) {
    need_gamma_positive(pp, "curve_l_prime");
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta, e = ex(pp);
    const double C = std::pow(ps / (al * pp.gamma), p / be);
    const double w = 1 - pp.mu1 * std::pow(k, e);
    const double a = (p - al) / be;
    return C * (a * std::pow(k, a - 1) * std::pow(w, p / be) -
                std::pow(k, a) * (p / be) * std::pow(w, p / be - 1) * pp.mu1 * e * std::pow(k, e - 1));
}

double f_of_k(double k, const ProblemParams& pp) {
    need_gamma_positive(pp, "f_of_k");
    const double km = k_max(pp);
    if (!(k > 0 && k <= km)) throw DomainError("f_of_k: k outside (0, k_max]");
    const double u = k / km;
    return f_uv(u, 1 - u, pp);
}

Jac2 jacobian(double k, double l, const ProblemParams& pp) {
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta, g = pp.gamma, e = ex(pp);
    Jac2 J;
    J.a11 = pp.mu1 * e * std::pow(k, e - 1) +
            al * g / ps * (al - p) / p * std::pow(k, (al - p) / p - 1) * std::pow(l, be / p);
    J.a12 = al * g / ps * be / p * std::pow(k, (al - p) / p) * std::pow(l, be / p - 1);
    J.a21 = be * g / ps * al / p * std::pow(k, al / p - 1) * std::pow(l, (be - p) / p);
    J.a22 = pp.mu2 * e * std::pow(l, e - 1) +
            be * g / ps * (be - p) / p * std::pow(k, al / p) * std::pow(l, (be - p) / p - 1);
    return J;
}

KLPair make_pair(double k, double l, const ProblemParams& pp, Branch b) {
    return KLPair{k, l, F1(k, l, pp), F2(k, l, pp), b};
}

KLPair solve_minimal_branch(const ProblemParams& pp, int resolution) {
    need_gamma_positive(pp, "solve_minimal_branch");
    std::vector<double> trace;
    const auto r = sign_changes(pp, resolution, true, &trace);
    if (r.empty()) {
        std::ostringstream os;
        os << "solve_minimal_branch: no sign change of the reduced equation at resolution " << resolution
           << " (trace holds sampled (k/k_max, f) pairs)";
        throw ConvergenceError(os.str(), trace);
    }
    return root_from(r.front(), pp, Branch::minimal_k);
}

KLPair solve_minimal_l_branch(const ProblemParams& pp, int resolution) {
    const KLPair s = solve_minimal_branch(swapped(pp), resolution);
    return KLPair{s.l, s.k, s.res2, s.res1, Branch::minimal_l};
}

MinimalBranch solve_minimal_pair(const ProblemParams& pp, int resolution) {
    MinimalBranch m;
    m.primal = solve_minimal_branch(pp, resolution);
    m.dual = solve_minimal_l_branch(pp, resolution);
    m.dual_agrees = std::abs(m.primal.k - m.dual.k) + std::abs(m.primal.l - m.dual.l) <= 1e-9;
    return m;
}

std::vector<KLPair> enumerate_solutions(const ProblemParams& pp, int resolution) {
    need_gamma_positive(pp, "enumerate_solutions");
    std::vector<KLPair> out;
    for (const auto& g : sign_changes(pp, resolution, false, nullptr)) {
        const KLPair kp = root_from(g, pp, Branch::other);
        const bool dup = std::any_of(out.begin(), out.end(), [&](const KLPair& o) {
            return std::abs(o.k - kp.k) <= 1e-6 * std::max(o.k, kp.k) &&
                   std::abs(o.l - kp.l) <= 1e-6 * std::max(o.l, kp.l);
        });
        if (!dup) out.push_back(kp);
    }
    std::sort(out.begin(), out.end(), [](const KLPair& a, const KLPair& b) { return a.k < b.k; });
    if (!out.empty()) out.front().branch = Branch::minimal_k;
    return out;
}

double p1_f1(double x, const ProblemParams& pp) {
    const double p = pp.p, ps = pp.pstar(), e = ex(pp);
    return std::pow(x + 1, e) / (pp.mu1 * std::pow(x, e) + pp.alpha * pp.gamma / ps * std::pow(x, (pp.alpha - p) / p));
}

double p1_f2(double x, const ProblemParams& pp) {
    const double p = pp.p, ps = pp.pstar(), e = ex(pp);
    return std::pow(x + 1, e) / (pp.mu2 + pp.beta * pp.gamma / ps * std::pow(x, pp.alpha / p));
}

P1Certificate prop_p1_certificate(const ProblemParams& pp, int resolution) {
    if (classify_subcase(pp) != Subcase::C1) throw RegimeError("prop_p1_certificate: subcase C1 required");
    need_gamma_positive(pp, "prop_p1_certificate");
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta, g = pp.gamma;
    P1Certificate c;
    c.x1 = std::pow(p * al * g / (ps * (ps - p) * pp.mu1), p / (be - p));
    c.x2 = (al - p) / (be - p);
    c.g1_x1 = (be - p) * c.x1 - (al - p);
    c.g2_x2 = -p * std::pow(c.x2, (al - p) / p) + ps * (ps - p) * pp.mu2 / (be * g);
    c.analytic_ok = c.g1_x1 <= 0 && c.g2_x2 >= 0;
    c.f1_decreasing = c.f2_increasing = true;
    double f1p = 0, f2p = 0;
    for (int i = 0; i < 1000; ++i) {
        const double x = std::pow(10.0, -3 + 6.0 * i / 999);
        const double a = p1_f1(x, pp), b = p1_f2(x, pp);
        if (i > 0 && !(a < f1p)) c.f1_decreasing = false;
        if (i > 0 && !(b > f2p)) c.f2_increasing = false;
        f1p = a;
        f2p = b;
    }
    c.cert.claim = Claim::prop_p1;
    c.cert.scan_resolution = resolution;
    c.cert.witnesses = enumerate_solutions(pp, resolution);
    c.cert.holds = c.cert.witnesses.size() == 1;
    return c;
}

L2Certificate lemma_l2_certificate(const ProblemParams& pp) {
    if (classify_subcase(pp) != Subcase::C2) throw RegimeError("lemma_l2_certificate: subcase C2 required");
    need_gamma_positive(pp, "lemma_l2_certificate");
    const double c2 = c2_lower(pp);
    if (pp.gamma < c2 * (1 - 1e-12))
        throw RegimeError("lemma_l2_certificate: gamma below the C2 lower bound " + std::to_string(c2));
    const double p = pp.p, ps = pp.pstar(), al = pp.alpha, be = pp.beta, g = pp.gamma;
    L2Certificate c;
    c.kbar = std::pow(p * (p - al) / ((2 * p - ps) * pp.mu1 * be), p / (ps - p));
    c.min_lprime = -std::pow(ps * (ps - p) * pp.mu1 / (p * al * g), p / be) *
                   std::pow((p - be) / (p - al), (p - be) / be);
    c.lprime_at_kbar = curve_l_prime(c.kbar, pp);
    const MinimalBranch m = solve_minimal_pair(pp);
    c.root = m.primal;
    c.dual_agrees = m.dual_agrees;
    c.sum_bound_value = std::pow(m.primal.k + m.primal.l, ex(pp)) * std::max(pp.mu1, pp.mu2);
    c.sum_bound_ok = c.sum_bound_value < 1;
    c.k_plus_l_increasing = true;
    const double km = k_max(pp);
    double prev = -1;
    for (int i = 1; i <= 1000; ++i) {
        const double k = km * i / 1000.0;
        const double s = k + curve_l_of_k(k, pp);
        if (!(s > prev)) c.k_plus_l_increasing = false;
        prev = s;
    }
    return c;
}

P2Certificate prop_p2_certificate(const ProblemParams& pp, int resolution) {
    if (classify_subcase(pp) != Subcase::C2) throw RegimeError("prop_p2_certificate: subcase C2 required");
    need_gamma_positive(pp, "prop_p2_certificate");
    if (pp.gamma < c2_lower(pp) * (1 - 1e-12))
        throw RegimeError("prop_p2_certificate: gamma below the C2 lower bound");
    P2Certificate c;
    c.root = solve_minimal_branch(pp);
    const double S0 = c.root.k + c.root.l;
    const double h = S0 / (resolution - 1);
    c.spacing = h;
    std::vector<std::pair<double, double>> pts{{c.root.k, c.root.l}};
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; i + j < resolution; ++j) {
            if (i == 0 && j == 0) continue;
            const double k = i * h, l = j * h;
            if (k + l > S0) continue;
            if (F1(k, l, pp) >= 0 && F2(k, l, pp) >= 0) {
                ++c.feasible_points;
                pts.push_back({k, l});
            }
        }
    }
    // Single-linkage clusters at radius 2h.
    std::vector<int> label(pts.size(), -1);
    int nclusters = 0;
    for (size_t s = 0; s < pts.size(); ++s) {
        if (label[s] >= 0) continue;
        label[s] = nclusters;
        std::vector<size_t> stack{s};
        while (!stack.empty()) {
            const size_t a = stack.back();
            stack.pop_back();
            for (size_t b = 0; b < pts.size(); ++b) {
                if (label[b] >= 0) continue;
                if (std::hypot(pts[a].first - pts[b].first, pts[a].second - pts[b].second) <= 2 * h) {
                    label[b] = nclusters;
                    stack.push_back(b);
                }
            }
        }
        const auto& q = pts[s];
        c.cert.witnesses.push_back(s == 0 ? c.root : make_pair(q.first, q.second, pp, Branch::other));
        ++nclusters;
    }
    c.cert.claim = Claim::prop_p2;
    c.cert.scan_resolution = resolution;
    c.cert.holds = nclusters == 1;
    c.boundary_violates_F1 = F1(S0, 0, pp) < 0;
    return c;
}

double level_of(double k, double l, const ProblemParams& pp, double S) {
    return (k + l) * std::pow(S, double(pp.N) / pp.p) / pp.N;
}

ContinuationResult branch_continue(const ProblemParams& pp, const std::vector<double>& ladder, double S) {
    if (ladder.empty()) throw std::invalid_argument("branch_continue: empty gamma ladder");
    for (size_t i = 0; i < ladder.size(); ++i)
        if (!(ladder[i] > (i ? ladder[i - 1] : 0.0)))
            throw std::invalid_argument("branch_continue: ladder must be positive and increasing");
    const double p = pp.p, N = pp.N, al = pp.alpha, be = pp.beta, ps = pp.pstar();
    ContinuationResult res;
    {
        const double pre = N * p * p / ((N - p) * (N - p));
        auto cap = [&](double ea, double eb, double x, double y) {
            return pre * std::max(pp.mu1 / al * std::pow((x - be) / (x - al), eb),
                                  pp.mu2 / be * std::pow((y - al) / (y - be), ea));
        };
        res.literal_cap = cap((2 - al) / 2, (2 - be) / 2, 2, 2);
        res.p_analogue_cap = cap((p - al) / p, (p - be) / p, p, p);
    }

    ProblemParams q = pp;
    auto residual = [&](double k, double l) { return std::max(std::abs(F1(k, l, q)), std::abs(F2(k, l, q))); };
    // Newton corrector at fixed gamma.
    auto correct = [&](double& k, double& l) {
        for (int it = 0; it < 30; ++it) {
            if (!(k > 0 && l > 0)) return false;
            if (residual(k, l) < 1e-12) return true;
            const Jac2 J = jacobian(k, l, q);
            const double d = J.det();
            if (!std::isfinite(d) || d == 0) return false;
            const double b1 = -F1(k, l, q), b2 = -F2(k, l, q);
            k += (b1 * J.a22 - J.a12 * b2) / d;
            l += (J.a11 * b2 - J.a21 * b1) / d;
        }
        return k > 0 && l > 0 && residual(k, l) < 1e-12;
    };
    // Tangent dz/dgamma = -J^{-1} dF/dgamma.
    auto tangent = [&](double k, double l, double& dk, double& dl) {
        const Jac2 J = jacobian(k, l, q);
        const double g1 = al / ps * std::pow(k, (al - p) / p) * std::pow(l, be / p);
        const double g2 = be / ps * std::pow(k, al / p) * std::pow(l, (be - p) / p);
        const double d = J.det();
        dk = -(g1 * J.a22 - J.a12 * g2) / d;
        dl = -(J.a11 * g2 - J.a21 * g1) / d;
    };

    double k = k_max(pp), l = l_max(pp), gam = 0;
    q.gamma = 0;
    const double det0 = jacobian(k, l, q).det();
    const double h0 = ladder[0];
    double h = h0;
    int clean = 0;
    bool first = true;
    res.stop_reason = "completed";
    for (double target : ladder) {
        while (gam < target) {
            const double step = std::min(h, target - gam);
            double dk, dl;
            tangent(k, l, dk, dl);
            double kn = k + step * dk, ln = l + step * dl;
            q.gamma = gam + step;
            if (!correct(kn, ln)) {
                q.gamma = gam;
                h *= 0.5;
                clean = 0;
                if (h < 1e-14 * std::max(1.0, target)) {
                    if (first) throw ConvergenceError("branch_continue: first corrector step failed; start the ladder closer to 0");
                    res.stop_reason = "corrector_failed";
                    res.gamma1_estimate = gam;
                    return res;
                }
                continue;
            }
            const double det = jacobian(kn, ln, q).det();
            if (std::abs(det) < 1e-8 || (det > 0) != (det0 > 0)) {
                // Locate the degeneracy between gam and gam + step by bisection along the branch.
                double ga = gam, gb = gam + step, ka = k, la = l;
                for (int it = 0; it < 60 && gb - ga > 1e-13; ++it) {
                    const double gm = 0.5 * (ga + gb);
                    q.gamma = gm;
                    double km = ka, lm = la;
                    if (!correct(km, lm)) break;
                    const double dm = jacobian(km, lm, q).det();
                    if (std::abs(dm) >= 1e-8 && (dm > 0) == (det0 > 0)) {
                        ga = gm;
                        ka = km;
                        la = lm;
                    } else {
                        gb = gm;
                    }
                }
                res.stop_reason = std::abs(det) < 1e-8 ? "jacobian_degenerate" : "jacobian_sign_change";
                res.gamma1_estimate = 0.5 * (ga + gb);
                return res;
            }
            k = kn;
            l = ln;
            gam += step;
            first = false;
            if (++clean >= 3) {
                h = std::min(2 * h, h0);
                clean = 0;
            }
        }
        q.gamma = target;
        BranchPoint bp;
        bp.gamma = target;
        bp.pair = make_pair(k, l, q, Branch::continuation);
        bp.jacobian_det = jacobian(k, l, q).det();
        bp.energy_level = level_of(k, l, q, S);
        res.points.push_back(bp);
        res.gamma1_estimate = target;
    }
    return res;
}

LeastEnergy least_energy_level(const ProblemParams& pp, double S, ConstantVariant v) {
    const Regime r = validate(pp);
    if (r.kind != Case::H1) throw RegimeError("least_energy_level: case H1 required");
    LeastEnergy out;
    const double e = (pp.N - pp.p) / pp.p;
    const double SN = std::pow(S, double(pp.N) / pp.p);
    if (pp.gamma < 0) {
        out.formula = LevelFormula::not_attained;
        out.A = (std::pow(pp.mu1, -e) + std::pow(pp.mu2, -e)) * SN / pp.N;
        return out;
    }
    bool ok = false;
    if (r.subcase == Subcase::C1) ok = pp.gamma <= c1_upper(pp, v);
    if (r.subcase == Subcase::C2) ok = pp.gamma >= c2_lower(pp) * (1 - 1e-12);
    if (!ok)
        throw RegimeError("least_energy_level: unsupported regime (gamma > 0 needs C1 with gamma <= c1_upper "
                          "or C2 with gamma >= c2_lower)");
    out.root = solve_minimal_branch(pp);
    out.formula = LevelFormula::attained;
    out.A = level_of(out.root.k, out.root.l, pp, S);
    return out;
}

}  // namespace plapsys
