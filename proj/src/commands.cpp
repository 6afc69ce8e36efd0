#include "plapsys/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "plapsys/coupling.hpp"
#include "plapsys/energy.hpp"
#include "plapsys/error.hpp"
#include "plapsys/instanton.hpp"
#include "plapsys/radial.hpp"

namespace plapsys {

namespace {

const std::vector<double> kDefaultGammaLadder = {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1,
                                                 0.11, 0.12, 0.13, 0.14, 0.15, 0.16, 0.17, 0.18, 0.19, 0.2};

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Check check_below(const std::string& name, double value, double tol, const std::string& note = {}) {
    return Check{name, value, tol, value < tol, note};
}

Check check_flag(const std::string& name, bool ok, const std::string& note = {}) {
    return Check{name, ok ? 1.0 : 0.0, 1.0, ok, note};
}

QuadratureSpec quad_from(const Config& c) {
    QuadratureSpec q;
    q.rel_tol = c.get_double("quadrature", "rel_tol", q.rel_tol);
    q.max_doublings = c.get_int("quadrature", "max_doublings", q.max_doublings);
    if (!(q.rel_tol > 0)) throw ConfigError("[quadrature] rel_tol must be > 0", 0, "rel_tol");
    return q;
}

RunReport start(const std::string& command, const Config& c, const RunOptions& o) {
    RunReport r;
    r.command = command;
    r.timestamp = utc_timestamp();
    r.config = c.echo();
    r.provenance["constant_variant"] = to_string(o.variant);
    if (o.seed) r.provenance["seed_override"] = *o.seed;
    return r;
}

ProblemParams checked_params(const Config& c, RunReport& r) {
    const ProblemParams pp = params_from(c);
    r.params = to_json(pp);
    return pp;
}

std::string joined_notes(const Regime& reg) {
    std::string s;
    for (const auto& n : reg.notes) s += (s.empty() ? "" : "; ") + n;
    return s;
}

void require_feasible(const ProblemParams& pp, const std::string& who) {
    const Regime reg = validate(pp);
    if (!reg.feasible) throw RegimeError(who + ": " + joined_notes(reg));
}

// gamma inside the window where the minimal root gives the least energy level.
bool in_window(const ProblemParams& pp, ConstantVariant v) {
    const Subcase s = classify_subcase(pp);
    if (s == Subcase::C1) return pp.gamma <= c1_upper(pp, v);
    if (s == Subcase::C2) return pp.gamma >= c2_lower(pp) * (1 - 1e-12);
    return false;
}

Json thresholds_json(const ProblemParams& pp, ConstantVariant v) {
    Json j = Json::object();
    const Subcase s = classify_subcase(pp);
    j["subcase"] = to_string(s);
    if (s == Subcase::C1) j["c1_upper"] = num(c1_upper(pp, v));
    if (s == Subcase::C2) j["c2_lower"] = num(c2_lower(pp));
    return j;
}

Json trace_json(const std::vector<double>& h, size_t keep = 20) {
    Json j = Json::array();
    for (size_t i = h.size() > keep ? h.size() - keep : 0; i < h.size(); ++i) j.push_back(num(h[i]));
    return j;
}

Json min_json(const Minimization& m) {
    return Json{{"value", num(m.value)},
                {"iterations", m.iterations},
                {"grad_norm", num(m.grad_norm)},
                {"el_residual", num(m.el_residual)},
                {"monotone", m.monotone},
                {"history_tail", trace_json(m.history)}};
}

std::vector<std::string> pair_row(double x, const KLPair& kp, const ProblemParams& pp, double S) {
    return {csv_num(x),       csv_num(kp.k),  csv_num(kp.l), csv_num(kp.res1), csv_num(kp.res2),
            csv_num(jacobian(kp.k, kp.l, pp).det()), csv_num(level_of(kp.k, kp.l, pp, S))};
}

double symmetric_root(const ProblemParams& pp) {
    return std::pow(pp.mu1 + pp.gamma / 2, -pp.p / (pp.pstar() - pp.p));
}

bool is_symmetric(const ProblemParams& pp) {
    return pp.mu1 == pp.mu2 && std::abs(pp.alpha - pp.beta) < 1e-12;
}

// ---------------------------------------------------------------- coupling

CommandResult coupling_solve(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("coupling solve", c, o);
    const ProblemParams pp = checked_params(c, r);
    require_feasible(pp, "coupling solve");
    if (validate(pp).kind != Case::H1 || !(pp.gamma > 0))
        throw RegimeError("coupling solve: case H1 with gamma > 0 required");
    const int res = c.get_int("coupling", "resolution", 10000);
    const double S = sobolev_constant(pp.N, pp.p, quad_from(c)).S;
    const MinimalBranch mb = solve_minimal_pair(pp, res);
    const KLPair& kp = mb.primal;
    r.outputs["thresholds"] = thresholds_json(pp, o.variant);
    r.outputs["S"] = num(S);
    r.outputs["minimal_pair"] = to_json(kp);
    r.outputs["minimal_l_pair"] = to_json(mb.dual);
    r.outputs["jacobian_det"] = num(jacobian(kp.k, kp.l, pp).det());
    r.outputs["energy_level"] = num(level_of(kp.k, kp.l, pp, S));
    const bool window = in_window(pp, o.variant);
    r.outputs["in_threshold_window"] = window;
    if (window) {
        const LeastEnergy le = least_energy_level(pp, S, o.variant);
        r.outputs["least_energy_A"] = num(le.A);
        r.outputs["level_formula"] = to_string(le.formula);
    } else {
        r.outputs["level_formula"] = "outside_threshold_window";
    }
    r.checks.push_back(check_below("residual", std::max(std::abs(kp.res1), std::abs(kp.res2)), 1e-10));
    r.checks.push_back(check_flag("minimal_k_and_l_branches_agree", mb.dual_agrees));
    if (is_symmetric(pp)) {
        const double k0 = symmetric_root(pp);
        r.outputs["symmetric_closed_form"] = num(k0);
        r.checks.push_back(check_below("symmetric_closed_form_gap", std::max(std::abs(kp.k - k0), std::abs(kp.l - k0)),
                                       1e-10, "minimal root against (mu + gamma/2)^{-p/(p*-p)}"));
    }
    out.csv["solution.csv"] = CsvTable{{"gamma", "k", "l", "res1", "res2", "jacobian_det", "energy_level"},
                                       {pair_row(pp.gamma, kp, pp, S)}};
    return out;
}

CommandResult coupling_enumerate(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("coupling enumerate", c, o);
    const ProblemParams pp = checked_params(c, r);
    require_feasible(pp, "coupling enumerate");
    if (validate(pp).kind != Case::H1) throw RegimeError("coupling enumerate: case H1 required");
    const int res = c.get_int("coupling", "resolution", 10000);
    const double S = sobolev_constant(pp.N, pp.p, quad_from(c)).S;
    const auto roots = enumerate_solutions(pp, res);
    CsvTable t{{"index", "k", "l", "res1", "res2", "jacobian_det", "energy_level"}, {}};
    Json js = Json::array();
    bool all_ok = true;
    for (size_t i = 0; i < roots.size(); ++i) {
        js.push_back(to_json(roots[i]));
        auto row = pair_row(double(i), roots[i], pp, S);
        row[0] = std::to_string(i);
        t.rows.push_back(row);
        all_ok = all_ok && roots[i].accepted();
    }
    r.outputs["scan_resolution"] = res;
    r.outputs["roots"] = js;
    r.outputs["count"] = roots.size();
    r.checks.push_back(check_flag("roots_found", !roots.empty()));
    r.checks.push_back(check_flag("all_roots_accepted", all_ok));
    out.csv["roots.csv"] = t;
    return out;
}

CommandResult coupling_certify(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("coupling certify", c, o);
    const ProblemParams pp = checked_params(c, r);
    require_feasible(pp, "coupling certify");
    const Subcase s = classify_subcase(pp);
    if (validate(pp).kind != Case::H1 || !(pp.gamma > 0) || s == Subcase::None)
        throw RegimeError("coupling certify: case H1 with gamma > 0 in subcase C1 or C2 required");
    if (!in_window(pp, o.variant))
        throw RegimeError(s == Subcase::C1 ? "coupling certify: C1 requires gamma <= c1_upper = " +
                                                 fmt17(c1_upper(pp, o.variant))
                                           : "coupling certify: C2 requires gamma >= c2_lower = " + fmt17(c2_lower(pp)));
    const int res = c.get_int("coupling", "resolution", 10000);
    r.outputs["thresholds"] = thresholds_json(pp, o.variant);
    if (s == Subcase::C1) {
        const P1Certificate p1 = prop_p1_certificate(pp, res);
        Json w = Json::array();
        for (const auto& k : p1.cert.witnesses) w.push_back(to_json(k));
        r.outputs["prop_p1"] = Json{{"holds", p1.cert.holds},       {"witnesses", w},
                                    {"x1", num(p1.x1)},             {"x2", num(p1.x2)},
                                    {"g1_x1", num(p1.g1_x1)},       {"g2_x2", num(p1.g2_x2)},
                                    {"analytic_ok", p1.analytic_ok}, {"f1_decreasing", p1.f1_decreasing},
                                    {"f2_increasing", p1.f2_increasing}, {"scan_resolution", p1.cert.scan_resolution}};
        r.checks.push_back(Check{"prop_p1_unique_root", double(p1.cert.witnesses.size()), 1, p1.cert.holds, ""});
        r.checks.push_back(check_flag("prop_p1_analytic_conditions", p1.analytic_ok));
    } else {
        const L2Certificate l2 = lemma_l2_certificate(pp);
        r.outputs["lemma_l2"] = Json{{"kbar", num(l2.kbar)},
                                     {"min_lprime", num(l2.min_lprime)},
                                     {"lprime_at_kbar", num(l2.lprime_at_kbar)},
                                     {"sum_bound_value", num(l2.sum_bound_value)},
                                     {"sum_bound_ok", l2.sum_bound_ok},
                                     {"k_plus_l_increasing", l2.k_plus_l_increasing},
                                     {"dual_agrees", l2.dual_agrees},
                                     {"root", to_json(l2.root)}};
        r.checks.push_back(check_flag("lemma_l2_sum_bound", l2.sum_bound_ok));
        r.checks.push_back(Check{"lemma_l2_min_lprime", l2.min_lprime, -1, l2.min_lprime >= -1 - 1e-10, ">= -1"});
        r.checks.push_back(check_flag("lemma_l2_k_plus_l_increasing", l2.k_plus_l_increasing));
        const P2Certificate p2 = prop_p2_certificate(pp, c.get_int("coupling", "p2_resolution", 500));
        Json w = Json::array();
        for (const auto& k : p2.cert.witnesses) w.push_back(to_json(k));
        r.outputs["prop_p2"] = Json{{"holds", p2.cert.holds},
                                    {"witnesses", w},
                                    {"spacing", num(p2.spacing)},
                                    {"feasible_points", p2.feasible_points},
                                    {"boundary_violates_F1", p2.boundary_violates_F1},
                                    {"root", to_json(p2.root)}};
        r.checks.push_back(Check{"prop_p2_unique_point", double(p2.cert.witnesses.size()), 1, p2.cert.holds, ""});
    }
    return out;
}

CommandResult coupling_continue(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("coupling continue", c, o);
    const ProblemParams pp = checked_params(c, r);
    if (validate(pp).kind != Case::H1) throw RegimeError("coupling continue: case H1 required");
    const auto ladder = c.get_list("coupling", "ladder", kDefaultGammaLadder);
    if (ladder.empty()) throw ConfigError("[coupling] ladder is empty", 0, "ladder");
    const double S = sobolev_constant(pp.N, pp.p, quad_from(c)).S;
    const ContinuationResult cr = branch_continue(pp, ladder, S);
    CsvTable t{{"gamma", "k", "l", "res1", "res2", "jacobian_det", "energy_level"}, {}};
    Json pts = Json::array();
    for (const auto& bp : cr.points) {
        t.rows.push_back({csv_num(bp.gamma), csv_num(bp.pair.k), csv_num(bp.pair.l), csv_num(bp.pair.res1),
                          csv_num(bp.pair.res2), csv_num(bp.jacobian_det), csv_num(bp.energy_level)});
        pts.push_back(Json{{"gamma", num(bp.gamma)}, {"pair", to_json(bp.pair)},
                           {"jacobian_det", num(bp.jacobian_det)}, {"energy_level", num(bp.energy_level)}});
    }
    r.outputs["points"] = pts;
    r.outputs["gamma1_estimate"] = num(cr.gamma1_estimate);
    r.outputs["stop_reason"] = cr.stop_reason;
    r.outputs["literal_cap"] = num(cr.literal_cap);
    r.outputs["p_analogue_cap"] = num(cr.p_analogue_cap);
    r.provenance["gamma1_caps"] = "literal and p-analogue caps are reported, not asserted";
    r.checks.push_back(check_flag("branch_started", !cr.points.empty()));
    out.csv["branch.csv"] = t;
    return out;
}

// ----------------------------------------------------------------- verify

CommandResult verify_theorem1(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("verify theorem1", c, o);
    const ProblemParams pp = checked_params(c, r);
    if (!(pp.gamma < 0)) throw RegimeError("verify theorem1: γ < 0 required (gamma = " + fmt17(pp.gamma) + ")");
    require_feasible(pp, "verify theorem1");
    if (validate(pp).kind != Case::H1) throw RegimeError("verify theorem1: case H1 required");
    const auto ladder = c.get_list("energy", "R_ladder", {2, 4, 8, 16, 32});
    if (ladder.size() < 2) throw ConfigError("[energy] R_ladder needs at least two radii", 0, "R_ladder");
    PairQuad q;
    q.rel_tol = c.get_double("energy", "rel_tol", q.rel_tol);
    const double S = sobolev_constant(pp.N, pp.p, quad_from(c)).S;
    const Theorem1Result t1 = theorem1_experiment(pp, ladder, S, q);
    CsvTable t{{"R", "cross_term", "t_R", "s_R", "energy", "gap_to_limit"}, {}};
    Json rows = Json::array();
    bool decreasing = true, above = true, converged = true, gap_shrinks = true;
    for (size_t i = 0; i < t1.rows.size(); ++i) {
        const auto& w = t1.rows[i];
        t.rows.push_back({csv_num(w.R), csv_num(w.cross_term), csv_num(w.t_R), csv_num(w.s_R), csv_num(w.energy),
                          csv_num(w.gap_to_limit)});
        rows.push_back(Json{{"R", num(w.R)}, {"cross_term", num(w.cross_term)}, {"t_R", num(w.t_R)},
                            {"s_R", num(w.s_R)}, {"energy", num(w.energy)}, {"gap_to_limit", num(w.gap_to_limit)},
                            {"converged", w.converged}, {"error", w.error}});
        converged = converged && w.converged;
        above = above && w.gap_to_limit > 0;
        if (i > 0) {
            decreasing = decreasing && w.cross_term < t1.rows[i - 1].cross_term;
            gap_shrinks = gap_shrinks && w.gap_to_limit < t1.rows[i - 1].gap_to_limit;
        }
    }
    r.outputs["limit"] = num(t1.limit);
    r.outputs["cross_term_R0"] = num(t1.cross_term_R0);
    r.outputs["rows"] = rows;
    const auto& last = t1.rows.back();
    r.checks.push_back(check_flag("projections_converged", converged));
    r.checks.push_back(check_flag("cross_term_strictly_decreasing", decreasing));
    r.checks.push_back(check_below("scalings_near_one_at_largest_R",
                                   std::max(std::abs(last.t_R - 1), std::abs(last.s_R - 1)), 1e-2));
    r.checks.push_back(check_below("energy_rel_gap_at_largest_R", std::abs(last.gap_to_limit) / t1.limit, 0.02));
    r.checks.push_back(check_flag("energy_approaches_from_above", above && gap_shrinks));
    out.csv["theorem1.csv"] = t;
    return out;
}

CommandResult verify_theorem2(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("verify theorem2", c, o);
    const ProblemParams pp = checked_params(c, r);
    require_feasible(pp, "verify theorem2");
    if (validate(pp).kind != Case::H1 || !(pp.gamma > 0))
        throw RegimeError("verify theorem2: case H1 with gamma > 0 required");
    if (!in_window(pp, o.variant))
        throw RegimeError("verify theorem2: gamma outside the C1/C2 threshold window " +
                          thresholds_json(pp, o.variant).dump());
    const double S = sobolev_constant(pp.N, pp.p, quad_from(c)).S;
    PairQuad q;
    q.rel_tol = c.get_double("energy", "rel_tol", q.rel_tol);
    const Theorem2Check t2 = plapsys::verify_theorem2(pp, S, c.get_double("energy", "eps", 1), q);
    PairQuad qr = q;
    qr.rel_tol = c.get_double("energy", "random_rel_tol", 1e-6);
    const int samples = c.get_int("energy", "samples", 200);
    const std::uint64_t seed = o.seed ? *o.seed : std::uint64_t(c.get_int("energy", "seed", 12345));
    const LowerBoundEvidence lb = random_lower_bound(pp, t2.closed_form_A, samples, seed, qr);
    r.outputs["thresholds"] = thresholds_json(pp, o.variant);
    r.outputs["root"] = to_json(t2.root);
    r.outputs["energy_at_candidate"] = num(t2.energy_at_candidate);
    r.outputs["closed_form_A"] = num(t2.closed_form_A);
    r.outputs["nehari_residuals"] = Json{{"G1", num(t2.residuals.G1)}, {"G2", num(t2.residuals.G2)}};
    r.outputs["random"] = Json{{"samples", lb.samples},
                               {"projection_failures", lb.projection_failures},
                               {"min_energy", num(lb.min_energy)},
                               {"seed", seed}};
    r.provenance["random_pair_rel_tol"] = qr.rel_tol;
    r.checks.push_back(check_below("theorem2_rel_gap", t2.rel_gap, 1e-6));
    r.checks.push_back(Check{"random_pairs_above_level", lb.min_energy - t2.closed_form_A, -1e-6, lb.all_above,
                             "min projected energy minus A"});
    r.checks.push_back(check_flag("random_samples_collected", lb.samples == samples));
    return out;
}

CommandResult verify_theorem4(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("verify theorem4", c, o);
    const ProblemParams pp = checked_params(c, r);
    if (validate(pp).kind != Case::H1) throw RegimeError("verify theorem4: case H1 required");
    if (!(2.0 * pp.N / (pp.N + 2) < pp.p && pp.p < pp.N / 2.0) || !(pp.alpha < pp.p && pp.beta < pp.p))
        throw RegimeError("verify theorem4: need 2N/(N+2) < p < N/2 and alpha, beta < p");
    const auto ladder = c.get_list("coupling", "ladder", kDefaultGammaLadder);
    if (ladder.empty()) throw ConfigError("[coupling] ladder is empty", 0, "ladder");
    const double S = sobolev_constant(pp.N, pp.p, quad_from(c)).S;
    const ContinuationResult cr = branch_continue(pp, ladder, S);
    const double e = (pp.N - pp.p) / pp.p;
    const double bound = std::min(std::pow(pp.mu1, -e), std::pow(pp.mu2, -e)) * std::pow(S, pp.N / pp.p) / pp.N;
    CsvTable t{{"gamma", "k", "l", "energy_level", "minimal_level", "level_bound"}, {}};
    bool distinct = true, above_bound = true, above_minimal = true;
    double min_margin = kInf;
    for (const auto& bp : cr.points) {
        ProblemParams pg = pp;
        pg.gamma = bp.gamma;
        const KLPair mk = solve_minimal_branch(pg);
        const double lm = level_of(mk.k, mk.l, pg, S);
        distinct = distinct && std::abs(mk.k - bp.pair.k) + std::abs(mk.l - bp.pair.l) > 1e-6;
        above_bound = above_bound && bp.energy_level > bound;
        above_minimal = above_minimal && bp.energy_level > lm;
        min_margin = std::min(min_margin, bp.energy_level - std::max(bound, lm));
        t.rows.push_back({csv_num(bp.gamma), csv_num(bp.pair.k), csv_num(bp.pair.l), csv_num(bp.energy_level),
                          csv_num(lm), csv_num(bound)});
    }
    const size_t want = ladder.size();
    r.outputs["points"] = cr.points.size();
    r.outputs["stop_reason"] = cr.stop_reason;
    r.outputs["gamma1_estimate"] = num(cr.gamma1_estimate);
    r.outputs["level_bound"] = num(bound);
    r.outputs["min_margin"] = num(min_margin);
    r.checks.push_back(Check{"ladder_completed", double(cr.points.size()), double(want), cr.points.size() >= want, ""});
    r.checks.push_back(check_flag("branch_distinct_from_minimal", distinct));
    r.checks.push_back(check_flag("level_above_semitrivial_bound", above_bound));
    r.checks.push_back(check_flag("level_above_minimal_branch", above_minimal));
    out.csv["theorem4.csv"] = t;
    return out;
}

RadialGrid grid_from(const Config& c, int N, int n_override = 0) {
    const int n = n_override ? n_override : c.get_int("radial", "n", 2001);
    return RadialGrid::make(N, c.get_double("radial", "R", 1), n);
}

CommandResult verify_prop1_sec5(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("verify prop1_sec5", c, o);
    const int N = c.get_int("params", "N", 9);
    const double p = c.get_double("params", "p", 2.5);
    r.params = Json{{"N", N}, {"p", num(p)}};
    const double qq = c.get_double("radial", "q", 1.5), rr = c.get_double("radial", "r", 1.5);
    const double ps = N > p ? N * p / (N - p) : kInf;
    if (!(qq > 1 && rr > 1 && qq + rr > p && qq + rr < ps))
        throw RegimeError("verify prop1_sec5: need q, r > 1 and p < q + r < p*");
    const RadialGrid g1 = grid_from(c, N), g2 = grid_from(c, N, 2 * g1.n - 1);
    const SPairResult a1 = s_pair(g1, p, qq, rr), a2 = s_pair(g2, p, qq, rr);
    const Minimization b1 = s_single(g1, p, qq + rr), b2 = s_single(g2, p, qq + rr);
    const double want = pair_factor(qq, rr), ratio = a1.min.value / b1.value;
    r.outputs["s_pair"] = min_json(a1.min);
    r.outputs["s_single"] = min_json(b1);
    r.outputs["s_pair_fine"] = num(a2.min.value);
    r.outputs["s_single_fine"] = num(b2.value);
    r.outputs["ratio"] = num(ratio);
    r.outputs["closed_form_factor"] = num(want);
    r.outputs["ratio_dev"] = num(a1.ratio_dev);
    r.checks.push_back(check_below("ratio_rel_gap", std::abs(ratio / want - 1), 0.01));
    r.checks.push_back(check_below("minimizer_ratio_dev", a1.ratio_dev, 0.01));
    r.checks.push_back(check_below("two_grid_s_pair", std::abs(a2.min.value / a1.min.value - 1), 0.01));
    r.checks.push_back(check_below("two_grid_s_single", std::abs(b2.value / b1.value - 1), 0.01));
    r.checks.push_back(check_below("el_residual", std::max(a1.min.el_residual, b1.el_residual), 1e-4));
    return out;
}

CommandResult verify_eq011(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("verify eq011", c, o);
    const int N = c.get_int("params", "N", 9);
    const double p = c.get_double("params", "p", 2.5);
    const double a = c.get_double("params", "a", p / 2), b = c.get_double("params", "b", p - a);
    r.params = Json{{"N", N}, {"p", num(p)}, {"a", num(a)}, {"b", num(b)}};
    if (!(a > 1 && b > 1) || std::abs(a + b - p) > 1e-12) throw RegimeError("verify eq011: need a, b > 1, a + b = p");
    const RadialGrid g1 = grid_from(c, N), g2 = grid_from(c, N, 2 * g1.n - 1);
    const Check011 c1 = check_011(g1, p, a, b), c2 = check_011(g2, p, a, b);
    r.outputs["lhs"] = num(c1.lhs);
    r.outputs["rhs"] = num(c1.rhs);
    r.outputs["lambda1"] = num(c1.lambda1);
    r.outputs["lhs_fine"] = num(c2.lhs);
    r.outputs["lambda1_fine"] = num(c2.lambda1);
    r.checks.push_back(check_below("rel_gap", c1.rel_gap, 0.01));
    r.checks.push_back(check_below("two_grid_lhs", std::abs(c2.lhs / c1.lhs - 1), 0.01));
    r.checks.push_back(check_below("two_grid_lambda1", std::abs(c2.lambda1 / c1.lambda1 - 1), 0.01));
    return out;
}

CommandResult verify_lemma_l4(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("verify lemma_l4", c, o);
    const ProblemParams pp = checked_params(c, r);
    if (!(pp.gamma > 0)) throw RegimeError("verify lemma_l4: gamma > 0 required");
    const SubcriticalSpec spec{c.get_double("radial", "eps", 0.2)};
    spec.check(pp);
    const RadialGrid g = grid_from(c, pp.N);
    const auto s_ladder = c.get_list("radial", "s_ladder", {0.2, 0.1, 0.05});
    const LemmaL4Check l4 = lemma_l4_check(g, pp, spec, s_ladder);
    const AEpsResult ae = a_eps(g, pp, spec);
    CsvTable t{{"s", "t", "one_minus_t", "predicted_one_minus_t"}, {}};
    Json ts = Json::array();
    for (const auto& x : l4.t_of_s) {
        const double pred = l4.predicted_coefficient * std::pow(x.s, l4.expected_exponent);
        t.rows.push_back({csv_num(x.s), csv_num(x.t), csv_num(x.one_minus_t), csv_num(pred)});
        ts.push_back(Json{{"s", num(x.s)}, {"t", num(x.t)}, {"one_minus_t", num(x.one_minus_t)}});
    }
    r.outputs["A_eps"] = num(l4.A_eps);
    r.outputs["a1"] = num(l4.a1);
    r.outputs["a2"] = num(l4.a2);
    r.outputs["t_of_s"] = ts;
    r.outputs["t_of_s_exponent"] = num(l4.t_of_s_exponent);
    r.outputs["expected_exponent"] = num(l4.expected_exponent);
    r.outputs["a_eps"] = Json{{"identity_gap", num(ae.identity_gap)},
                              {"nehari_residual", num(ae.nehari_residual)},
                              {"symmetry_gap", num(ae.symmetry_gap)},
                              {"lagrange_residual", num(ae.lagrange_residual)},
                              {"min_value", num(ae.min_value)},
                              {"minimization", min_json(ae.min)}};
    r.provenance["identity_coefficient"] = num(ae.identity_coefficient);
    r.provenance["literal_coefficient_recorded"] = num(ae.literal_coefficient);
    r.checks.push_back(Check{"strict_inequality", l4.A_eps - std::min(l4.a1, l4.a2), -1e-6, l4.strict,
                             "A_eps - min(a1, a2)"});
    r.checks.push_back(check_below("t_at_zero", std::abs(l4.t_at_zero - 1), 1e-12));
    r.checks.push_back(check_below("exponent_rel_gap",
                                   std::abs(l4.t_of_s_exponent - l4.expected_exponent) / l4.expected_exponent, 0.15));
    r.checks.push_back(check_below("a_eps_identity_gap", ae.identity_gap, 1e-6));
    r.checks.push_back(check_below("a_eps_nehari_residual", ae.nehari_residual, 1e-9));
    r.checks.push_back(check_below("a_eps_lagrange_residual", ae.lagrange_residual, 1e-4));
    out.csv["lemma_l4.csv"] = t;
    return out;
}

CommandResult verify_mp_level(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("verify mp_level", c, o);
    ProblemParams pp = checked_params(c, r);
    const Regime reg = validate(pp);
    if (reg.kind != Case::H2) throw RegimeError("verify mp_level: case H2 required; " + joined_notes(reg));
    if (!(pp.p <= std::sqrt(double(pp.N)))) throw RegimeError("verify mp_level: p <= sqrt(N) required");
    double l1 = c.get_double("mp", "lambda1", 0);
    if (!(l1 > 0)) {
        const RadialGrid g = RadialGrid::make(pp.N, c.get_double("radial", "R", 1), c.get_int("mp", "n", 2001));
        l1 = lambda1(g, pp.p).value;
        r.provenance["lambda1_source"] = "radial descent on the ball";
    }
    const double cap = th5_lambda_cap(pp, l1);
    if (c.has("mp", "lambda_fraction")) {
        pp.lambda = c.get_double("mp", "lambda_fraction", 0.5) * cap;
        r.params = to_json(pp);
    }
    if (!(pp.lambda < cap))
        throw RegimeError("verify mp_level: lambda = " + fmt17(pp.lambda) +
                          " violates the mountain-pass bound lambda < p/(a^a b^b)^{1/p} lambda1 = " + fmt17(cap));
    const double rho = c.get_double("mp", "rho", 1);
    std::vector<double> def;
    for (int j = 3; j <= 10; ++j) def.push_back(std::ldexp(rho, -j));
    const auto ladder = c.get_list("mp", "eps_ladder", def);
    const double S = sobolev_constant(pp.N, pp.p, quad_from(c)).S;
    const MpResult mp = mp_level(pp, ladder, rho, l1, S, quad_from(c));
    CsvTable t{{"eps", "S_eps", "S_ab", "gap", "below"}, {}};
    Json rows = Json::array();
    int misses = 0;
    for (const auto& w : mp.rows) {
        t.rows.push_back({csv_num(w.eps), csv_num(w.S_eps), csv_num(w.S_ab), csv_num(w.gap), w.below ? "1" : "0"});
        rows.push_back(Json{{"eps", num(w.eps)}, {"S_eps", num(w.S_eps)}, {"S_ab", num(w.S_ab)}, {"gap", num(w.gap)},
                            {"below", w.below}, {"warn_ratio", w.warn_ratio}});
        if (w.eps <= rho / 8 * (1 + 1e-12) && !w.below) ++misses;
    }
    r.outputs["lambda1"] = num(l1);
    r.outputs["lambda_cap"] = num(mp.lambda_cap);
    r.outputs["rows"] = rows;
    r.outputs["gap_slope"] = num(mp.gap_slope);
    r.outputs["slope_points"] = mp.slope_points;
    r.checks.push_back(Check{"below_for_eps_le_rho_over_8", double(misses), 0, misses == 0, "ladder points not below"});
    if (pp.N > pp.p * pp.p)
        r.checks.push_back(check_below("gap_slope_rel_gap", std::abs(mp.gap_slope - pp.p) / pp.p, 0.2));
    out.csv["mp_level.csv"] = t;
    return out;
}

}  // namespace

CommandResult cmd_sobolev(const Config& c, const RunOptions& o) {
    CommandResult out;
    RunReport& r = out.report = start("sobolev", c, o);
    const int N = c.get_int("params", "N", 0);
    const double p = c.get_double("params", "p", 0);
    if (!c.has("params", "N") || !c.has("params", "p")) throw ConfigError("[params] must define N and p", 0, "N");
    if (N < 3 || !(p > 1 && p < N)) throw RegimeError("sobolev: need N >= 3 and 1 < p < N");
    r.params = Json{{"N", N}, {"p", num(p)}};
    const QuadratureSpec q = quad_from(c);
    const SobolevResult sr = sobolev_constant(N, p, q);
    const double eps2 = c.get_double("sobolev", "eps_check", 0.25);
    const Norms n2 = norms(InstantonSpec{N, p, eps2, 0}, q);
    const double eps = c.get_double("sobolev", "eps", 1);
    const int count = c.get_int("sobolev", "radii", 30);
    const double lo = c.get_double("sobolev", "r_min", 1e-2), hi = c.get_double("sobolev", "r_max", 1e3);
    if (count < 2 || !(lo > 0 && hi > lo)) throw ConfigError("[sobolev] needs radii >= 2 and 0 < r_min < r_max", 0, "radii");
    Json table = Json::array();
    double worst = 0;
    for (int i = 0; i < count; ++i) {
        const double rr = lo * std::pow(hi / lo, double(i) / (count - 1));
        const double res = plap_residual(rr, InstantonSpec{N, p, eps, 0});
        worst = std::max(worst, std::abs(res));
        table.push_back(Json{{"r", num(rr)}, {"residual", num(res)}});
    }
    const double identity = std::abs(sr.n.grad_p - sr.n.crit) / sr.n.crit;
    const double eps_dev = std::max(std::abs(n2.grad_p - sr.n.grad_p) / sr.n.grad_p,
                                    std::abs(n2.crit - sr.n.crit) / sr.n.crit);
    r.outputs["S"] = num(sr.S);
    r.outputs["S_from_quotient"] = num(sr.S_from_quotient);
    r.outputs["grad_p"] = num(sr.n.grad_p);
    r.outputs["crit"] = num(sr.n.crit);
    r.outputs["lp_status"] = sr.n.lp_status == LpStatus::finite ? "finite"
                             : sr.n.lp_status == LpStatus::log_divergent ? "log_divergent"
                                                                          : "divergent";
    if (sr.n.lp_status == LpStatus::finite) r.outputs["lp"] = num(sr.n.lp);
    r.outputs["residuals"] = table;
    r.outputs["eps_check"] = num(eps2);
    r.checks.push_back(check_below("norm_identity", identity, 1e-8));
    r.checks.push_back(check_below("eps_independence", eps_dev, 1e-8));
    r.checks.push_back(check_below("pde_residual", worst, 1e-6));
    return out;
}

CommandResult cmd_coupling(const Config& c, const std::string& action, const RunOptions& o) {
    if (action == "solve") return coupling_solve(c, o);
    if (action == "enumerate") return coupling_enumerate(c, o);
    if (action == "certify") return coupling_certify(c, o);
    if (action == "continue") return coupling_continue(c, o);
    throw ConfigError("unknown coupling action '" + action + "' (solve, enumerate, certify, continue)", 0, action);
}

CommandResult cmd_verify(const Config& c, const std::string& target, const RunOptions& o) {
    if (target == "theorem1") return verify_theorem1(c, o);
    if (target == "theorem2") return verify_theorem2(c, o);
    if (target == "theorem4") return verify_theorem4(c, o);
    if (target == "prop1_sec5") return verify_prop1_sec5(c, o);
    if (target == "eq011") return verify_eq011(c, o);
    if (target == "lemma_l4") return verify_lemma_l4(c, o);
    if (target == "mp_level") return verify_mp_level(c, o);
    throw ConfigError("unknown verify target '" + target + "'", 0, target);
}

SweepOutcome cmd_sweep(const Config& c, const RunOptions& o) {
    SweepOutcome s;
    s.param = c.get_string("sweep", "param", "gamma");
    static const std::vector<std::string> allowed = {"gamma", "lambda", "mu1", "mu2", "alpha", "a"};
    if (std::find(allowed.begin(), allowed.end(), s.param) == allowed.end())
        throw ConfigError("[sweep] param must be one of gamma, lambda, mu1, mu2, alpha, a", 0, "param");
    auto ladder = c.get_list("sweep", "ladder", {});
    if (ladder.empty()) throw ConfigError("[sweep] ladder is empty", 0, "ladder");
    const bool up = ladder.size() < 2 || ladder[1] > ladder[0];
    for (size_t i = 1; i < ladder.size(); ++i)
        if (up ? !(ladder[i] > ladder[i - 1]) : !(ladder[i] < ladder[i - 1]))
            throw ConfigError("[sweep] ladder must be strictly monotone", 0, "ladder");
    std::sort(ladder.begin(), ladder.end());
    s.values = ladder;
    const int workers = std::max(1, std::min<int>(o.parallel, int(ladder.size())));
    s.points.resize(ladder.size());
    std::atomic<size_t> next{0};
    auto work = [&] {
        for (size_t i; (i = next++) < ladder.size();) {
            Config ci = c;
            ci.set("params", s.param, fmt17(ladder[i]));
            try {
                s.points[i] = cmd_coupling(ci, "solve", o);
            } catch (const std::exception& e) {
                s.points[i] = failure_result("coupling solve", &ci, e);
            }
        }
    };
    std::vector<std::thread> pool;
    for (int k = 0; k < workers; ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    s.table.columns = {s.param, "k", "l", "res1", "res2", "jacobian_det", "energy_level", "passed"};
    s.summary = start("sweep", c, o);
    s.summary.outputs["param"] = s.param;
    Json pts = Json::array();
    for (size_t i = 0; i < ladder.size(); ++i) {
        const RunReport& pr = s.points[i].report;
        const bool ok = pr.passed();
        s.any_failed = s.any_failed || !ok;
        const Json& o2 = pr.outputs;
        auto field = [&](const char* a, const char* b) {
            if (o2.contains(a) && o2[a].contains(b) && o2[a][b].is_number()) return csv_num(o2[a][b].get<double>());
            return std::string("nan");
        };
        const std::string lvl =
            o2.contains("energy_level") && o2["energy_level"].is_number() ? csv_num(o2["energy_level"].get<double>())
                                                                           : "nan";
        const std::string det =
            o2.contains("jacobian_det") && o2["jacobian_det"].is_number() ? csv_num(o2["jacobian_det"].get<double>())
                                                                           : "nan";
        s.table.rows.push_back({csv_num(ladder[i]), field("minimal_pair", "k"), field("minimal_pair", "l"),
                                field("minimal_pair", "res1"), field("minimal_pair", "res2"), det, lvl,
                                ok ? "1" : "0"});
        char name[32];
        std::snprintf(name, sizeof name, "point_%03zu", i);
        pts.push_back(Json{{"dir", name}, {"value", num(ladder[i])}, {"passed", ok}});
        s.summary.checks.push_back(check_flag(name, ok));
    }
    s.summary.outputs["points"] = pts;
    return s;
}

void write_outputs(const CommandResult& r, const std::string& dir) {
    atomic_write((std::filesystem::path(dir) / "report.json").string(), dump_canonical(r.report.json()));
    for (const auto& [name, t] : r.csv) atomic_write((std::filesystem::path(dir) / name).string(), t.str());
}

void write_sweep(const SweepOutcome& s, const std::string& dir) {
    for (size_t i = 0; i < s.points.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "point_%03zu", i);
        write_outputs(s.points[i], (std::filesystem::path(dir) / name).string());
    }
    atomic_write((std::filesystem::path(dir) / "sweep.csv").string(), s.table.str());
    atomic_write((std::filesystem::path(dir) / "report.json").string(), dump_canonical(s.summary.json()));
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kExitConfig;
    if (dynamic_cast<const RegimeError*>(&e)) return kExitRegime;
    if (dynamic_cast<const ConvergenceError*>(&e)) return kExitConvergence;
    return kExitCheckFailed;
}

std::string hint_for(const std::exception& e) {
    if (auto* ce = dynamic_cast<const ConfigError*>(&e))
        return ce->key.empty() ? "fix the config file syntax" : "check the value of '" + ce->key + "' in the config";
    if (dynamic_cast<const DomainError*>(&e)) return "an input lies outside the domain of a formula; check [params]";
    if (dynamic_cast<const RegimeError*>(&e)) return "adjust [params] so the listed hypotheses hold";
    if (dynamic_cast<const ConvergenceError*>(&e))
        return "loosen [quadrature] rel_tol, refine [radial] n, or inspect the trace in report.json";
    return "unexpected failure";
}

CommandResult failure_result(const std::string& command, const Config* c, const std::exception& e) {
    CommandResult out;
    out.report.command = command;
    out.report.timestamp = utc_timestamp();
    if (c) out.report.config = c->echo();
    out.report.errors.push_back(e.what());
    out.report.outputs["exit_code"] = exit_code_for(e);
    out.report.outputs["hint"] = hint_for(e);
    if (auto* ce = dynamic_cast<const ConvergenceError*>(&e)) out.report.outputs["trace"] = trace_json(ce->trace, 200);
    return out;
}

}  // namespace plapsys
