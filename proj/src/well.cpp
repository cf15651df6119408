#include "wetting/well.hpp"

#include <algorithm>
#include <cmath>

namespace wetting {

namespace {
// Tolerance identifying F(lambda) == Lambda(t0) ties; matches the bisection
// accuracy of saturation_points().
bool roughly_equal(double x, double y) {
    return std::abs(x - y) <= 4e-12 * (1.0 + std::abs(y));
}
}  // namespace

const char* to_string(WellRegime r) {
    switch (r) {
        case WellRegime::Dry: return "dry";
        case WellRegime::WetCramer: return "wet-cramer";
        case WellRegime::WetSaturatedLeft: return "wet-saturated-left";
        case WellRegime::WetSaturatedRight: return "wet-saturated-right";
        case WellRegime::WetSaturatedBoth: return "wet-saturated-both";
        case WellRegime::BoundaryLeft: return "boundary-left";
        case WellRegime::BoundaryRight: return "boundary-right";
        case WellRegime::BoundaryBoth: return "boundary-both";
    }
    return "?";
}

WellModel::WellModel(const IncrementLaw& law, int n_max)
    : WellModel(std::make_shared<RenewalModel>(RenewalModel::from_law(law, n_max))) {}

WellModel::WellModel(std::shared_ptr<const RenewalModel> renewal)
    : renewal_(std::move(renewal)),
      rate_plus_(renewal_->law(), Sign::plus),
      rate_minus_(renewal_->law(), Sign::minus) {
    if (!renewal_->has_law())
        throw std::invalid_argument("WellModel: needs a lattice increment law");
    lambda_minus_ = solve_saturation_point(rate_minus_);
    lambda_plus_ = solve_saturation_point(rate_plus_);
}

ExtReal WellModel::max_depth() const {
    ExtReal xp = rate_plus_.xbar(), xm = rate_minus_.xbar();
    double inv = 0.0;
    if (xp.is_finite()) inv += 1.0 / xp.value();
    if (xm.is_finite()) inv += 1.0 / xm.value();
    if (inv == 0.0) return ExtReal::infinity();
    return ExtReal(1.0 / inv);
}

ExtReal WellModel::solve_saturation_point(const RateFunction& rf) const {
    ExtReal t0 = rf.t0();
    if (t0 == ExtReal(0.0) || t0.is_inf()) return ExtReal::infinity();
    ExtReal Lt0 = rf.lambda_at_t0();
    if (Lt0.is_inf()) return ExtReal::infinity();
    double target = Lt0.value();
    double lo = renewal_->lambda_c();
    double hi = lo + 1.0;
    while (renewal_->free_energy(hi) < target) hi *= 2.0;
    auto f = [&](double lam) { return renewal_->free_energy(lam) - target; };
    return ExtReal(bisect(f, lo, hi, f(lo), f(hi), 1e-12 * hi));
}

std::pair<ExtReal, ExtReal> WellModel::saturation_points() const {
    return {lambda_minus_, lambda_plus_};
}

double WellModel::penalty(Sign s, double a, double w) const {
    if (a == 0.0) return 0.0;
    const RateFunction& rf = rate_fn(s);
    if (w == 0.0) {
        ExtReal t0 = rf.t0();
        return t0.is_inf() ? kInf : a * t0.value();  // lim w I(a/w) = a t0
    }
    double I = rf.rate(a / w);
    return std::isinf(I) ? kInf : w * I;
}

double WellModel::g_value_asym(double lambda, double a, double b, double u, double v) const {
    if (!(0.0 <= u && u <= v && v <= 1.0))
        throw std::invalid_argument("g_value: need 0 <= u <= v <= 1");
    double F = renewal_->free_energy(lambda);
    double pm = penalty(Sign::minus, a, u);
    if (std::isinf(pm)) return -kInf;
    double pp = penalty(Sign::plus, b, 1.0 - v);
    if (std::isinf(pp)) return -kInf;
    return (v - u) * F - pm - pp;
}

double WellModel::g_value(double lambda, double a, double u, double v) const {
    return g_value_asym(lambda, a, a, u, v);
}

WellSolution WellModel::solve(double lambda, double a) const {
    return solve_impl(lambda, a, a);
}

WellSolution WellModel::solve_asym(double lambda, double a, double b) const {
    return solve_impl(lambda, a, b);
}

WellSolution WellModel::solve_impl(double lambda, double a, double b) const {
    if (!(lambda > 0.0) || a < 0.0 || b < 0.0)
        throw std::invalid_argument("solve: need lambda > 0 and a, b >= 0");

    WellSolution sol;
    auto [lmin, lplu] = saturation_points();
    sol.lambda_minus = lmin;
    sol.lambda_plus = lplu;

    const double F = renewal_->free_energy(lambda);

    // Feasibility of any wetted configuration: a/xbar_- + b/xbar_+ <= 1.
    double occupancy = 0.0;
    ExtReal xm = rate_minus_.xbar(), xp = rate_plus_.xbar();
    if (xm.is_finite()) occupancy += a / xm.value();
    if (xp.is_finite()) occupancy += b / xp.value();
    if (occupancy > 1.0) {
        sol.psi = -kInf;
        sol.free_energy = 0.0;
        sol.regime = WellRegime::Dry;
        sol.u_star = sol.v_star = std::numeric_limits<double>::quiet_NaN();
        return sol;
    }

    double slope_minus = rate_minus_.slope_at_level(F);
    double slope_plus = rate_plus_.slope_at_level(F);
    ExtReal wm = (a == 0.0) ? ExtReal(0.0)
                 : (slope_minus == 0.0) ? ExtReal::infinity()
                                        : ExtReal(a / slope_minus);
    ExtReal wp = (b == 0.0) ? ExtReal(0.0)
                 : (slope_plus == 0.0) ? ExtReal::infinity()
                                       : ExtReal(b / slope_plus);
    sol.w_minus = wm;
    sol.w_plus = wp;
    sol.theta_minus = std::atan(slope_minus);
    sol.theta_plus = std::atan(slope_plus);

    // Attained minimizer of g_{+/-}: the w* formula once F reaches Lambda(t0)
    // stops describing it (the minimum sits at 0 from there on), so the
    // u <= v compatibility test must use the attained locations.
    auto attained = [&](const RateFunction& rf, ExtReal w) {
        ExtReal Lt0 = rf.lambda_at_t0();
        if (Lt0.is_finite() && F >= Lt0.value() - 4e-12 * (1.0 + std::abs(Lt0.value())))
            return ExtReal(0.0);
        return w;
    };
    ExtReal em = attained(rate_minus_, wm);
    ExtReal ep = attained(rate_plus_, wp);

    if (em + ep <= ExtReal(1.0)) {
        double inv_m = rate_minus_.lambda_inverse(F);
        double inv_p = rate_plus_.lambda_inverse(F);
        sol.psi = F - a * inv_m - b * inv_p;
        sol.free_energy = std::max(sol.psi, 0.0);

        ExtReal LtM = rate_minus_.lambda_at_t0();
        ExtReal LtP = rate_plus_.lambda_at_t0();
        bool eq_m = LtM.is_finite() && roughly_equal(F, LtM.value());
        bool eq_p = LtP.is_finite() && roughly_equal(F, LtP.value());
        bool sat_m = !eq_m && ExtReal(F) > LtM;
        bool sat_p = !eq_p && ExtReal(F) > LtP;

        if (sat_m || eq_m) {
            double am = eq_m ? a / rate_minus_.rho().as_double() : 0.0;
            sol.U_star = {0.0, eq_m ? am : 0.0};
        } else {
            sol.U_star = {wm.value(), wm.value()};
        }
        if (sat_p || eq_p) {
            double bp = eq_p ? b / rate_plus_.rho().as_double() : 0.0;
            sol.V_star = {eq_p ? 1.0 - bp : 1.0, 1.0};
        } else {
            sol.V_star = {1.0 - wp.value(), 1.0 - wp.value()};
        }
        sol.u_star = sol.U_star.is_point() ? sol.U_star.lo
                                           : std::numeric_limits<double>::quiet_NaN();
        sol.v_star = sol.V_star.is_point() ? sol.V_star.lo
                                           : std::numeric_limits<double>::quiet_NaN();

        if (sol.psi < 0.0) {
            sol.regime = WellRegime::Dry;
        } else if (eq_m && eq_p) {
            sol.regime = WellRegime::BoundaryBoth;
        } else if (eq_m) {
            sol.regime = WellRegime::BoundaryLeft;
        } else if (eq_p) {
            sol.regime = WellRegime::BoundaryRight;
        } else if (sat_m && sat_p) {
            sol.regime = WellRegime::WetSaturatedBoth;
        } else if (sat_m) {
            sol.regime = WellRegime::WetSaturatedLeft;
        } else if (sat_p) {
            sol.regime = WellRegime::WetSaturatedRight;
        } else {
            sol.regime = WellRegime::WetCramer;
        }
        return sol;
    }

    // w_-^* + w_+^* > 1: the supremum sits on the diagonal u = v and is
    // negative, so the system is dry (proof of the w+w- lemma).
    double u_lo = xm.is_finite() ? a / xm.value() : 0.0;
    double u_hi = xp.is_finite() ? 1.0 - b / xp.value() : 1.0;
    auto h = [&](double u) {
        return -(penalty(Sign::minus, a, u) + penalty(Sign::plus, b, 1.0 - u));
    };
    double u_best = golden_max(h, u_lo, u_hi, 1e-11);
    double val = h(u_best);
    if (h(u_lo) > val) { u_best = u_lo; val = h(u_lo); }
    if (h(u_hi) > val) { u_best = u_hi; val = h(u_hi); }
    sol.psi = val;
    sol.free_energy = 0.0;
    sol.regime = WellRegime::Dry;
    sol.U_star = {u_best, u_best};
    sol.V_star = {u_best, u_best};
    sol.u_star = sol.v_star = u_best;
    return sol;
}

double WellModel::psi_brute_force(double lambda, double a, int grid_n) const {
    if (grid_n < 100) throw std::invalid_argument("psi_brute_force: grid_n >= 100");
    const double F = renewal_->free_energy(lambda);
    const int n = grid_n;

    // g separates as A(u) + B(v); the triangular-grid maximum is a prefix-max
    // scan over the same grid values.
    std::vector<double> A(static_cast<std::size_t>(n + 1)), B(A);
    for (int i = 0; i <= n; ++i) {
        double u = static_cast<double>(i) / n;
        double pm = penalty(Sign::minus, a, u);
        A[static_cast<std::size_t>(i)] = std::isinf(pm) ? -kInf : -u * F - pm;
        double pp = penalty(Sign::plus, a, 1.0 - u);
        B[static_cast<std::size_t>(i)] = std::isinf(pp) ? -kInf : u * F - pp;
    }
    double best = -kInf;
    int bi = 0, bj = n;
    double run_max = -kInf;
    int run_arg = 0;
    for (int j = 0; j <= n; ++j) {
        if (A[static_cast<std::size_t>(j)] > run_max) {
            run_max = A[static_cast<std::size_t>(j)];
            run_arg = j;
        }
        double cand = run_max + B[static_cast<std::size_t>(j)];
        if (cand > best) { best = cand; bi = run_arg; bj = j; }
    }
    if (std::isinf(best)) return -kInf;

    // Local refinement: golden section on each coordinate around the best
    // grid point (g is concave in each coordinate).
    double u = static_cast<double>(bi) / n, v = static_cast<double>(bj) / n;
    double span = 2.0 / n;
    for (int round = 0; round < 3; ++round) {
        double ulo = std::max(0.0, u - span), uhi = std::min(v, u + span);
        u = golden_max([&](double uu) { return g_value(lambda, a, uu, v); }, ulo, uhi, 1e-12);
        double vlo = std::max(u, v - span), vhi = std::min(1.0, v + span);
        v = golden_max([&](double vv) { return g_value(lambda, a, u, vv); }, vlo, vhi, 1e-12);
    }
    return std::max(best, g_value(lambda, a, u, v));
}

CriticalDepth WellModel::critical_depth(double lambda) const {
    double F = renewal_->free_energy(lambda);
    if (F <= 0.0) return {0.0, false};
    double denom = rate_minus_.lambda_inverse(F) + rate_plus_.lambda_inverse(F);
    if (denom == 0.0) return {kInf, true};  // both rate functions trivial
    return {F / denom, true};
}

double WellModel::lambda_c_of_depth(double a) const {
    if (a == 0.0) return renewal_->lambda_c();
    if (!(ExtReal(a) < max_depth())) return kInf;
    double lo = renewal_->lambda_c();
    double hi = lo + 1.0;
    int guard = 0;
    while (solve(hi, a).psi <= 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw std::runtime_error("lambda_c_of_depth: no wet phase found");
    }
    auto f = [&](double lam) { return solve(lam, a).psi; };
    return bisect(f, lo, hi, f(lo), f(hi), 1e-10);
}

TransitionReport WellModel::transition_constants(double a) const {
    if (!(a > 0.0) || !(ExtReal(a) < max_depth()))
        throw std::invalid_argument("transition_constants: need 0 < a < abar");

    TransitionReport rep;
    rep.a = a;
    rep.lambda_c_a = lambda_c_of_depth(a);
    double F = renewal_->free_energy(rep.lambda_c_a);
    double Fp = renewal_->free_energy_deriv(rep.lambda_c_a);

    auto [lmin, lplu] = saturation_points();
    double term = 0.0;
    if (ExtReal(rep.lambda_c_a) < lmin)
        term += 1.0 / rate_minus_.slope_at_level(F);
    if (ExtReal(rep.lambda_c_a) < lplu)
        term += 1.0 / rate_plus_.slope_at_level(F);
    rep.C_a = Fp * (1.0 - a * term);

    double kap = renewal_->kappa();
    double c3 = 0.5 * std::pow(kap, 4) / std::pow(1.0 - kap, 2);
    rep.small_a_prediction = std::sqrt(8.0 * c3) * a;

    rep.has_saturation = lmin.is_finite() || lplu.is_finite();
    if (!rep.has_saturation) return rep;

    rep.symmetric_case = lmin.is_finite() && lplu.is_finite() && lmin == lplu;
    double rho_m = rate_minus_.rho().as_double();
    double rho_p = rate_plus_.rho().as_double();
    if (rep.symmetric_case) {
        double lam = lmin.value();
        double Fp_l = renewal_->free_energy_deriv(lam);
        double Fl = renewal_->free_energy(lam);
        double t0sum = rate_minus_.t0().value() + rate_plus_.t0().value();
        double combo = 1.0 / rho_m + 1.0 / rho_p;
        rep.f_excess_slope_minus = rep.f_excess_slope_plus = a * Fp_l * combo;
        rep.ac_excess_slope_minus = rep.ac_excess_slope_plus =
            Fl * Fp_l / (t0sum * t0sum) * combo;
    } else {
        if (lmin.is_finite()) {
            double lam = lmin.value();
            double Fp_l = renewal_->free_energy_deriv(lam);
            double Fl = renewal_->free_energy(lam);
            double d = rate_plus_.lambda_inverse(Fl) + rate_minus_.t0().value();
            rep.f_excess_slope_minus = a * Fp_l / rho_m;
            rep.ac_excess_slope_minus = Fl * Fp_l / (d * d * rho_m);
        }
        if (lplu.is_finite()) {
            double lam = lplu.value();
            double Fp_l = renewal_->free_energy_deriv(lam);
            double Fl = renewal_->free_energy(lam);
            double t0sum = rate_minus_.t0().value() + rate_plus_.t0().value();
            rep.f_excess_slope_plus = a * Fp_l / rho_p;
            rep.ac_excess_slope_plus = Fl * Fp_l / (t0sum * t0sum * rho_p);
        }
    }
    return rep;
}

std::vector<PhaseDiagramRow> WellModel::phase_diagram(
    const std::vector<double>& lambda_grid) const {
    std::vector<PhaseDiagramRow> rows(lambda_grid.size());
    parallel_for(lambda_grid.size(), [&](std::size_t i) {
        PhaseDiagramRow r;
        r.lambda = lambda_grid[i];
        r.flat_free_energy = renewal_->free_energy(r.lambda);
        r.a_c = critical_depth(r.lambda).a_c;
        rows[i] = r;
    });
    return rows;
}

}  // namespace wetting
