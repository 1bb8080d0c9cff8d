#include "bellcv/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "bellcv/channels.hpp"
#include "bellcv/quadrature.hpp"

namespace bellcv {

namespace {

constexpr double kBoundaryTol = 1e-8;

// Resolve the CLI function grammar, allowing rational(auto) per parity.
FunctionSpec resolve_function(const std::string& text, int n) {
    if (text == "rational(auto)") {
        if (n % 2 == 0) return FunctionSpec::rational(solve_epsilon_even());
        return FunctionSpec::rational(solve_epsilon_odd(n));
    }
    return FunctionSpec::parse(text);
}

int resolve_r(const std::string& rule, int n, int r_fixed) {
    if (rule == "half") return n / 2;
    if (rule == "half_down") return (n - 1) / 2;
    if (rule == "half_up") return (n + 1) / 2;
    if (rule == "fixed") return r_fixed;
    throw std::invalid_argument("unknown r rule: " + rule);
}

}  // namespace

SweepSpec SweepSpec::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    SweepSpec spec;
    if (j.contains("family")) spec.family = family_from_name(j["family"].get<std::string>());
    if (j.contains("state")) spec.state = j["state"].get<std::string>();
    if (j.contains("n_min")) spec.n_min = j["n_min"].get<int>();
    if (j.contains("n_max")) spec.n_max = j["n_max"].get<int>();
    if (j.contains("r_rule")) spec.r_rule = j["r_rule"].get<std::string>();
    if (j.contains("r_fixed")) spec.r_fixed = j["r_fixed"].get<int>();
    if (j.contains("eta")) spec.eta_grid = j["eta"].get<std::vector<double>>();
    if (j.contains("p")) spec.p_grid = j["p"].get<std::vector<double>>();
    if (j.contains("function")) spec.function = j["function"].get<std::string>();
    if (spec.n_min < 2 || spec.n_max < spec.n_min)
        throw std::invalid_argument("sweep spec: need 2 <= n_min <= n_max");
    for (auto* grid : {&spec.eta_grid, &spec.p_grid})
        if (!std::is_sorted(grid->begin(), grid->end()))
            throw std::invalid_argument("sweep spec: grids must be monotone");
    return spec;
}

double bell_surface(InequalityFamily family, int n, int r, double eta, double purity,
                    const std::string& function) {
    switch (family) {
        case InequalityFamily::CFRD:
            return functional_bell_ghz(n, r, FunctionSpec::identity(), eta, purity);
        case InequalityFamily::Functional: {
            if (function == "rational(auto)") {
                if (n % 2 == 0 || eta < 1.0) return functional_bell_optimal(n, eta, purity);
                return functional_bell_ghz(n, r, FunctionSpec::rational(solve_epsilon_odd(n)),
                                           eta, purity);
            }
            return functional_bell_ghz(n, r, resolve_function(function, n), eta, purity);
        }
        case InequalityFamily::MABK: {
            const FunctionSpec f =
                function == "rational(auto)" || function == "identity"
                    ? FunctionSpec::sign_bin()
                    : resolve_function(function, n);
            return mabk_surface(n, eta, purity, f);
        }
        default:
            throw std::invalid_argument("bell_surface: unsupported family");
    }
}

namespace {

std::optional<double> bisect_for_one(const std::function<double(double)>& bell, double lo,
                                     double hi) {
    double bhi = bell(hi);
    if (bhi <= 1.0) return std::nullopt;
    double blo = bell(lo);
    if (blo > 1.0) return lo;  // already violating at the lower edge
    while (true) {
        const double mid = 0.5 * (lo + hi);
        const double bm = bell(mid);
        if (std::abs(bm - 1.0) < kBoundaryTol || hi - lo < 1e-14) return mid;
        if (bm > 1.0)
            hi = mid;
        else
            lo = mid;
    }
}

}  // namespace

std::optional<double> critical_efficiency(InequalityFamily family, int n, int r,
                                          double purity, const std::string& function) {
    return bisect_for_one(
        [&](double eta) { return bell_surface(family, n, r, eta, purity, function); }, 1e-6,
        1.0);
}

std::optional<double> critical_purity(InequalityFamily family, int n, int r, double eta,
                                      const std::string& function) {
    return bisect_for_one(
        [&](double p) { return bell_surface(family, n, r, eta, p, function); }, 1e-6, 1.0);
}

std::vector<BoundaryPoint> noise_boundary(InequalityFamily family, int n, int r,
                                          std::vector<double> eta_grid,
                                          const std::string& function) {
    std::vector<BoundaryPoint> out;
    for (double eta : eta_grid) {
        auto p = critical_purity(family, n, r, eta, function);
        if (!p) continue;
        const double bell = bell_surface(family, n, r, eta, *p, function);
        out.push_back({n, eta, *p, bell});
    }
    return out;
}

namespace {

// Engine evaluation for the extended states (lossless rows).
SweepRow extended_row(const SweepSpec& spec, int n) {
    PureState state = spec.state == "extended_cluster"
                          ? make_extended_cluster(n / 2)  // n counts modes
                          : make_extended_superposition(n);
    const auto rho = to_density(state);
    const int modes = rho.mode_count();

    SweepRow row;
    row.family = spec.family;
    row.n = modes;
    row.r = modes / 2;
    row.eta = 1.0;
    row.p = 1.0;

    if (spec.family == InequalityFamily::CFRD) {
        // Conjugation pattern locked to the symmetric flip pair.
        BasisProduct from(modes, 0), to(modes, 0);
        for (int i = 0; i < modes / 2; ++i) from[i] = 1;
        for (int i = modes / 2; i < modes; ++i) to[i] = 1;
        auto plan = make_plan_for_flip(InequalityFamily::CFRD, from, to,
                                       FunctionSpec::identity());
        const auto res = eval_cfrd(rho, plan);
        row.function = "identity";
        row.lhs = res.lhs;
        row.rhs = res.rhs;
        row.bell = res.bell;
        row.violated = res.violated;
        return row;
    }
    if (spec.family == InequalityFamily::MABK) {
        auto plan = make_plan(InequalityFamily::MABK, AnglePreset::RotatedMabk, modes,
                              modes / 2, FunctionSpec::sign_bin());
        const auto res = eval_mabk(rho, plan);
        row.function = "bin";
        row.lhs = res.lhs;
        row.rhs = res.rhs;
        row.bell = res.bell;
        row.violated = res.violated;
        return row;
    }
    throw std::invalid_argument("sweep: extended states support cfrd and mabk only");
}

}  // namespace

std::vector<SweepRow> sweep_N(const SweepSpec& spec) {
    std::vector<SweepRow> rows;
    for (int n = spec.n_min; n <= spec.n_max; ++n) {
        if (spec.state != "ghz") {
            if (n % 2 != 0) continue;
            if (spec.state == "extended_cluster" && (n / 2 < 4 || (n / 2) % 2 != 0)) continue;
            rows.push_back(extended_row(spec, n));
            continue;
        }
        std::vector<int> r_values;
        if (spec.r_rule == "all") {
            for (int r = 0; r <= n; ++r) r_values.push_back(r);
        } else {
            r_values.push_back(resolve_r(spec.r_rule, n, spec.r_fixed));
        }
        for (int r : r_values) {
            for (double eta : spec.eta_grid) {
                for (double p : spec.p_grid) {
                    SweepRow row;
                    row.family = spec.family;
                    row.n = n;
                    row.r = r;
                    row.eta = eta;
                    row.p = p;
                    row.function = spec.function;
                    row.bell = bell_surface(spec.family, n, r, eta, p, spec.function);
                    if (spec.family == InequalityFamily::MABK) {
                        row.lhs = row.bell;
                        row.rhs = 1.0;
                    } else {
                        // Recover the ratio's pieces from the closed form.
                        const FunctionSpec f =
                            spec.family == InequalityFamily::CFRD
                                ? FunctionSpec::identity()
                                : resolve_function(spec.function, n);
                        const auto I = compute_I(f);
                        const int N = n;
                        const double sum = std::pow(I.i_plus, N) + std::pow(I.i_minus, N);
                        row.lhs = 0.25 * std::pow(2.0 / std::numbers::pi, N) *
                                  std::pow(eta * p, N) * sum * sum;
                        row.rhs = row.bell > 0.0 ? row.lhs / row.bell : 0.0;
                    }
                    row.violated = row.bell > 1.0 + 1e-12;
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

double oracle_crosscheck(const DensityOperator& rho, const MeasurementPlan& plan,
                         int points_per_axis) {
    const int n = rho.mode_count();
    if (n > 3) throw std::invalid_argument("oracle_crosscheck: only N <= 3 is supported");
    if (static_cast<int>(plan.sites.size()) != n)
        throw std::invalid_argument("oracle_crosscheck: plan size mismatch");

    double max_dev = 0.0;

    // Normalization of the joint probability at the f angles.
    {
        std::vector<GridAxis> axes;
        for (const auto& s : plan.sites)
            axes.push_back({[](double) { return 1.0; }, {}, s.f_obs.angle});
        max_dev = std::max(max_dev, std::abs(grid_moment(rho, axes, points_per_axis) - 1.0));
    }

    // Every mixed f/g moment entering the product, and its squared partner
    // entering the denominator.
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<ModeObservable> obs;
        std::vector<GridAxis> axes, axes_sq;
        for (int i = 0; i < n; ++i) {
            const auto& site = plan.sites[i];
            const ModeObservable& o = (mask >> i) & 1 ? site.g_obs : site.f_obs;
            obs.push_back(o);
            FunctionSpec f = o.func;
            axes.push_back({[f](double x) { return f(x); }, f.breakpoints(), o.angle});
            axes_sq.push_back({[f](double x) {
                                   const double v = f(x);
                                   return v * v;
                               },
                               f.breakpoints(), o.angle});
        }
        const double engine = correlate_hermitian(rho, obs);
        const double grid = grid_moment(rho, axes, points_per_axis);
        max_dev = std::max(max_dev, std::abs(engine - grid));

        const double engine_sq = correlate_hermitian_squared(rho, obs);
        const double grid_sq = grid_moment(rho, axes_sq, points_per_axis);
        max_dev = std::max(max_dev, std::abs(engine_sq - grid_sq));
    }

    if (max_dev > 1e-6)
        throw std::runtime_error("oracle_crosscheck: deviation above 1e-6");
    return max_dev;
}

}  // namespace bellcv
