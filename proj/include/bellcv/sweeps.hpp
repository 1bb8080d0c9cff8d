#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bellcv/bell.hpp"
#include "bellcv/optimal.hpp"
#include "bellcv/states.hpp"

namespace bellcv {

// Grid description for N-sweeps; parsed from the CLI's JSON sweep files.
struct SweepSpec {
    InequalityFamily family = InequalityFamily::CFRD;
    std::string state = "ghz";  // ghz | extended_cluster | extended_superposition
    int n_min = 2;
    int n_max = 14;
    std::string r_rule = "half";  // half | half_down | half_up | fixed | all
    int r_fixed = 0;
    std::vector<double> eta_grid{1.0};
    std::vector<double> p_grid{1.0};
    std::string function = "identity";  // function grammar; rational(auto) allowed

    static SweepSpec from_json(const std::string& text);
};

struct SweepRow {
    InequalityFamily family;
    int n;
    int r;
    double eta;
    double p;
    std::string function;
    double lhs;
    double rhs;
    double bell;
    bool violated;
};

// One point of a violation boundary: bell(eta_crit, p_crit) = 1.
struct BoundaryPoint {
    int n;
    double eta_crit;
    double p_crit;
    double bell_at_point;
};

// Bell value of the generalized GHZ configuration on the (eta, purity)
// surface; function text follows the CLI grammar, rational(auto) resolves per
// parity. The noise parameter follows the per-site convention of the
// closed-form surfaces throughout the sweep layer.
double bell_surface(InequalityFamily family, int n, int r, double eta, double purity,
                    const std::string& function);

// Smallest efficiency violating the inequality at the given purity, by
// bisection to |bell - 1| < 1e-8, or nullopt when bell(eta=1) <= 1.
std::optional<double> critical_efficiency(InequalityFamily family, int n, int r,
                                          double purity, const std::string& function);

// Largest admissible noise at the given efficiency: p_crit with bell = 1.
std::optional<double> critical_purity(InequalityFamily family, int n, int r, double eta,
                                      const std::string& function);

// Boundary p_crit(eta) over an efficiency grid; unsolvable grid points are
// skipped.
std::vector<BoundaryPoint> noise_boundary(InequalityFamily family, int n, int r,
                                          std::vector<double> eta_grid,
                                          const std::string& function);

// Bell values over the spec's N range. GHZ rows on the noise surface use the
// closed forms; extended states evaluate through the kernel engine.
std::vector<SweepRow> sweep_N(const SweepSpec& spec);

// Compare every moment entering the plan's Bell result against direct grid
// integration of the joint probability. Returns the largest absolute
// deviation; throws if it exceeds 1e-6.
double oracle_crosscheck(const DensityOperator& rho, const MeasurementPlan& plan,
                         int points_per_axis = 201);

}  // namespace bellcv
