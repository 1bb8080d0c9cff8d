#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bellcv/functions.hpp"
#include "bellcv/quadrature.hpp"
#include "bellcv/states.hpp"

namespace bellcv {

enum class InequalityFamily { CFRD, Functional, MABK, SV4, SV8 };

std::string family_name(InequalityFamily f);
InequalityFamily family_from_name(const std::string& name);

// Outcome of one inequality evaluation. For the ratio-type inequalities
// bell = lhs/rhs; for the binned inequality bell = |S_N| with lhs = S_N and
// rhs = 1. re/im carry the complex product moment; s_sqrt the
// sqrt(Re^2 + Im^2) variant of the binned statistic.
struct BellResult {
    InequalityFamily family;
    double lhs = 0.0;
    double rhs = 0.0;
    double bell = 0.0;
    bool violated = false;
    double re = 0.0;
    double im = 0.0;
    double s_sqrt = 0.0;
};

// Two-setting plan: per-site measured function pair with angles and the
// conjugation sign entering F = f + i s g.
struct MeasurementPlan {
    InequalityFamily family = InequalityFamily::CFRD;
    std::vector<SiteObservablePair> sites;
};

// Four- or eight-setting plan for the hypercomplex inequalities.
struct SvPlan {
    int settings = 4;                              // 4 or 8
    double m = 1.0 / 3.0;                          // fractional power
    std::vector<std::vector<double>> angles;       // [site][setting]
};

BellResult eval_cfrd(const DensityOperator& rho, const MeasurementPlan& plan);
BellResult eval_functional(const DensityOperator& rho, const MeasurementPlan& plan);
BellResult eval_mabk(const DensityOperator& rho, const MeasurementPlan& plan);
BellResult eval_sv(const DensityOperator& rho, const SvPlan& plan);

enum class AnglePreset { Orthogonal, RotatedMabk, CfrdPhaseFamily };

AnglePreset preset_from_name(const std::string& name);

// Per-site (theta, theta') patterns for the generalized GHZ configuration.
struct PresetAngles {
    std::vector<double> theta;
    std::vector<double> theta_prime;
};
PresetAngles preset_angles(AnglePreset kind, int n_sites, int r);

// Assemble a two-setting plan from a preset with one function for f and g.
MeasurementPlan make_plan(InequalityFamily family, AnglePreset kind, int n_sites, int r,
                          const FunctionSpec& func);

// Plan whose conjugation pattern annihilates every basis flip except the one
// connecting the two given products (used for states beyond the GHZ family).
MeasurementPlan make_plan_for_flip(InequalityFamily family, const BasisProduct& from,
                                   const BasisProduct& to, const FunctionSpec& func);

// Derivative-free pattern search over the plan's angles, step halving from
// pi/4 down to 1e-5. Never returns a plan worse than the input.
std::pair<MeasurementPlan, BellResult> optimize_angles(const DensityOperator& rho,
                                                       const MeasurementPlan& init);
std::pair<SvPlan, BellResult> optimize_angles(const DensityOperator& rho, const SvPlan& init);

// Product of hypercomplex basis units e_a e_b = sign * e_unit for the
// quaternion (dim 4) and octonion (dim 8) algebras; index 0 is the real unit.
struct HyperUnit {
    int unit;
    int sign;
};
HyperUnit hyper_mul(int a, int b, int dim);

}  // namespace bellcv
