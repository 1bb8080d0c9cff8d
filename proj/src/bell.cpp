#include "bellcv/bell.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellcv {

namespace {
constexpr double kViolationMargin = 1e-12;
const double kPi = std::numbers::pi;
}  // namespace

std::string family_name(InequalityFamily f) {
    switch (f) {
        case InequalityFamily::CFRD: return "cfrd";
        case InequalityFamily::Functional: return "functional";
        case InequalityFamily::MABK: return "mabk";
        case InequalityFamily::SV4: return "sv4";
        case InequalityFamily::SV8: return "sv8";
    }
    return "?";
}

InequalityFamily family_from_name(const std::string& name) {
    if (name == "cfrd") return InequalityFamily::CFRD;
    if (name == "functional") return InequalityFamily::Functional;
    if (name == "mabk") return InequalityFamily::MABK;
    if (name == "sv4") return InequalityFamily::SV4;
    if (name == "sv8") return InequalityFamily::SV8;
    throw std::invalid_argument("unknown inequality family: " + name);
}

// ---------------------------------------------------------------------------
// Ratio-type evaluators

namespace {

BellResult eval_moment_ratio(const DensityOperator& rho, const MeasurementPlan& plan,
                             InequalityFamily family) {
    const cplx product = correlate_complex(rho, plan.sites);
    const double lhs = std::norm(product);
    const double rhs = correlate_squared_sum(rho, plan.sites);
    if (!(rhs > 0.0))
        throw std::runtime_error("inequality denominator is not positive");
    BellResult out;
    out.family = family;
    out.lhs = lhs;
    out.rhs = rhs;
    out.bell = lhs / rhs;
    out.violated = out.bell > 1.0 + kViolationMargin;
    out.re = product.real();
    out.im = product.imag();
    return out;
}

}  // namespace

BellResult eval_cfrd(const DensityOperator& rho, const MeasurementPlan& plan) {
    for (const auto& s : plan.sites) {
        if (s.f_obs.func.family() != FunctionFamily::Identity ||
            s.g_obs.func.family() != FunctionFamily::Identity)
            throw std::invalid_argument("eval_cfrd: plan must use identity functions");
    }
    return eval_moment_ratio(rho, plan, InequalityFamily::CFRD);
}

BellResult eval_functional(const DensityOperator& rho, const MeasurementPlan& plan) {
    return eval_moment_ratio(rho, plan, InequalityFamily::Functional);
}

BellResult eval_mabk(const DensityOperator& rho, const MeasurementPlan& plan) {
    for (const auto& s : plan.sites) {
        for (const auto& fn : {s.f_obs.func, s.g_obs.func}) {
            const auto fam = fn.family();
            if (fam != FunctionFamily::SignBin && fam != FunctionFamily::TripleBin &&
                fam != FunctionFamily::TanhPow)
                throw std::invalid_argument(
                    "eval_mabk: outcomes must be bounded (bin, triplebin or tanh)");
        }
    }
    const int n = rho.mode_count();
    const cplx product = correlate_complex(rho, plan.sites);
    const double re = product.real(), im = product.imag();

    BellResult out;
    out.family = InequalityFamily::MABK;
    out.re = re;
    out.im = im;
    if (n % 2 == 0) {
        const double scale = std::pow(2.0, -0.5 * n);
        out.bell = scale * std::max(std::abs(re + im), std::abs(re - im));
    } else {
        const double scale = std::pow(2.0, -0.5 * (n - 1));
        out.bell = scale * std::max(std::abs(re), std::abs(im));
    }
    out.s_sqrt = std::pow(2.0, -0.5 * (n - 1)) * std::hypot(re, im);
    out.lhs = out.bell;
    out.rhs = 1.0;
    out.violated = out.bell > 1.0 + kViolationMargin;
    return out;
}

// ---------------------------------------------------------------------------
// Hypercomplex algebra

namespace {

// Quaternionic triples of the octonion table: e_a e_b = e_c cyclically.
constexpr int kTriples[7][3] = {{1, 2, 3}, {1, 4, 5}, {2, 4, 6}, {3, 4, 7},
                                {2, 5, 7}, {3, 6, 5}, {1, 7, 6}};

struct HyperTable {
    int unit[8][8];
    int sign[8][8];
    HyperTable() {
        for (int a = 0; a < 8; ++a) {
            unit[0][a] = unit[a][0] = a;
            sign[0][a] = sign[a][0] = 1;
        }
        for (int a = 1; a < 8; ++a) {
            unit[a][a] = 0;
            sign[a][a] = -1;
        }
        for (const auto& t : kTriples) {
            const int a = t[0], b = t[1], c = t[2];
            auto set = [&](int x, int y, int z) {
                unit[x][y] = z;
                sign[x][y] = 1;
                unit[y][x] = z;
                sign[y][x] = -1;
            };
            set(a, b, c);
            set(b, c, a);
            set(c, a, b);
        }
    }
};

const HyperTable& hyper_table() {
    static HyperTable t;
    return t;
}

}  // namespace

HyperUnit hyper_mul(int a, int b, int dim) {
    if ((dim != 4 && dim != 8) || a < 0 || a >= dim || b < 0 || b >= dim)
        throw std::invalid_argument("hyper_mul: bad unit index or dimension");
    const auto& t = hyper_table();
    return {t.unit[a][b], t.sign[a][b]};
}

BellResult eval_sv(const DensityOperator& rho, const SvPlan& plan) {
    const int n = rho.mode_count();
    if (n != 2 && n != 4)
        throw std::invalid_argument("eval_sv: only 2 or 4 modes are supported");
    if (plan.settings != 4 && plan.settings != 8)
        throw std::invalid_argument("eval_sv: settings must be 4 or 8");
    if (!(plan.m > 0.0)) throw std::invalid_argument("eval_sv: power must be > 0");
    if (static_cast<int>(plan.angles.size()) != n)
        throw std::invalid_argument("eval_sv: angle matrix must have one row per site");
    for (const auto& row : plan.angles)
        if (static_cast<int>(row.size()) != plan.settings)
            throw std::invalid_argument("eval_sv: angle row length != settings");

    const int L = plan.settings;
    const auto& moments = kernel_moments(FunctionSpec::power(plan.m));
    const auto& terms = rho.terms();
    const int T = static_cast<int>(terms.size());

    // Per (term, site, setting) single-mode kernels of the odd power function.
    const double base = std::sqrt(2.0 / kPi);
    auto entry = [&](const DensityTerm& t, int site, int l) -> cplx {
        const int ket = t.ket[site], bra = t.bra[site];
        if (ket == 0 && bra == 0) return base * moments.m0;
        if (ket == 1 && bra == 1) return 4.0 * base * moments.m2;
        const double th = plan.angles[site][l];
        return 2.0 * base * moments.m1 * std::polar(1.0, bra == 0 ? -th : th);
    };
    std::vector<cplx> kern(static_cast<size_t>(T) * n * L);
    for (int t = 0; t < T; ++t)
        for (int s = 0; s < n; ++s)
            for (int l = 0; l < L; ++l)
                kern[(static_cast<size_t>(t) * n + s) * L + l] = entry(terms[t], s, l);

    // Left-to-right hypercomplex product over sites; components accumulate the
    // real N-site moments.
    std::vector<double> comp(L, 0.0);
    double imag_leak = 0.0;
    std::vector<int> idx(n, 0);
    while (true) {
        int unit = idx[0], sign = 1;
        for (int s = 1; s < n; ++s) {
            const auto u = hyper_mul(unit, idx[s], L);
            unit = u.unit;
            sign *= u.sign;
        }
        cplx moment = 0.0;
        for (int t = 0; t < T; ++t) {
            cplx prod = terms[t].weight;
            for (int s = 0; s < n && prod != cplx(0.0); ++s)
                prod *= kern[(static_cast<size_t>(t) * n + s) * L + idx[s]];
            moment += prod;
        }
        imag_leak = std::max(imag_leak, std::abs(moment.imag()));
        comp[unit] += sign * moment.real();

        int s = n - 1;
        while (s >= 0 && ++idx[s] == L) idx[s--] = 0;
        if (s < 0) break;
    }
    if (imag_leak > 1e-9)
        throw std::runtime_error("eval_sv: site moments are not real");

    double lhs = 0.0;
    for (double c : comp) lhs += c * c;

    // RHS: per site the sum over settings of |x|^{2m}; even in x, so only the
    // diagonal kernels survive and the angles drop out.
    const auto even = abs_power_moments(2.0 * plan.m);
    double rhs = 0.0;
    for (int t = 0; t < T; ++t) {
        if (terms[t].ket != terms[t].bra) continue;
        double prod = terms[t].weight.real();
        for (int s = 0; s < n; ++s)
            prod *= L * base * (terms[t].ket[s] == 0 ? even.m0 : 4.0 * even.m2);
        rhs += prod;
    }
    if (!(rhs > 0.0)) throw std::runtime_error("eval_sv: denominator is not positive");

    BellResult out;
    out.family = plan.settings == 4 ? InequalityFamily::SV4 : InequalityFamily::SV8;
    out.lhs = lhs;
    out.rhs = rhs;
    out.bell = lhs / rhs;
    out.violated = out.bell > 1.0 + kViolationMargin;
    return out;
}

// ---------------------------------------------------------------------------
// Angle presets

AnglePreset preset_from_name(const std::string& name) {
    if (name == "orthogonal") return AnglePreset::Orthogonal;
    if (name == "rotated_mabk") return AnglePreset::RotatedMabk;
    if (name == "cfrd_phase_family") return AnglePreset::CfrdPhaseFamily;
    throw std::invalid_argument("unknown angle preset: " + name);
}

PresetAngles preset_angles(AnglePreset kind, int n_sites, int r) {
    if (n_sites < 1 || r < 0 || r > n_sites)
        throw std::invalid_argument("preset_angles: need 0 <= r <= N");
    PresetAngles out;
    out.theta.resize(n_sites);
    out.theta_prime.resize(n_sites);
    const double half = kPi / 2.0;
    for (int i = 0; i < n_sites; ++i) {
        const int site = i + 1;  // 1-based in the angle patterns
        const bool head = site <= r;
        switch (kind) {
            case AnglePreset::Orthogonal:
                out.theta[i] = 0.0;
                out.theta_prime[i] = head ? -half : half;
                break;
            case AnglePreset::RotatedMabk: {
                const double mag = kPi * (site - 1) / (2.0 * n_sites);
                const double parity = (n_sites % 2 == 0) ? -1.0 : 1.0;  // (-1)^{N+1}
                out.theta[i] = head ? parity * mag : -parity * mag;
                out.theta_prime[i] = out.theta[i] + (head ? half : -half);
                break;
            }
            case AnglePreset::CfrdPhaseFamily: {
                const double mag = kPi * (site - 1) / (2.0 * n_sites);
                const double parity = (site % 2 == 0) ? -1.0 : 1.0;  // (-1)^{n+1}
                out.theta[i] = head ? parity * mag : -parity * mag;
                out.theta_prime[i] = out.theta[i] + (head ? half : -half);
                break;
            }
        }
    }
    return out;
}

MeasurementPlan make_plan(InequalityFamily family, AnglePreset kind, int n_sites, int r,
                          const FunctionSpec& func) {
    const auto preset = preset_angles(kind, n_sites, r);
    MeasurementPlan plan;
    plan.family = family;
    plan.sites.reserve(n_sites);
    for (int i = 0; i < n_sites; ++i)
        plan.sites.push_back({{func, preset.theta[i]}, {func, preset.theta_prime[i]}, +1});
    return plan;
}

MeasurementPlan make_plan_for_flip(InequalityFamily family, const BasisProduct& from,
                                   const BasisProduct& to, const FunctionSpec& func) {
    if (from.size() != to.size() || from.empty())
        throw std::invalid_argument("make_plan_for_flip: length mismatch");
    MeasurementPlan plan;
    plan.family = family;
    const double half = kPi / 2.0;
    for (size_t i = 0; i < from.size(); ++i) {
        if (from[i] == to[i])
            throw std::invalid_argument("make_plan_for_flip: products must differ everywhere");
        // from 1 -> 0: annihilation-type pairing; from 0 -> 1: creation-type.
        const double offset = from[i] == 1 ? half : -half;
        plan.sites.push_back({{func, 0.0}, {func, offset}, +1});
    }
    return plan;
}

// ---------------------------------------------------------------------------
// Pattern-search optimizer

namespace {

double compass_search(const std::function<double(std::vector<double>&)>& objective,
                      std::vector<double>& angles) {
    double best = objective(angles);
    for (double step = kPi / 4.0; step > 1e-5; step *= 0.5) {
        bool improved = true;
        while (improved) {
            improved = false;
            for (size_t i = 0; i < angles.size(); ++i) {
                for (double d : {step, -step}) {
                    angles[i] += d;
                    const double v = objective(angles);
                    if (v > best + 1e-15) {
                        best = v;
                        improved = true;
                        break;
                    }
                    angles[i] -= d;
                }
            }
        }
    }
    return best;
}

BellResult dispatch_eval(const DensityOperator& rho, const MeasurementPlan& plan) {
    switch (plan.family) {
        case InequalityFamily::CFRD: return eval_cfrd(rho, plan);
        case InequalityFamily::Functional: return eval_functional(rho, plan);
        case InequalityFamily::MABK: return eval_mabk(rho, plan);
        default:
            throw std::invalid_argument("optimize_angles: use the SvPlan overload");
    }
}

}  // namespace

std::pair<MeasurementPlan, BellResult> optimize_angles(const DensityOperator& rho,
                                                       const MeasurementPlan& init) {
    MeasurementPlan plan = init;
    std::vector<double> angles;
    for (const auto& s : plan.sites) {
        angles.push_back(s.f_obs.angle);
        angles.push_back(s.g_obs.angle);
    }
    auto objective = [&](std::vector<double>& a) {
        for (size_t i = 0; i < plan.sites.size(); ++i) {
            plan.sites[i].f_obs.angle = a[2 * i];
            plan.sites[i].g_obs.angle = a[2 * i + 1];
        }
        return dispatch_eval(rho, plan).bell;
    };
    compass_search(objective, angles);
    for (size_t i = 0; i < plan.sites.size(); ++i) {
        plan.sites[i].f_obs.angle = angles[2 * i];
        plan.sites[i].g_obs.angle = angles[2 * i + 1];
    }
    return {plan, dispatch_eval(rho, plan)};
}

std::pair<SvPlan, BellResult> optimize_angles(const DensityOperator& rho, const SvPlan& init) {
    SvPlan plan = init;
    std::vector<double> angles;
    for (const auto& row : plan.angles)
        for (double a : row) angles.push_back(a);
    auto objective = [&](std::vector<double>& a) {
        size_t k = 0;
        for (auto& row : plan.angles)
            for (double& v : row) v = a[k++];
        return eval_sv(rho, plan).bell;
    };
    compass_search(objective, angles);
    size_t k = 0;
    for (auto& row : plan.angles)
        for (double& v : row) v = angles[k++];
    return {plan, eval_sv(rho, plan)};
}

}  // namespace bellcv
