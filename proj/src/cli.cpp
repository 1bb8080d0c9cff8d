#include "bellcv/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bellcv/bell.hpp"
#include "bellcv/channels.hpp"
#include "bellcv/optimal.hpp"
#include "bellcv/quadrature.hpp"
#include "bellcv/sweeps.hpp"

namespace bellcv {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct StateArg {
    PureState state;
    int n = 0;
    int r = 0;  // r of the GHZ split; modes/2 for the named states
};

StateArg parse_state_impl(const std::string& text) {
    auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    if (kind == "ghz") {
        if (colon == std::string::npos)
            throw std::invalid_argument("state ghz needs N,r as in ghz:10,5");
        const std::string args = text.substr(colon + 1);
        const auto comma = args.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("state ghz needs N,r as in ghz:10,5");
        const int n = std::stoi(args.substr(0, comma));
        const int r = std::stoi(args.substr(comma + 1));
        const double amp = 1.0 / std::numbers::sqrt2;
        return {make_ghz(n, r, amp, amp), n, r};
    }
    int extent = 0;
    if (colon != std::string::npos) extent = std::stoi(text.substr(colon + 1));
    PureState st = make_named_state(kind, extent);
    return {st, st.mode_count(), st.mode_count() / 2};
}

FunctionSpec resolve_function_arg(const std::string& text, int n) {
    if (text == "rational(auto)") {
        if (n % 2 == 0) return FunctionSpec::rational(solve_epsilon_even());
        return FunctionSpec::rational(solve_epsilon_odd(n));
    }
    return FunctionSpec::parse(text);
}

nlohmann::ordered_json result_json(const BellResult& r) {
    nlohmann::ordered_json j;
    j["family"] = family_name(r.family);
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["bell"] = r.bell;
    j["violated"] = r.violated;
    j["re"] = r.re;
    j["im"] = r.im;
    if (r.family == InequalityFamily::MABK) j["s_sqrt"] = r.s_sqrt;
    return j;
}

const char* kRowHeader = "family,N,r,eta,p,function,lhs,rhs,bell,violated";

std::string row_csv(const SweepRow& row, char sep) {
    std::ostringstream ss;
    ss << family_name(row.family) << sep << row.n << sep << row.r << sep << num(row.eta)
       << sep << num(row.p) << sep << row.function << sep << num(row.lhs) << sep
       << num(row.rhs) << sep << num(row.bell) << sep << (row.violated ? "true" : "false");
    return ss.str();
}

void emit_rows(std::ostream& out, const std::vector<SweepRow>& rows,
               const std::string& format) {
    if (format == "json") {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& row : rows) {
            nlohmann::ordered_json j;
            j["family"] = family_name(row.family);
            j["N"] = row.n;
            j["r"] = row.r;
            j["eta"] = row.eta;
            j["p"] = row.p;
            j["function"] = row.function;
            j["lhs"] = row.lhs;
            j["rhs"] = row.rhs;
            j["bell"] = row.bell;
            j["violated"] = row.violated;
            arr.push_back(j);
        }
        out << arr.dump(2) << "\n";
        return;
    }
    const char sep = format == "tsv-plotdata" ? '\t' : ',';
    if (format == "tsv-plotdata") {
        std::string header = kRowHeader;
        for (auto& c : header)
            if (c == ',') c = '\t';
        out << "# " << header << "\n";
    } else {
        out << kRowHeader << "\n";
    }
    for (const auto& row : rows) out << row_csv(row, sep) << "\n";
}

std::unique_ptr<std::ofstream> open_out(const std::string& path) {
    if (path.empty()) return nullptr;
    auto f = std::make_unique<std::ofstream>(path);
    if (!*f) throw std::runtime_error("cannot open output file: " + path);
    return f;
}

// ---------------------------------------------------------------------------

struct EvalOptions {
    std::string family = "cfrd";
    std::string state;
    std::string state_file;
    std::string eta = "1";
    double purity = 1.0;
    std::string function = "identity";
    std::string angles = "preset";
    std::string format = "json";
    std::string conj_signs;
    bool verify = false;
    int oracle_grid = 201;
};

MeasurementPlan build_two_setting_plan(const EvalOptions& opt, InequalityFamily family,
                                       int n, int r) {
    const FunctionSpec func = family == InequalityFamily::CFRD
                                  ? FunctionSpec::identity()
                                  : resolve_function_arg(opt.function, n);
    AnglePreset preset = family == InequalityFamily::MABK ? AnglePreset::RotatedMabk
                                                          : AnglePreset::Orthogonal;
    if (opt.angles != "preset" && opt.angles != "optimize") {
        if (opt.angles.size() > 5 && opt.angles.substr(0, 5) == "file:") {
            auto j = nlohmann::json::parse(read_file(opt.angles.substr(5)));
            MeasurementPlan plan;
            plan.family = family;
            auto theta = j.at("theta").get<std::vector<double>>();
            auto theta_p = j.at("theta_prime").get<std::vector<double>>();
            if (static_cast<int>(theta.size()) != n || theta_p.size() != theta.size())
                throw std::invalid_argument("angle file does not match the mode count");
            for (int i = 0; i < n; ++i)
                plan.sites.push_back({{func, theta[i]}, {func, theta_p[i]}, +1});
            return plan;
        }
        preset = preset_from_name(opt.angles);
    }
    auto plan = make_plan(family, preset, n, r, func);
    if (family == InequalityFamily::MABK && func.family() == FunctionFamily::SignBin) {
        // nothing extra
    }
    if (!opt.conj_signs.empty()) {
        std::stringstream ss(opt.conj_signs);
        std::string tok;
        int i = 0;
        while (std::getline(ss, tok, ',') && i < n) {
            const int s = std::stoi(tok);
            if (s != 1 && s != -1) throw std::invalid_argument("conj signs must be +-1");
            plan.sites[i++].conj_sign = s;
        }
        if (i != n) throw std::invalid_argument("conj sign list does not match mode count");
    }
    return plan;
}

SvPlan build_sv_plan(const EvalOptions& opt, int n, int r, int settings) {
    SvPlan plan;
    plan.settings = settings;
    plan.m = 1.0 / 3.0;
    if (opt.function.rfind("power(", 0) == 0)
        plan.m = FunctionSpec::parse(opt.function).param1();
    plan.angles.assign(n, std::vector<double>(settings, 0.0));
    const double half = std::numbers::pi / 2.0;
    for (int i = 0; i < n; ++i)
        for (int l = 1; l < settings; ++l) plan.angles[i][l] = i < r ? -half : half;
    return plan;
}

BellResult run_eval(const EvalOptions& opt, std::ostream& out) {
    StateArg st = opt.state_file.empty()
                      ? parse_state_impl(opt.state)
                      : StateArg{PureState::from_json(read_file(opt.state_file)), 0, 0};
    if (!opt.state_file.empty()) {
        st.n = st.state.mode_count();
        st.r = st.n / 2;
    }
    DensityOperator rho = to_density(st.state);
    if (opt.purity < 1.0) rho = apply_decoherence_mix(rho, PuritySpec(opt.purity));
    const auto etas = parse_eta_arg(opt.eta);
    if (etas.size() == 1) {
        if (etas[0] < 1.0) rho = apply_loss(rho, LossSpec(etas[0]));
    } else {
        rho = apply_loss(rho, LossSpec(etas));
    }

    const auto family = family_from_name(opt.family);
    BellResult result;
    if (family == InequalityFamily::SV4 || family == InequalityFamily::SV8) {
        auto plan = build_sv_plan(opt, st.n, st.r, family == InequalityFamily::SV4 ? 4 : 8);
        if (opt.angles == "optimize") {
            auto [best, res] = optimize_angles(rho, plan);
            result = res;
        } else {
            result = eval_sv(rho, plan);
        }
    } else {
        auto plan = build_two_setting_plan(opt, family, st.n, st.r);
        if (opt.verify && st.n <= 3) oracle_crosscheck(rho, plan, opt.oracle_grid);
        if (opt.angles == "optimize") {
            auto [best, res] = optimize_angles(rho, plan);
            result = res;
        } else {
            result = family == InequalityFamily::CFRD      ? eval_cfrd(rho, plan)
                     : family == InequalityFamily::MABK    ? eval_mabk(rho, plan)
                                                           : eval_functional(rho, plan);
        }
    }

    if (opt.format == "json") {
        out << result_json(result).dump(2) << "\n";
    } else {
        SweepRow row{family, st.n,       st.r,       etas[0],    opt.purity,
                     opt.function, result.lhs, result.rhs, result.bell, result.violated};
        emit_rows(out, {row}, opt.format);
    }
    return result;
}

// ---------------------------------------------------------------------------
// reproduce datasets

std::vector<double> linspace(double a, double b, int count) {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(a + (b - a) * i / (count - 1));
    return out;
}

void check_close(double a, double b, double tol, const char* what) {
    if (std::abs(a - b) > tol)
        throw std::runtime_error(std::string("reproduce: invariant failed: ") + what);
}

std::vector<SweepRow> reproduce_dataset(const std::string& name) {
    std::vector<SweepRow> rows;
    if (name == "fig-r-sweep") {
        SweepSpec spec;
        spec.family = InequalityFamily::CFRD;
        spec.n_min = 10;
        spec.n_max = 14;
        spec.r_rule = "all";
        rows = sweep_N(spec);
        for (const auto& row : rows)
            check_close(row.bell, functional_bell_ghz(row.n, row.r, FunctionSpec::identity()),
                        1e-10, "r-sweep closed form");
        return rows;
    }
    if (name == "fig-mabk-N") {
        for (const std::string fn : {"bin", "triplebin(0.11)", "tanh(4,1.4)"}) {
            SweepSpec spec;
            spec.family = InequalityFamily::MABK;
            spec.n_min = 2;
            spec.n_max = 14;
            spec.function = fn;
            auto part = sweep_N(spec);
            rows.insert(rows.end(), part.begin(), part.end());
        }
        for (const auto& row : rows)
            if (row.function == "bin")
                check_close(row.bell,
                            0.5 * std::numbers::sqrt2 *
                                std::pow(4.0 / std::numbers::pi, 0.5 * row.n),
                            1e-9, "binned closed form");
        return rows;
    }
    if (name == "fig-functional-N") {
        for (const std::string fn : {"rational(auto)", "identity"}) {
            SweepSpec spec;
            spec.family = fn == "identity" ? InequalityFamily::CFRD
                                           : InequalityFamily::Functional;
            spec.n_min = 4;
            spec.n_max = 14;
            spec.function = fn;
            auto part = sweep_N(spec);
            rows.insert(rows.end(), part.begin(), part.end());
        }
        return rows;
    }
    if (name == "fig-mabk-boundary" || name == "fig-functional-boundary") {
        const bool mabk = name == "fig-mabk-boundary";
        const auto family = mabk ? InequalityFamily::MABK : InequalityFamily::Functional;
        const std::string fn = mabk ? "bin" : "rational(auto)";
        const std::vector<int> ns = mabk ? std::vector<int>{3, 4, 5, 6, 10}
                                         : std::vector<int>{6, 8, 10, 20, 40};
        for (int n : ns) {
            auto pts = noise_boundary(family, n, n / 2, linspace(0.65, 1.0, 71), fn);
            for (const auto& pt : pts) {
                if (mabk)
                    check_close(pt.eta_crit * pt.p_crit * pt.p_crit, mabk_eta_min(n), 1e-6,
                                "mabk boundary relation");
                check_close(pt.bell_at_point, 1.0, 1e-6, "boundary bell value");
                SweepRow row{family, n, n / 2, pt.eta_crit, pt.p_crit,
                             fn,     0, 0,     pt.bell_at_point, false};
                row.lhs = pt.p_crit;          // purity reading
                row.rhs = 1.0 - pt.p_crit;    // noise reading of the same point
                rows.push_back(row);
            }
        }
        return rows;
    }
    throw std::invalid_argument("unknown reproduce dataset: " + name);
}

}  // namespace

PureState parse_state_arg(const std::string& text) { return parse_state_impl(text).state; }

std::vector<double> parse_eta_arg(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw std::invalid_argument("empty eta list");
    for (double e : out)
        if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
    return out;
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"continuous-variable Bell inequality toolkit"};
    app.require_subcommand(1);

    kernel_cache_load_env();

    EvalOptions opt;
    std::string out_path, format = "json", spec_path, dataset, parity = "even";
    int modes = 0;
    double at_eta = -1.0;

    auto* eval = app.add_subcommand("eval", "evaluate one inequality");
    eval->add_option("--family", opt.family, "cfrd|functional|mabk|sv4|sv8");
    eval->add_option("--state", opt.state, "ghz:N,r | cluster4 | w4 | extended_cluster:N | "
                                           "extended_superposition:N");
    eval->add_option("--state-file", opt.state_file, "JSON state file");
    eval->add_option("--eta", opt.eta, "efficiency, single value or per-mode csv");
    eval->add_option("--purity", opt.purity, "purity p of the decoherence mixture");
    eval->add_option("--function", opt.function, "measured function, e.g. rational(auto)");
    eval->add_option("--angles", opt.angles,
                     "preset | orthogonal | rotated_mabk | cfrd_phase_family | optimize | "
                     "file:PATH");
    eval->add_option("--conj-signs", opt.conj_signs, "per-site +-1 list");
    eval->add_option("--format", opt.format, "json|csv|tsv-plotdata");
    eval->add_flag("--verify", opt.verify, "run the grid oracle before reporting (N <= 3)");
    eval->add_option("--oracle-grid", opt.oracle_grid, "oracle points per axis");

    auto* sweep = app.add_subcommand("sweep", "sweep N / eta / p grids");
    sweep->add_option("--spec", spec_path, "JSON sweep spec")->required();
    sweep->add_option("--out", out_path, "output path (default stdout)");
    sweep->add_option("--format", format, "json|csv|tsv-plotdata");

    auto* threshold = app.add_subcommand("threshold", "critical efficiency or purity");
    threshold->add_option("--family", opt.family);
    threshold->add_option("--state", opt.state)->required();
    threshold->add_option("--purity", opt.purity, "fixed purity when solving for eta");
    threshold->add_option("--at-eta", at_eta, "solve for p_crit at this efficiency");
    threshold->add_option("--function", opt.function);

    auto* solve = app.add_subcommand("solve-epsilon", "optimal rational parameter");
    solve->add_option("--parity", parity, "even|odd");
    solve->add_option("--modes", modes, "mode count (odd parity)");

    auto* crosscheck = app.add_subcommand("crosscheck", "grid-oracle comparison (N <= 3)");
    crosscheck->add_option("--family", opt.family);
    crosscheck->add_option("--state", opt.state)->required();
    crosscheck->add_option("--eta", opt.eta);
    crosscheck->add_option("--purity", opt.purity);
    crosscheck->add_option("--function", opt.function);
    crosscheck->add_option("--angles", opt.angles);
    crosscheck->add_option("--oracle-grid", opt.oracle_grid);

    auto* reproduce = app.add_subcommand("reproduce", "emit a figure dataset");
    reproduce->add_option("dataset", dataset,
                          "fig-r-sweep | fig-mabk-N | fig-functional-N | fig-mabk-boundary "
                          "| fig-functional-boundary")
        ->required();
    reproduce->add_option("--out", out_path, "output path (default stdout)");
    reproduce->add_option("--format", format, "json|csv|tsv-plotdata");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            app.exit(e);
            return 0;
        }
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        auto file = open_out(out_path);
        std::ostream& out = file ? *file : std::cout;

        if (*eval) {
            run_eval(opt, out);
        } else if (*sweep) {
            auto spec = SweepSpec::from_json(read_file(spec_path));
            emit_rows(out, sweep_N(spec), format);
        } else if (*threshold) {
            const auto st = parse_state_impl(opt.state);
            const auto family = family_from_name(opt.family);
            const std::string fn = opt.function == "identity" &&
                                           family == InequalityFamily::Functional
                                       ? "rational(auto)"
                                       : opt.function;
            nlohmann::ordered_json j;
            j["family"] = family_name(family);
            j["N"] = st.n;
            j["r"] = st.r;
            if (at_eta >= 0.0) {
                auto p = critical_purity(family, st.n, st.r, at_eta, fn);
                j["eta"] = at_eta;
                j["p_crit"] = p ? nlohmann::ordered_json(*p) : nlohmann::ordered_json();
                if (p) j["noise_max"] = 1.0 - *p;
            } else {
                auto eta = critical_efficiency(family, st.n, st.r, opt.purity, fn);
                j["purity"] = opt.purity;
                j["eta_crit"] = eta ? nlohmann::ordered_json(*eta) : nlohmann::ordered_json();
            }
            out << j.dump(2) << "\n";
        } else if (*solve) {
            nlohmann::ordered_json j;
            if (parity == "even") {
                j["parity"] = "even";
                j["epsilon"] = solve_epsilon_even();
            } else if (parity == "odd") {
                if (modes < 3) throw std::invalid_argument("odd parity needs --modes");
                j["parity"] = "odd";
                j["modes"] = modes;
                j["epsilon"] = solve_epsilon_odd(modes);
            } else {
                throw std::invalid_argument("parity must be even or odd");
            }
            out << j.dump(2) << "\n";
        } else if (*crosscheck) {
            const auto st = parse_state_impl(opt.state);
            DensityOperator rho = to_density(st.state);
            if (opt.purity < 1.0) rho = apply_decoherence_mix(rho, PuritySpec(opt.purity));
            const auto etas = parse_eta_arg(opt.eta);
            if (etas.size() > 1 || etas[0] < 1.0)
                rho = apply_loss(rho, etas.size() == 1 ? LossSpec(etas[0]) : LossSpec(etas));
            const auto family = family_from_name(opt.family);
            auto plan = build_two_setting_plan(opt, family, st.n, st.r);
            nlohmann::ordered_json j;
            j["max_deviation"] = oracle_crosscheck(rho, plan, opt.oracle_grid);
            j["oracle_grid"] = opt.oracle_grid;
            out << j.dump(2) << "\n";
        } else if (*reproduce) {
            emit_rows(out, reproduce_dataset(dataset), format == "json" ? "json" : format);
        }
        kernel_cache_save_env();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace bellcv
