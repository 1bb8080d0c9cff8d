#include "bellcv/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include <json.hpp>

namespace bellcv {

namespace {

// Tails are cut where e^{-2x^2} drops below 1e-18.
const double kCutoff = std::sqrt(-std::log(1e-18) / 2.0);
constexpr double kTol = 1e-13;
constexpr int kMaxDepth = 52;

// 15-point Gauss-Legendre rule on [-1, 1].
constexpr int kGL = 15;
constexpr double kGLx[kGL] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kGLw[kGL] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719,
    0.1395706779261543, 0.1662692058169939, 0.1861610000155622,
    0.1984314853271116, 0.2025782419255613, 0.1984314853271116,
    0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

double gl15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < kGL; ++i) sum += kGLw[i] * f(c + hw * kGLx[i]);
    return hw * sum;
}

double adapt(const std::function<double(double)>& f, double a, double b, double whole,
             double tol, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gl15(f, a, mid);
    const double right = gl15(f, mid, b);
    const double delta = left + right - whole;
    if (std::abs(delta) < tol) return left + right;
    if (depth >= kMaxDepth)
        throw QuadratureError("integrate_1d: no convergence after max refinement depth");
    return adapt(f, a, mid, left, 0.5 * tol, depth + 1) +
           adapt(f, mid, b, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate_1d(const std::function<double(double)>& h, int moment_order,
                    std::span<const double> breakpoints) {
    if (moment_order < 0 || moment_order > 2)
        throw std::invalid_argument("integrate_1d: moment order must be 0, 1 or 2");

    // u = sqrt(2) x; integrand in u keeps the e^{-u^2} weight explicit.
    const double root2 = std::numbers::sqrt2;
    auto g = [&](double u) {
        const double x = u / root2;
        double xp = 1.0;
        for (int k = 0; k < moment_order; ++k) xp *= x;
        return h(x) * xp * std::exp(-u * u) / root2;
    };

    const double ucut = root2 * kCutoff;
    std::vector<double> edges{-ucut, ucut};
    for (double b : breakpoints) {
        const double u = root2 * b;
        if (u > -ucut && u < ucut) edges.push_back(u);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    double total = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i], b = edges[i + 1];
        total += adapt(g, a, b, gl15(g, a, b), kTol, 0);
    }
    return total;
}

// --------------------------------------------------------------------------
// Kernel-moment cache

namespace {

struct CacheEntry {
    double v[6];
};

class KernelCache {
public:
    static KernelCache& instance() {
        static KernelCache c;
        return c;
    }

    bool lookup(const std::string& key, CacheEntry& out) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = map_.find(key);
        if (it == map_.end()) return false;
        out = it->second;
        return true;
    }

    void insert(const std::string& key, const CacheEntry& e) {
        std::lock_guard<std::mutex> lock(mu_);
        map_.emplace(key, e);
    }

    std::size_t size() {
        std::lock_guard<std::mutex> lock(mu_);
        return map_.size();
    }

    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) return;
        nlohmann::json j;
        try {
            in >> j;
        } catch (const std::exception&) {
            return;
        }
        if (!j.is_object() || j.value("version", 0) != 1) return;
        auto entries = j.find("entries");
        if (entries == j.end() || !entries->is_object()) return;
        std::lock_guard<std::mutex> lock(mu_);
        for (auto it = entries->begin(); it != entries->end(); ++it) {
            if (!it.value().is_array() || it.value().size() != 6) continue;
            CacheEntry e{};
            for (int k = 0; k < 6; ++k) e.v[k] = it.value()[k].get<double>();
            map_.emplace(it.key(), e);
        }
    }

    void save(const std::string& path) {
        nlohmann::json entries = nlohmann::json::object();
        {
            std::lock_guard<std::mutex> lock(mu_);
            for (const auto& [k, e] : map_)
                entries[k] = {e.v[0], e.v[1], e.v[2], e.v[3], e.v[4], e.v[5]};
        }
        nlohmann::json j;
        j["version"] = 1;
        j["entries"] = entries;
        std::ofstream out(path);
        if (out) out << j.dump();
    }

private:
    std::mutex mu_;
    std::unordered_map<std::string, CacheEntry> map_;
};

std::string cache_path_from_env() {
    const char* dir = std::getenv("BELLCV_CACHE_DIR");
    if (!dir || !*dir) return {};
    return std::string(dir) + "/bellcv-kernels-v1.json";
}

const KernelMoments& cached_moments(const std::string& key,
                                    const std::function<CacheEntry()>& compute) {
    static std::mutex mu;
    static std::unordered_map<std::string, KernelMoments> resolved;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = resolved.find(key);
        if (it != resolved.end()) return it->second;
    }
    CacheEntry e{};
    if (!KernelCache::instance().lookup(key, e)) {
        e = compute();
        KernelCache::instance().insert(key, e);
    }
    KernelMoments m{e.v[0], e.v[1], e.v[2], e.v[3], e.v[4], e.v[5]};
    std::lock_guard<std::mutex> lock(mu);
    auto [it, inserted] = resolved.emplace(key, m);
    (void)inserted;
    return it->second;
}

}  // namespace

const KernelMoments& kernel_moments(const FunctionSpec& h) {
    return cached_moments(h.key(), [&]() {
        auto bps = h.breakpoints();
        auto f = [&](double x) { return h(x); };
        auto f2 = [&](double x) {
            const double v = h(x);
            return v * v;
        };
        CacheEntry e{};
        e.v[0] = integrate_1d(f, 0, bps);
        e.v[1] = integrate_1d(f, 1, bps);
        e.v[2] = integrate_1d(f, 2, bps);
        e.v[3] = integrate_1d(f2, 0, bps);
        e.v[4] = integrate_1d(f2, 1, bps);
        e.v[5] = integrate_1d(f2, 2, bps);
        return e;
    });
}

EvenMoments abs_power_moments(double p) {
    if (!(p > -1.0)) throw std::invalid_argument("abs_power_moments: need p > -1");
    char buf[48];
    std::snprintf(buf, sizeof buf, "abspow(%.17g)", p);
    const auto& m = cached_moments(buf, [&]() {
        const std::vector<double> bps{0.0};
        auto f = [&](double x) { return std::pow(std::abs(x), p); };
        CacheEntry e{};
        e.v[0] = integrate_1d(f, 0, bps);
        e.v[1] = 0.0;
        e.v[2] = integrate_1d(f, 2, bps);
        e.v[3] = e.v[4] = e.v[5] = 0.0;
        return e;
    });
    return {m.m0, m.m2};
}

std::size_t kernel_cache_size() { return KernelCache::instance().size(); }

void kernel_cache_load_env() {
    const auto path = cache_path_from_env();
    if (!path.empty()) KernelCache::instance().load(path);
}

void kernel_cache_save_env() {
    const auto path = cache_path_from_env();
    if (!path.empty()) KernelCache::instance().save(path);
}

// --------------------------------------------------------------------------
// Mode kernels and correlations

namespace {

const double kRoot2OverPi = std::sqrt(2.0 / std::numbers::pi);

// <bra| h(X^theta) |ket> from the cached moments of h.
cplx kernel_entry(const KernelMoments& m, double theta, int ket, int bra) {
    if (ket == 0 && bra == 0) return kRoot2OverPi * m.m0;
    if (ket == 1 && bra == 1) return 4.0 * kRoot2OverPi * m.m2;
    const cplx phase = std::polar(1.0, bra == 0 ? -theta : theta);
    return 2.0 * kRoot2OverPi * m.m1 * phase;
}

// Same for h^2.
cplx kernel_entry_sq(const KernelMoments& m, double theta, int ket, int bra) {
    if (ket == 0 && bra == 0) return kRoot2OverPi * m.s0;
    if (ket == 1 && bra == 1) return 4.0 * kRoot2OverPi * m.s2;
    const cplx phase = std::polar(1.0, bra == 0 ? -theta : theta);
    return 2.0 * kRoot2OverPi * m.s1 * phase;
}

}  // namespace

cplx mode_kernel(const ModeBlock& block, const FunctionSpec& h, double theta) {
    const auto& m = kernel_moments(h);
    cplx out = 0.0;
    for (int ket = 0; ket < 2; ++ket)
        for (int bra = 0; bra < 2; ++bra)
            out += block.at(ket, bra) * kernel_entry(m, theta, ket, bra);
    return out;
}

cplx correlate(const DensityOperator& rho, std::span<const ModeObservable> observables) {
    if (static_cast<int>(observables.size()) != rho.mode_count())
        throw std::invalid_argument("correlate: observable count does not match mode count");

    std::vector<const KernelMoments*> moms;
    moms.reserve(observables.size());
    for (const auto& o : observables) moms.push_back(&kernel_moments(o.func));

    cplx total = 0.0;
    for (const auto& t : rho.terms()) {
        cplx prod = t.weight;
        for (size_t n = 0; n < observables.size() && prod != cplx(0.0); ++n)
            prod *= kernel_entry(*moms[n], observables[n].angle, t.ket[n], t.bra[n]);
        total += prod;
    }
    return total;
}

double correlate_hermitian(const DensityOperator& rho,
                           std::span<const ModeObservable> observables) {
    const cplx v = correlate(rho, observables);
    if (std::abs(v.imag()) > 1e-10)
        throw std::runtime_error("correlate: expectation of Hermitian product is not real");
    return v.real();
}

double correlate_hermitian_squared(const DensityOperator& rho,
                                   std::span<const ModeObservable> observables) {
    if (static_cast<int>(observables.size()) != rho.mode_count())
        throw std::invalid_argument("correlate: observable count does not match mode count");
    cplx total = 0.0;
    for (const auto& t : rho.terms()) {
        cplx prod = t.weight;
        for (size_t n = 0; n < observables.size() && prod != cplx(0.0); ++n)
            prod *= kernel_entry_sq(kernel_moments(observables[n].func),
                                    observables[n].angle, t.ket[n], t.bra[n]);
        total += prod;
    }
    if (std::abs(total.imag()) > 1e-10)
        throw std::runtime_error("correlate: expectation of Hermitian product is not real");
    return total.real();
}

cplx correlate_complex(const DensityOperator& rho,
                       std::span<const SiteObservablePair> sites) {
    if (static_cast<int>(sites.size()) != rho.mode_count())
        throw std::invalid_argument("correlate_complex: site count does not match mode count");

    std::vector<const KernelMoments*> mf, mg;
    mf.reserve(sites.size());
    mg.reserve(sites.size());
    for (const auto& s : sites) {
        mf.push_back(&kernel_moments(s.f_obs.func));
        mg.push_back(&kernel_moments(s.g_obs.func));
    }

    cplx total = 0.0;
    for (const auto& t : rho.terms()) {
        cplx prod = t.weight;
        for (size_t n = 0; n < sites.size() && prod != cplx(0.0); ++n) {
            const cplx kf = kernel_entry(*mf[n], sites[n].f_obs.angle, t.ket[n], t.bra[n]);
            const cplx kg = kernel_entry(*mg[n], sites[n].g_obs.angle, t.ket[n], t.bra[n]);
            prod *= kf + cplx(0.0, static_cast<double>(sites[n].conj_sign)) * kg;
        }
        total += prod;
    }
    return total;
}

double correlate_squared_sum(const DensityOperator& rho,
                             std::span<const SiteObservablePair> sites) {
    if (static_cast<int>(sites.size()) != rho.mode_count())
        throw std::invalid_argument("correlate_squared_sum: site count mismatch");

    cplx total = 0.0;
    for (const auto& t : rho.terms()) {
        cplx prod = t.weight;
        for (size_t n = 0; n < sites.size() && prod != cplx(0.0); ++n) {
            const auto& s = sites[n];
            const cplx kf = kernel_entry_sq(kernel_moments(s.f_obs.func), s.f_obs.angle,
                                            t.ket[n], t.bra[n]);
            const cplx kg = kernel_entry_sq(kernel_moments(s.g_obs.func), s.g_obs.angle,
                                            t.ket[n], t.bra[n]);
            prod *= kf + kg;
        }
        total += prod;
    }
    if (std::abs(total.imag()) > 1e-10)
        throw std::runtime_error("correlate_squared_sum: expectation is not real");
    return total.real();
}

// --------------------------------------------------------------------------
// Joint probability and the grid oracle

namespace {

const double kQuarterRoot2OverPi = std::pow(2.0 / std::numbers::pi, 0.25);

cplx wavefunction(int n, double x, double theta) {
    const double envelope = kQuarterRoot2OverPi * std::exp(-x * x);
    if (n == 0) return envelope;
    return 2.0 * x * envelope * std::polar(1.0, -theta);
}

}  // namespace

double joint_probability(const DensityOperator& rho, std::span<const double> angles,
                         std::span<const double> x) {
    const int n = rho.mode_count();
    if (static_cast<int>(angles.size()) != n || static_cast<int>(x.size()) != n)
        throw std::invalid_argument("joint_probability: length mismatch");

    cplx p = 0.0;
    for (const auto& t : rho.terms()) {
        cplx prod = t.weight;
        for (int i = 0; i < n; ++i) {
            prod *= wavefunction(t.ket[i], x[i], angles[i]) *
                    std::conj(wavefunction(t.bra[i], x[i], angles[i]));
        }
        p += prod;
    }
    if (std::abs(p.imag()) > 1e-10)
        throw std::runtime_error("joint_probability: density is not Hermitian");
    return p.real();
}

double grid_moment(const DensityOperator& rho, std::span<const GridAxis> axes_in,
                   int points_per_axis) {
    const int n = rho.mode_count();
    if (static_cast<int>(axes_in.size()) != n)
        throw std::invalid_argument("grid_moment: axis count mismatch");
    if (points_per_axis < 8) throw std::invalid_argument("grid_moment: too few points");

    // Per-axis nodes: Gauss-Legendre panels between the breakpoints of h_n.
    struct Axis {
        std::vector<double> nodes, weights;
    };
    std::vector<Axis> axes(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> edges{-kCutoff, kCutoff};
        for (double b : axes_in[i].breakpoints)
            if (b > -kCutoff && b < kCutoff) edges.push_back(b);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        const int pieces = static_cast<int>(edges.size()) - 1;
        const int panels_total = (points_per_axis + kGL - 1) / kGL;
        const int panels_per_piece = std::max(1, panels_total / pieces);
        for (int p = 0; p < pieces; ++p) {
            const double a = edges[p], b = edges[p + 1];
            const double h = (b - a) / panels_per_piece;
            for (int q = 0; q < panels_per_piece; ++q) {
                const double pa = a + q * h, c = pa + 0.5 * h, hw = 0.5 * h;
                for (int k = 0; k < kGL; ++k) {
                    axes[i].nodes.push_back(c + hw * kGLx[k]);
                    axes[i].weights.push_back(hw * kGLw[k]);
                }
            }
        }
    }

    std::vector<double> angles(n), x(n);
    for (int i = 0; i < n; ++i) angles[i] = axes_in[i].angle;

    // Odometer over the tensor grid; P is evaluated pointwise.
    std::vector<size_t> idx(n, 0);
    double total = 0.0;
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) {
            x[i] = axes[i].nodes[idx[i]];
            w *= axes[i].weights[idx[i]] * axes_in[i].h(x[i]);
        }
        if (w != 0.0) total += w * joint_probability(rho, angles, x);
        int i = n - 1;
        while (i >= 0 && ++idx[i] == axes[i].nodes.size()) idx[i--] = 0;
        if (i < 0) break;
    }
    return total;
}

double grid_moment(const DensityOperator& rho, std::span<const ModeObservable> observables,
                   int points_per_axis) {
    std::vector<GridAxis> axes;
    axes.reserve(observables.size());
    for (const auto& o : observables) {
        FunctionSpec f = o.func;
        axes.push_back({[f](double x) { return f(x); }, f.breakpoints(), o.angle});
    }
    return grid_moment(rho, axes, points_per_axis);
}

}  // namespace bellcv
