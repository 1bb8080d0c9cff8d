#include "bellcv/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace bellcv {

LossSpec::LossSpec(double eta_uniform) : uniform_(eta_uniform) {
    if (!(eta_uniform >= 0.0 && eta_uniform <= 1.0))
        throw std::invalid_argument("eta must lie in [0, 1]");
}

LossSpec::LossSpec(std::vector<double> eta_per_mode) : per_mode_(std::move(eta_per_mode)) {
    if (per_mode_.empty()) throw std::invalid_argument("per-mode eta list is empty");
    for (double e : per_mode_)
        if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("eta must lie in [0, 1]");
}

double LossSpec::eta(int mode) const {
    if (per_mode_.empty()) return uniform_;
    if (mode < 0 || mode >= static_cast<int>(per_mode_.size()))
        throw std::out_of_range("mode index out of range for per-mode eta");
    return per_mode_[mode];
}

PuritySpec::PuritySpec(double purity) : p(purity) {
    if (!(purity >= 0.0 && purity <= 1.0))
        throw std::invalid_argument("purity must lie in [0, 1]");
}

DensityOperator apply_loss(const DensityOperator& rho, const LossSpec& loss) {
    const int n = rho.mode_count();
    if (!loss.is_uniform() && loss.size() != n)
        throw std::invalid_argument("apply_loss: per-mode eta length != mode count");

    std::vector<DensityTerm> out;
    for (const auto& t : rho.terms()) {
        // Modes with (1,1) branch into eta|1><1| + (1-eta)|0><0|; everything
        // else is a scalar factor.
        std::vector<DensityTerm> work{t};
        for (int m = 0; m < n; ++m) {
            const double eta = loss.eta(m);
            std::vector<DensityTerm> next;
            next.reserve(work.size() * 2);
            for (auto& w : work) {
                const int k = w.ket[m], b = w.bra[m];
                if (k == 1 && b == 1) {
                    if (eta > 0.0) {
                        DensityTerm kept = w;
                        kept.weight *= eta;
                        next.push_back(std::move(kept));
                    }
                    if (eta < 1.0) {
                        DensityTerm lost = w;
                        lost.weight *= 1.0 - eta;
                        lost.ket[m] = 0;
                        lost.bra[m] = 0;
                        next.push_back(std::move(lost));
                    }
                } else if (k != b) {
                    w.weight *= std::sqrt(eta);
                    if (std::abs(w.weight) > 0.0) next.push_back(std::move(w));
                } else {
                    next.push_back(std::move(w));
                }
            }
            work = std::move(next);
        }
        for (auto& w : work) out.push_back(std::move(w));
    }
    return DensityOperator(n, std::move(out));
}

DensityOperator apply_decoherence_mix(const DensityOperator& rho, const PuritySpec& purity) {
    std::vector<DensityTerm> out;
    out.reserve(rho.terms().size());
    for (auto t : rho.terms()) {
        if (t.bra != t.ket) t.weight *= purity.p;
        if (std::abs(t.weight) > 0.0) out.push_back(std::move(t));
    }
    return DensityOperator(rho.mode_count(), std::move(out));
}

DensityOperator apply_mode_dephasing(const DensityOperator& rho, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("purity must lie in [0, 1]");
    std::vector<DensityTerm> out;
    out.reserve(rho.terms().size());
    for (auto t : rho.terms()) {
        for (int m = 0; m < rho.mode_count(); ++m)
            if (t.ket[m] != t.bra[m]) t.weight *= p;
        if (std::abs(t.weight) > 0.0) out.push_back(std::move(t));
    }
    return DensityOperator(rho.mode_count(), std::move(out));
}

}  // namespace bellcv
