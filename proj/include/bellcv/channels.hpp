#pragma once

#include <vector>

#include "bellcv/states.hpp"

namespace bellcv {

// Detector efficiency, uniform or per mode, each component in [0, 1].
class LossSpec {
public:
    explicit LossSpec(double eta_uniform);
    LossSpec(std::vector<double> eta_per_mode);

    double eta(int mode) const;
    bool is_uniform() const { return per_mode_.empty(); }
    double uniform_value() const { return uniform_; }
    // 0 for a uniform spec, otherwise the declared mode count.
    int size() const { return static_cast<int>(per_mode_.size()); }

private:
    double uniform_ = 1.0;
    std::vector<double> per_mode_;
};

// Probability weight of the intended pure state in the dephased mixture.
struct PuritySpec {
    double p;
    explicit PuritySpec(double purity);
};

// Beamsplitter loss restricted to the {0,1} photon subspace, applied mode by
// mode:  |1><1| -> eta |1><1| + (1-eta)|0><0|,  |1><0| -> sqrt(eta)|1><0|,
// |0><1| -> sqrt(eta)|0><1|,  |0><0| -> |0><0|.
DensityOperator apply_loss(const DensityOperator& rho, const LossSpec& loss);

// p rho + (1-p) diag(rho): every off-diagonal dyad is scaled by p.
DensityOperator apply_decoherence_mix(const DensityOperator& rho, const PuritySpec& purity);

// Independent dephasing of each mode: a dyad is scaled by p once per mode
// whose bra and ket occupations differ. Used by the sweep surfaces, where the
// noise parameter acts per site rather than on the state as a whole.
DensityOperator apply_mode_dephasing(const DensityOperator& rho, double p);

}  // namespace bellcv
