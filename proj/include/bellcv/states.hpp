#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace bellcv {

using cplx = std::complex<double>;

// Occupation pattern of N modes, each entry 0 or 1.
using BasisProduct = std::vector<std::uint8_t>;

struct PureTerm {
    cplx amp;
    BasisProduct occ;
};

// Superposition of occupation-basis products over N single-photon modes.
// Construction merges duplicate basis products and normalizes; a norm
// deficit larger than 1e-12 is reported through the warning flag.
class PureState {
public:
    PureState(int mode_count, std::vector<PureTerm> terms);

    int mode_count() const { return modes_; }
    const std::vector<PureTerm>& terms() const { return terms_; }
    bool was_renormalized() const { return renormalized_; }

    std::string to_json() const;
    static PureState from_json(const std::string& text);

private:
    int modes_;
    std::vector<PureTerm> terms_;
    bool renormalized_ = false;
};

// c1 |0>^r |1>^(N-r) + c2 |1>^r |0>^(N-r)
PureState make_ghz(int mode_count, int r, cplx c1, cplx c2);

// Named states; `extent` is required for the extended kinds (even, >= 4).
// Kinds: "cluster4", "w4", "extended_cluster" (extent qubits -> 2*extent
// modes, each qubit encoded as a |10>/|01> mode pair), and
// "extended_superposition" (extent modes).
PureState make_named_state(const std::string& kind, int extent = 0);

PureState make_cluster4();
PureState make_w4();
PureState make_extended_cluster(int qubits);
PureState make_extended_superposition(int mode_count);

// One dyad w |ket><bra| of an operator on the N-mode occupation space.
struct DensityTerm {
    BasisProduct bra;
    BasisProduct ket;
    cplx weight;
};

// Hermitian trace-one operator stored as a merged dyad list.
class DensityOperator {
public:
    DensityOperator(int mode_count, std::vector<DensityTerm> terms);

    int mode_count() const { return modes_; }
    const std::vector<DensityTerm>& terms() const { return terms_; }
    double trace() const;

private:
    int modes_;
    std::vector<DensityTerm> terms_;
};

DensityOperator to_density(const PureState& state);

// Single-mode density matrix, entries indexed [ket][bra].
struct ModeDensity {
    cplx m[2][2];
};

// rho_1 (x) rho_2 (x) ... built from per-mode density matrices.
DensityOperator product_density(const std::vector<ModeDensity>& modes);

}  // namespace bellcv
