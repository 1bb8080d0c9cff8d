#include "bellcv/states.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace bellcv {

namespace {

constexpr double kNormTol = 1e-12;

void check_occ(const BasisProduct& occ, int modes) {
    if (static_cast<int>(occ.size()) != modes)
        throw std::invalid_argument("basis product length does not match mode count");
    for (auto v : occ)
        if (v != 0 && v != 1)
            throw std::invalid_argument("mode occupation must be 0 or 1");
}

BasisProduct occ_from_string(const std::string& s) {
    BasisProduct occ;
    occ.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("bad occupation string");
        occ.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return occ;
}

}  // namespace

PureState::PureState(int mode_count, std::vector<PureTerm> terms) : modes_(mode_count) {
    if (mode_count < 1) throw std::invalid_argument("mode count must be >= 1");
    if (terms.empty()) throw std::invalid_argument("state needs at least one term");

    std::map<BasisProduct, cplx> merged;
    for (auto& t : terms) {
        check_occ(t.occ, mode_count);
        merged[t.occ] += t.amp;
    }
    double norm2 = 0.0;
    for (auto& [occ, amp] : merged) norm2 += std::norm(amp);
    if (norm2 <= 0.0) throw std::invalid_argument("state has zero norm");
    if (std::abs(norm2 - 1.0) > kNormTol) {
        renormalized_ = true;
        std::cerr << "bellcv: warning: state norm " << std::sqrt(norm2)
                  << " != 1, renormalizing\n";
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& [occ, amp] : merged) {
        cplx a = amp * inv;
        if (std::abs(a) > 0.0) terms_.push_back({a, occ});
    }
    if (terms_.empty()) throw std::invalid_argument("state has zero norm after merging");
}

PureState make_ghz(int mode_count, int r, cplx c1, cplx c2) {
    if (mode_count < 1) throw std::invalid_argument("make_ghz: N must be >= 1");
    if (r < 0 || r > mode_count) throw std::invalid_argument("make_ghz: need 0 <= r <= N");
    if (std::abs(c1) == 0.0 && std::abs(c2) == 0.0)
        throw std::invalid_argument("make_ghz: c1 and c2 cannot both vanish");

    BasisProduct first(mode_count, 1), second(mode_count, 0);
    for (int n = 0; n < r; ++n) first[n] = 0;
    for (int n = 0; n < r; ++n) second[n] = 1;
    return PureState(mode_count, {{c1, first}, {c2, second}});
}

PureState make_cluster4() {
    const double h = 0.5;
    return PureState(4, {{h, occ_from_string("1111")},
                         {h, occ_from_string("1100")},
                         {h, occ_from_string("0011")},
                         {-h, occ_from_string("0000")}});
}

PureState make_w4() {
    const double h = 0.5;
    return PureState(4, {{h, occ_from_string("1000")},
                         {h, occ_from_string("0100")},
                         {h, occ_from_string("0010")},
                         {h, occ_from_string("0001")}});
}

namespace {

// H -> |10>, V -> |01| per qubit.
BasisProduct hv_encode(const std::string& hv) {
    BasisProduct occ;
    occ.reserve(2 * hv.size());
    for (char c : hv) {
        if (c == 'H') {
            occ.push_back(1);
            occ.push_back(0);
        } else {
            occ.push_back(0);
            occ.push_back(1);
        }
    }
    return occ;
}

}  // namespace

PureState make_extended_cluster(int qubits) {
    if (qubits < 4 || qubits % 2 != 0)
        throw std::invalid_argument("extended_cluster: qubit count must be even and >= 4");
    const int half = qubits / 2;
    std::string all_h(qubits, 'H'), all_v(qubits, 'V');
    std::string hv = std::string(half, 'H') + std::string(half, 'V');
    std::string vh = std::string(half, 'V') + std::string(half, 'H');
    const double h = 0.5;
    return PureState(2 * qubits, {{h, hv_encode(all_h)},
                                  {h, hv_encode(hv)},
                                  {h, hv_encode(vh)},
                                  {-h, hv_encode(all_v)}});
}

PureState make_extended_superposition(int mode_count) {
    if (mode_count < 4 || mode_count % 2 != 0)
        throw std::invalid_argument("extended_superposition: N must be even and >= 4");
    const int half = mode_count / 2;
    BasisProduct ones(mode_count, 1), zeros(mode_count, 0);
    BasisProduct zo(mode_count, 1), oz(mode_count, 0);
    for (int n = 0; n < half; ++n) zo[n] = 0;
    for (int n = 0; n < half; ++n) oz[n] = 1;
    const double h = 0.5;
    return PureState(mode_count, {{h, ones}, {h, zo}, {h, oz}, {-h, zeros}});
}

PureState make_named_state(const std::string& kind, int extent) {
    if (kind == "cluster4") return make_cluster4();
    if (kind == "w4") return make_w4();
    if (kind == "extended_cluster") return make_extended_cluster(extent);
    if (kind == "extended_superposition") return make_extended_superposition(extent);
    throw std::invalid_argument("unknown named state: " + kind);
}

std::string PureState::to_json() const {
    nlohmann::ordered_json j;
    j["modes"] = modes_;
    auto& arr = j["terms"] = nlohmann::ordered_json::array();
    for (const auto& t : terms_) {
        nlohmann::ordered_json jt;
        jt["amp"] = {t.amp.real(), t.amp.imag()};
        jt["occ"] = t.occ;
        arr.push_back(jt);
    }
    return j.dump();
}

PureState PureState::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    int modes = j.at("modes").get<int>();
    std::vector<PureTerm> terms;
    for (const auto& jt : j.at("terms")) {
        auto amp = jt.at("amp");
        cplx a(amp.at(0).get<double>(), amp.at(1).get<double>());
        BasisProduct occ;
        for (const auto& v : jt.at("occ")) occ.push_back(v.get<std::uint8_t>());
        terms.push_back({a, occ});
    }
    return PureState(modes, std::move(terms));
}

DensityOperator::DensityOperator(int mode_count, std::vector<DensityTerm> terms)
    : modes_(mode_count) {
    if (mode_count < 1) throw std::invalid_argument("mode count must be >= 1");

    std::map<std::pair<BasisProduct, BasisProduct>, cplx> merged;
    for (auto& t : terms) {
        check_occ(t.bra, mode_count);
        check_occ(t.ket, mode_count);
        merged[{t.ket, t.bra}] += t.weight;
    }
    double tr = 0.0;
    for (auto& [kb, w] : merged) {
        const auto& [ket, bra] = kb;
        if (std::abs(w) < 1e-300) continue;
        auto adj = merged.find({bra, ket});
        if (adj == merged.end() || std::abs(std::conj(adj->second) - w) > 1e-9)
            throw std::invalid_argument("density operator is not Hermitian");
        if (ket == bra) {
            if (std::abs(w.imag()) > 1e-12 || w.real() < -1e-14)
                throw std::invalid_argument("density operator has a bad diagonal weight");
            tr += w.real();
        }
        terms_.push_back({bra, ket, w});
    }
    if (std::abs(tr - 1.0) > kNormTol)
        throw std::invalid_argument("density operator trace differs from 1");
}

double DensityOperator::trace() const {
    double tr = 0.0;
    for (const auto& t : terms_)
        if (t.bra == t.ket) tr += t.weight.real();
    return tr;
}

DensityOperator to_density(const PureState& state) {
    std::vector<DensityTerm> terms;
    const auto& ts = state.terms();
    terms.reserve(ts.size() * ts.size());
    for (const auto& ti : ts)
        for (const auto& tj : ts)
            terms.push_back({tj.occ, ti.occ, ti.amp * std::conj(tj.amp)});
    return DensityOperator(state.mode_count(), std::move(terms));
}

DensityOperator product_density(const std::vector<ModeDensity>& modes) {
    if (modes.empty()) throw std::invalid_argument("product_density: no modes");
    const int n = static_cast<int>(modes.size());
    std::vector<DensityTerm> terms;
    // Expand the tensor product over the 4^N (ket, bra) index choices,
    // skipping zero factors early.
    std::vector<DensityTerm> work{{BasisProduct{}, BasisProduct{}, cplx(1.0, 0.0)}};
    for (int i = 0; i < n; ++i) {
        std::vector<DensityTerm> next;
        next.reserve(work.size() * 4);
        for (const auto& t : work) {
            for (int k = 0; k < 2; ++k) {
                for (int b = 0; b < 2; ++b) {
                    cplx w = t.weight * modes[i].m[k][b];
                    if (std::abs(w) < 1e-300) continue;
                    DensityTerm nt = t;
                    nt.ket.push_back(static_cast<std::uint8_t>(k));
                    nt.bra.push_back(static_cast<std::uint8_t>(b));
                    nt.weight = w;
                    next.push_back(std::move(nt));
                }
            }
        }
        work = std::move(next);
    }
    return DensityOperator(n, std::move(work));
}

}  // namespace bellcv
