#include "bellcv/functions.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bellcv {

FunctionSpec::FunctionSpec(FunctionFamily fam, double p1, double p2)
    : family_(fam), p1_(p1), p2_(p2) {}

FunctionSpec FunctionSpec::identity() { return {FunctionFamily::Identity, 0, 0}; }

FunctionSpec FunctionSpec::power(double m) {
    if (!(m > 0)) throw std::invalid_argument("power: exponent must be > 0");
    return {FunctionFamily::Power, m, 0};
}

FunctionSpec FunctionSpec::triple_bin(double s) {
    if (!(s >= 0)) throw std::invalid_argument("triplebin: dead zone must be >= 0");
    return {FunctionFamily::TripleBin, s, 0};
}

FunctionSpec FunctionSpec::tanh_pow(double q, double m) {
    if (!(q > 0) || !(m > 0)) throw std::invalid_argument("tanh: need q > 0 and m > 0");
    return {FunctionFamily::TanhPow, q, m};
}

FunctionSpec FunctionSpec::rational(double eps) {
    if (!(eps >= 0)) throw std::invalid_argument("rational: eps must be >= 0");
    return {FunctionFamily::Rational, eps, 0};
}

FunctionSpec FunctionSpec::sign_bin() { return {FunctionFamily::SignBin, 0, 0}; }

double FunctionSpec::operator()(double x) const {
    if (x == 0.0) return 0.0;
    const double s = x > 0.0 ? 1.0 : -1.0;
    const double ax = std::abs(x);
    switch (family_) {
        case FunctionFamily::Identity:
            return x;
        case FunctionFamily::Power:
            return s * std::pow(ax, p1_);
        case FunctionFamily::TripleBin:
            return ax <= p1_ ? 0.0 : s;
        case FunctionFamily::TanhPow:
            return s * std::pow(std::tanh(p1_ * ax), p2_);
        case FunctionFamily::Rational:
            return x / (1.0 + p1_ * x * x);
        case FunctionFamily::SignBin:
            return s;
    }
    return 0.0;
}

std::vector<double> FunctionSpec::breakpoints() const {
    switch (family_) {
        case FunctionFamily::Identity:
        case FunctionFamily::Rational:
            return {};
        case FunctionFamily::Power:
            return p1_ < 1.0 ? std::vector<double>{0.0} : std::vector<double>{};
        case FunctionFamily::TripleBin:
            if (p1_ == 0.0) return {0.0};
            return {-p1_, p1_};
        case FunctionFamily::TanhPow:
            return p2_ < 1.0 ? std::vector<double>{0.0} : std::vector<double>{};
        case FunctionFamily::SignBin:
            return {0.0};
    }
    return {};
}

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

std::string FunctionSpec::key() const {
    switch (family_) {
        case FunctionFamily::Identity:
            return "identity";
        case FunctionFamily::Power:
            return "power(" + fmt(p1_) + ")";
        case FunctionFamily::TripleBin:
            return "triplebin(" + fmt(p1_) + ")";
        case FunctionFamily::TanhPow:
            return "tanh(" + fmt(p1_) + "," + fmt(p2_) + ")";
        case FunctionFamily::Rational:
            return "rational(" + fmt(p1_) + ")";
        case FunctionFamily::SignBin:
            return "bin";
    }
    return "?";
}

FunctionSpec FunctionSpec::parse(const std::string& text) {
    auto open = text.find('(');
    std::string name = open == std::string::npos ? text : text.substr(0, open);
    std::vector<double> args;
    if (open != std::string::npos) {
        if (text.back() != ')') throw std::invalid_argument("bad function syntax: " + text);
        std::string body = text.substr(open + 1, text.size() - open - 2);
        size_t pos = 0;
        while (pos < body.size()) {
            size_t comma = body.find(',', pos);
            std::string tok = body.substr(pos, comma == std::string::npos ? std::string::npos
                                                                          : comma - pos);
            try {
                args.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad numeric argument in: " + text);
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }

    auto need = [&](size_t n) {
        if (args.size() != n)
            throw std::invalid_argument("wrong argument count in: " + text);
    };
    if (name == "identity") {
        need(0);
        return identity();
    }
    if (name == "bin") {
        need(0);
        return sign_bin();
    }
    if (name == "power") {
        need(1);
        return power(args[0]);
    }
    if (name == "triplebin") {
        need(1);
        return triple_bin(args[0]);
    }
    if (name == "tanh") {
        need(2);
        return tanh_pow(args[0], args[1]);
    }
    if (name == "rational") {
        need(1);
        return rational(args[0]);
    }
    throw std::invalid_argument("unknown function family: " + name);
}

}  // namespace bellcv
