#include "qfm/bath.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "qfm/rng.hpp"

namespace qfm {

void TlsParams::validate() const {
    if (!(g > 0.0)) throw std::invalid_argument("TlsParams: g must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("TlsParams: gamma must be > 0");
    if (!std::isfinite(epsilon)) throw std::invalid_argument("TlsParams: epsilon must be finite");
}

double DriveParams::phase(double t) const {
    if (amp == 0.0) return 0.0;
    return (amp / omega) * std::sin(omega * t);
}

void DriveParams::validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("DriveParams: omega must be > 0");
    if (!(amp >= 0.0)) throw std::invalid_argument("DriveParams: amp must be >= 0");
    if (!std::isfinite(e0)) throw std::invalid_argument("DriveParams: e0 must be finite");
}

void BathSpec::validate() const {
    if (n_tls < 1) throw std::invalid_argument("BathSpec: n_tls must be >= 1");
    if (!(spacing > 0.0)) throw std::invalid_argument("BathSpec: spacing must be > 0");
    if (!(g_min > 0.0 && g_min <= g_max)) throw std::invalid_argument("BathSpec: need 0 < g_min <= g_max");
    if (!(gamma_min > 0.0 && gamma_min <= gamma_max))
        throw std::invalid_argument("BathSpec: need 0 < gamma_min <= gamma_max");
    if (!std::isfinite(center)) throw std::invalid_argument("BathSpec: center must be finite");
}

double BathRealization::g_max() const {
    double v = 0.0;
    for (const auto& t : tls) v = std::max(v, t.g);
    return v;
}

double BathRealization::gamma_max() const {
    double v = 0.0;
    for (const auto& t : tls) v = std::max(v, t.gamma);
    return v;
}

double BathRealization::gamma_min() const {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& t : tls) v = std::min(v, t.gamma);
    return v;
}

double BathRealization::epsilon_min() const { return tls.empty() ? 0.0 : tls.front().epsilon; }
double BathRealization::epsilon_max() const { return tls.empty() ? 0.0 : tls.back().epsilon; }

namespace {

// FNV-1a over the canonical spec fields, hex-encoded.
void fnv_mix(std::uint64_t& h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xFFull;
        h *= 0x100000001B3ull;
    }
}

std::uint64_t double_bits(double x) {
    std::uint64_t u;
    static_assert(sizeof(u) == sizeof(x));
    std::memcpy(&u, &x, sizeof(u));
    return u;
}

std::string hex16(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return s;
}

// Midpoint grid: slot i of an n-slot window centered at `center`.
double grid_slot(const BathSpec& spec, int n_slots, int i) {
    return spec.center + (i - 0.5 * (n_slots - 1)) * spec.spacing;
}

}  // namespace

std::string fingerprint(const BathSpec& spec) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    fnv_mix(h, static_cast<std::uint64_t>(spec.n_tls));
    fnv_mix(h, double_bits(spec.spacing));
    fnv_mix(h, spec.layout == EpsilonLayout::Equispaced ? 1u : 2u);
    fnv_mix(h, double_bits(spec.g_min));
    fnv_mix(h, double_bits(spec.g_max));
    fnv_mix(h, double_bits(spec.gamma_min));
    fnv_mix(h, double_bits(spec.gamma_max));
    fnv_mix(h, double_bits(spec.center));
    fnv_mix(h, spec.seed);
    return hex16(h);
}

BathRealization sample_bath(const BathSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    BathRealization bath;
    bath.tls.reserve(static_cast<std::size_t>(spec.n_tls));

    if (spec.layout == EpsilonLayout::Equispaced) {
        for (int i = 0; i < spec.n_tls; ++i) {
            TlsParams t;
            t.epsilon = grid_slot(spec, spec.n_tls, i);
            t.g = rng.uniform(spec.g_min, spec.g_max);
            t.gamma = rng.uniform(spec.gamma_min, spec.gamma_max);
            bath.tls.push_back(t);
        }
    } else {
        const double half = 0.5 * spec.window();
        for (int i = 0; i < spec.n_tls; ++i) {
            TlsParams t;
            t.epsilon = rng.uniform(spec.center - half, spec.center + half);
            t.g = rng.uniform(spec.g_min, spec.g_max);
            t.gamma = rng.uniform(spec.gamma_min, spec.gamma_max);
            bath.tls.push_back(t);
        }
        std::stable_sort(bath.tls.begin(), bath.tls.end(),
                         [](const TlsParams& a, const TlsParams& b) { return a.epsilon < b.epsilon; });
    }

    bath.spec_fingerprint = fingerprint(spec);
    return bath;
}

BathRealization mixed_bath(const BathSpec& spec_weak, const TlsParams& strong, int position_index) {
    spec_weak.validate();
    if (spec_weak.layout != EpsilonLayout::Equispaced)
        throw std::invalid_argument("mixed_bath: requires an equispaced weak-bath spec");
    const int n_slots = spec_weak.n_tls + 1;
    if (position_index < 0 || position_index >= n_slots)
        throw std::out_of_range("mixed_bath: position_index outside the grid");
    if (!(strong.g > 0.0 && strong.gamma > 0.0))
        throw std::invalid_argument("mixed_bath: strong TLS must have g, gamma > 0");

    Rng rng(spec_weak.seed);
    BathRealization bath;
    bath.tls.reserve(static_cast<std::size_t>(n_slots));
    for (int i = 0; i < n_slots; ++i) {
        TlsParams t;
        t.epsilon = grid_slot(spec_weak, n_slots, i);
        if (i == position_index) {
            t.g = strong.g;
            t.gamma = strong.gamma;
        } else {
            t.g = rng.uniform(spec_weak.g_min, spec_weak.g_max);
            t.gamma = rng.uniform(spec_weak.gamma_min, spec_weak.gamma_max);
        }
        bath.tls.push_back(t);
    }

    std::uint64_t h = 0xCBF29CE484222325ull;
    fnv_mix(h, double_bits(strong.g));
    fnv_mix(h, double_bits(strong.gamma));
    fnv_mix(h, static_cast<std::uint64_t>(position_index));
    bath.spec_fingerprint = fingerprint(spec_weak) + "-" + hex16(h);
    return bath;
}

std::string bath_to_json(const BathRealization& bath, const BathSpec& spec) {
    nlohmann::json j;
    std::vector<double> eps, g, gamma;
    for (const auto& t : bath.tls) {
        eps.push_back(t.epsilon);
        g.push_back(t.g);
        gamma.push_back(t.gamma);
    }
    j["epsilon"] = eps;
    j["g"] = g;
    j["gamma"] = gamma;
    j["seed"] = spec.seed;
    j["spec"] = {
        {"n_tls", spec.n_tls},
        {"spacing", spec.spacing},
        {"layout", spec.layout == EpsilonLayout::Equispaced ? "equispaced" : "uniform-random"},
        {"g_range", {spec.g_min, spec.g_max}},
        {"gamma_range", {spec.gamma_min, spec.gamma_max}},
        {"center", spec.center},
    };
    j["fingerprint"] = bath.spec_fingerprint;
    return j.dump(2);
}

BathRealization bath_from_json(const std::string& text, BathSpec* spec_out) {
    const nlohmann::json j = nlohmann::json::parse(text);
    const auto& eps = j.at("epsilon");
    const auto& g = j.at("g");
    const auto& gamma = j.at("gamma");
    if (eps.size() != g.size() || eps.size() != gamma.size())
        throw std::invalid_argument("bath_from_json: array length mismatch");

    BathRealization bath;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        TlsParams t;
        t.epsilon = eps[i].get<double>();
        t.g = g[i].get<double>();
        t.gamma = gamma[i].get<double>();
        t.validate();
        bath.tls.push_back(t);
    }
    if (!std::is_sorted(bath.tls.begin(), bath.tls.end(),
                        [](const TlsParams& a, const TlsParams& b) { return a.epsilon < b.epsilon; }))
        throw std::invalid_argument("bath_from_json: epsilon values must be sorted ascending");
    if (j.contains("fingerprint")) bath.spec_fingerprint = j["fingerprint"].get<std::string>();

    if (spec_out != nullptr && j.contains("spec")) {
        const auto& s = j["spec"];
        spec_out->n_tls = s.at("n_tls").get<int>();
        spec_out->spacing = s.at("spacing").get<double>();
        spec_out->layout = s.at("layout").get<std::string>() == "equispaced"
                               ? EpsilonLayout::Equispaced
                               : EpsilonLayout::UniformRandom;
        spec_out->g_min = s.at("g_range")[0].get<double>();
        spec_out->g_max = s.at("g_range")[1].get<double>();
        spec_out->gamma_min = s.at("gamma_range")[0].get<double>();
        spec_out->gamma_max = s.at("gamma_range")[1].get<double>();
        spec_out->center = s.value("center", 0.0);
        spec_out->seed = j.at("seed").get<std::uint64_t>();
    }
    return bath;
}

}  // namespace qfm
