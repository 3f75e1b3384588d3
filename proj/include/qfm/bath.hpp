// bath.hpp — data model for the driven qubit and its two-level-system (TLS)
// defect bath, plus deterministic sampling of disorder realizations.
//
// Unit convention: all energies and rates are angular frequencies in the same
// unit system as the modulation frequency Omega; the CLI normalizes Omega = 1
// and quotes energies relative to the window center E*.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qfm {

// One defect: energy splitting, transverse coupling to the qubit, and phonon
// relaxation rate (amplitude rate; probability decays at 2*gamma).
struct TlsParams {
    double epsilon = 0.0;
    double g = 0.0;
    double gamma = 0.0;

    bool weakly_coupled() const { return g < gamma; }
    void validate() const;
};

// Qubit drive: splitting E(t) = e0 + amp*cos(omega*t), giving the accumulated
// phase phi(t) = (amp/omega)*sin(omega*t).
struct DriveParams {
    double e0 = 0.0;
    double amp = 0.0;
    double omega = 1.0;

    double modulation_index() const { return amp / omega; }
    double phase(double t) const;
    void validate() const;
};

enum class EpsilonLayout { Equispaced, UniformRandom };

// Disorder ensemble description.  Splittings cover a window of width
// n_tls * spacing centered at `center` (midpoint grid when equispaced,
// i.i.d. uniform otherwise); couplings and relaxation rates are drawn
// independently and uniformly from their ranges.
struct BathSpec {
    int n_tls = 0;
    double spacing = 0.0;
    EpsilonLayout layout = EpsilonLayout::Equispaced;
    double g_min = 0.0, g_max = 0.0;
    double gamma_min = 0.0, gamma_max = 0.0;
    double center = 0.0;
    std::uint64_t seed = 0;

    double window() const { return n_tls * spacing; }
    void validate() const;
};

// One disorder sample, sorted ascending by epsilon.
struct BathRealization {
    std::vector<TlsParams> tls;
    std::string spec_fingerprint;

    int size() const { return static_cast<int>(tls.size()); }
    double g_max() const;
    double gamma_max() const;
    double gamma_min() const;
    double epsilon_min() const;
    double epsilon_max() const;
};

std::string fingerprint(const BathSpec& spec);

BathRealization sample_bath(const BathSpec& spec);

// Insert one TLS (typically strongly coupled) into the grid slot
// `position_index` of an (n_tls + 1)-slot equispaced grid; the remaining
// slots are filled with draws from `spec_weak`.  The inserted TLS takes its
// splitting from the grid slot.
BathRealization mixed_bath(const BathSpec& spec_weak, const TlsParams& strong,
                           int position_index);

// JSON archival format: {epsilon[], g[], gamma[], seed, spec{...}}.
std::string bath_to_json(const BathRealization& bath, const BathSpec& spec);
BathRealization bath_from_json(const std::string& text, BathSpec* spec_out = nullptr);

}  // namespace qfm
