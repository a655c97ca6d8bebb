// params.hpp: Dimensionless system parameters, Fock cutoffs and regime checks

#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace multiphonon {

// All rates and couplings are in units of the mechanical frequency (omega == 1).
struct SystemParams {
    double delta{0.0};    // cavity-laser detuning
    double epsilon{0.0};  // drive amplitude
    double g{0.0};        // optomechanical coupling
    double kappa_a{1e-3}; // cavity decay
    double kappa_b{1e-5}; // mechanical decay
    double nbar{0.0};     // thermal phonon occupation

    // Lamb-Dicke-like small parameter g/omega; derived, never stored.
    double chi() const noexcept { return g; }
};

// Throws std::invalid_argument on non-finite values or on negative/zero rates.
void require_well_formed(const SystemParams& params);

struct FockCutoffs {
    int n_max{0}; // photon
    int m_max{0}; // phonon

    int photon_dim() const noexcept { return n_max + 1; }
    int phonon_dim() const noexcept { return m_max + 1; }
    int dim() const noexcept { return photon_dim() * phonon_dim(); }

    // Product basis index; phonon is the fast index.
    int index(int n, int m) const noexcept { return n * (m_max + 1) + m; }

    friend bool operator==(const FockCutoffs&, const FockCutoffs&) = default;
};

void require_valid(const FockCutoffs& cutoffs);

// Maximal phonon-process order N: generated terms carry chi^(2n) with n <= N.
struct ExpansionOrder {
    int value{1};

    constexpr explicit ExpansionOrder(int n = 1) : value(n) {}
    friend bool operator==(const ExpansionOrder&, const ExpansionOrder&) = default;
};

enum class DiagnosticKind { CouplingOrdering, ResonanceProximity, DecayNotSmall, DetuningNotSmall };

struct Diagnostic {
    DiagnosticKind kind;
    std::string message;
};

// Warnings for departures from the dispersive, off-resonant regime. Pure.
std::vector<Diagnostic> validate_regime(const SystemParams& params);

const char* to_string(DiagnosticKind kind);

struct RunConfig {
    SystemParams params;
    FockCutoffs cutoffs{8, 16};
    ExpansionOrder order{1};
};

// Flat `key = value` file with `#` comments. Unknown keys and malformed
// lines are errors; missing keys keep their defaults.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

} // namespace multiphonon
