// observables.hpp: Joint photon-phonon distribution and the steady-state
// observables evaluated on it.

#pragma once

#include <optional>

#include <Eigen/Dense>

#include "multiphonon/operators.hpp"
#include "multiphonon/params.hpp"

namespace multiphonon {

// P(n, m) = <n, m| rho_bar |n, m>, normalized to unit sum.
struct Distribution {
    static constexpr double negativity_floor = -1e-10;

    FockCutoffs cutoffs;
    Eigen::MatrixXd table; // (n_max + 1) x (m_max + 1)

    double operator()(int n, int m) const { return table(n, m); }
};

Distribution distribution(const DensityMatrix& rho_bar, const FockCutoffs& cutoffs);
// From product-basis diagonal populations (index n * (m_max + 1) + m).
Distribution distribution_from_populations(const Eigen::VectorXd& populations, const FockCutoffs& cutoffs);

// <a^dag^k a^k> = sum n!/(n-k)! P(n, m)
double photon_factorial_moment(const Distribution& P, int k);

// <b^dag^k b^k> for the lab-frame phonon b = b_bar - chi a^dag a on a
// phonon-diagonal polaron-frame state:
//   sum_{n,m} P(n,m) sum_j C(k,j)^2 (chi n)^(2(k-j)) m!/(m-j)!
double phonon_factorial_moment(const Distribution& P, double chi, int k);

// Below this mean the normalized correlations are reported as undefined.
inline constexpr double undefined_mean_threshold = 1e-12;

struct ObservablesRecord {
    double mean_photon{0.0};
    double mean_phonon{0.0};
    std::optional<double> g2_a;
    std::optional<double> g2_b;
    std::optional<double> g3_b;
    std::optional<double> g4_b;
    std::optional<double> appendix_b_residual;
};

ObservablesRecord observables_from_distribution(const Distribution& P, double chi);
// Also fills appendix_b_residual.
ObservablesRecord observables_from_distribution(const Distribution& P, const SystemParams& params);

// Closed-form fixed-mirror (g = 0) cavity: <n> = eps^2 / (Delta^2 + kappa_a^2/4), g2 = 1.
struct FixedMirrorReference {
    double mean_photon;
    std::optional<double> g2_a; // undefined when epsilon = 0
};
FixedMirrorReference fixed_mirror_reference(const SystemParams& params);

// |<b^dag b> - (nbar + chi^2 (kappa_a/kappa_b) <a^dag a> + chi^2 <a^dag^2 a^2>)|
double appendix_b_residual(const Distribution& P, const SystemParams& params);

} // namespace multiphonon
