#include "multiphonon/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace multiphonon {

namespace {

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// m! / (m - j)!
double falling(int m, int j)
{
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= (m - i);
    return r;
}

std::optional<double> normalized(double moment, double mean, int k)
{
    if (mean < undefined_mean_threshold) return std::nullopt;
    return moment / std::pow(mean, k);
}

} // namespace

Distribution distribution_from_populations(const Eigen::VectorXd& populations, const FockCutoffs& c)
{
    require_valid(c);
    if (populations.size() != c.dim()) throw std::invalid_argument("population vector has the wrong length");
    Distribution P{c, Eigen::MatrixXd(c.photon_dim(), c.phonon_dim())};
    for (int n = 0; n <= c.n_max; ++n)
        for (int m = 0; m <= c.m_max; ++m) P.table(n, m) = populations(c.index(n, m));

    const double lowest = P.table.minCoeff();
    if (lowest < Distribution::negativity_floor) {
        throw std::domain_error("distribution has negative population " + std::to_string(lowest));
    }
    const double total = P.table.sum();
    if (!(total > 0.0)) throw std::domain_error("distribution has non-positive total weight");
    P.table /= total;
    return P;
}

Distribution distribution(const DensityMatrix& rho_bar, const FockCutoffs& c)
{
    if (rho_bar.dim() != c.dim()) throw std::invalid_argument("density matrix does not match cutoffs");
    return distribution_from_populations(rho_bar.matrix().diagonal().real(), c);
}

double photon_factorial_moment(const Distribution& P, int k)
{
    double s = 0.0;
    for (int n = 0; n <= P.cutoffs.n_max; ++n) s += falling(n, k) * P.table.row(n).sum();
    return s;
}

double phonon_factorial_moment(const Distribution& P, double chi, int k)
{
    if (k < 0) throw std::invalid_argument("moment order must be >= 0");
    double s = 0.0;
    for (int n = 0; n <= P.cutoffs.n_max; ++n) {
        const double shift2 = (chi * n) * (chi * n);
        for (int m = 0; m <= P.cutoffs.m_max; ++m) {
            const double p = P.table(n, m);
            if (p == 0.0) continue;
            double v = 0.0;
            for (int j = 0; j <= std::min(k, m); ++j) {
                const double c = binomial(k, j);
                v += c * c * std::pow(shift2, k - j) * falling(m, j);
            }
            s += p * v;
        }
    }
    return s;
}

ObservablesRecord observables_from_distribution(const Distribution& P, double chi)
{
    ObservablesRecord r;
    r.mean_photon = photon_factorial_moment(P, 1);
    r.mean_phonon = phonon_factorial_moment(P, chi, 1);
    r.g2_a = normalized(photon_factorial_moment(P, 2), r.mean_photon, 2);
    r.g2_b = normalized(phonon_factorial_moment(P, chi, 2), r.mean_phonon, 2);
    r.g3_b = normalized(phonon_factorial_moment(P, chi, 3), r.mean_phonon, 3);
    r.g4_b = normalized(phonon_factorial_moment(P, chi, 4), r.mean_phonon, 4);
    return r;
}

ObservablesRecord observables_from_distribution(const Distribution& P, const SystemParams& params)
{
    ObservablesRecord r = observables_from_distribution(P, params.chi());
    r.appendix_b_residual = appendix_b_residual(P, params);
    return r;
}

FixedMirrorReference fixed_mirror_reference(const SystemParams& p)
{
    const double half_kappa = 0.5 * p.kappa_a;
    const double mean = p.epsilon * p.epsilon / (p.delta * p.delta + half_kappa * half_kappa);
    return {mean, p.epsilon == 0.0 ? std::nullopt : std::optional<double>(1.0)};
}

double appendix_b_residual(const Distribution& P, const SystemParams& p)
{
    const double chi2 = p.chi() * p.chi();
    const double lhs = phonon_factorial_moment(P, p.chi(), 1);
    const double rhs = p.nbar + chi2 * (p.kappa_a / p.kappa_b) * photon_factorial_moment(P, 1) +
                       chi2 * photon_factorial_moment(P, 2);
    return std::abs(lhs - rhs);
}

} // namespace multiphonon
