#include "multiphonon/steady_state.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SparseLU>
#include <Eigen/SparseQR>
#ifdef MULTIPHONON_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

namespace multiphonon {

namespace {

using SparseMatrix = Eigen::SparseMatrix<Complex>;
using Clock = std::chrono::steady_clock;

Eigen::Index nullity_estimate(const SparseMatrix& L)
{
    if (L.nonZeros() == 0) return L.cols();
    Eigen::SparseQR<SparseMatrix, Eigen::COLAMDOrdering<int>> qr;
    qr.setPivotThreshold(1e-10 * std::max(1.0, max_abs(L)));
    qr.compute(L);
    if (qr.info() != Eigen::Success) return -1;
    return L.cols() - qr.rank();
}

// Solves L x = 0 with sum_i w_i x_i = 1, the weights replacing row `pinned`.
DenseVector constrained_null_vector(const SparseMatrix& L, const Eigen::VectorXd& weights, Eigen::Index pinned,
                                    int refinement_steps)
{
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(static_cast<std::size_t>(L.nonZeros() + weights.size()));
    for (Eigen::Index j = 0; j < L.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(L, j); it; ++it) {
            if (it.row() != pinned) triplets.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (weights(i) != 0.0) triplets.emplace_back(pinned, i, Complex{weights(i)});
    }
    SparseMatrix A(L.rows(), L.cols());
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();

#ifdef MULTIPHONON_HAVE_UMFPACK
    Eigen::UmfPackLU<SparseMatrix> lu;
    lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
    lu.umfpackControl()(UMFPACK_ORDERING) = UMFPACK_ORDERING_METIS;
    {
        // METIS keeps global random state; concurrent orderings are not reproducible.
        static std::mutex ordering_mutex;
        const std::lock_guard lock(ordering_mutex);
        lu.analyzePattern(A);
    }
    lu.factorize(A);
    const bool factored = lu.info() == Eigen::Success;
    const std::string detail = "UMFPACK factorization failed";
#else
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    const bool factored = lu.info() == Eigen::Success;
    const std::string detail = lu.lastErrorMessage();
#endif
    if (!factored) {
        const Eigen::Index nullity = nullity_estimate(L);
        std::ostringstream msg;
        msg << "steady state is not unique: trace-constrained system is singular (" << detail
            << "); estimated null-space dimension " << nullity;
        throw DegenerateSteadyState(msg.str(), nullity);
    }

    DenseVector rhs = DenseVector::Zero(L.rows());
    rhs(pinned) = 1.0;
    DenseVector x = lu.solve(rhs);
    for (int s = 0; s < refinement_steps; ++s) {
        const DenseVector r = rhs - A * x;
        x += lu.solve(r);
    }
    if (!x.allFinite()) throw DegenerateSteadyState("steady state solve produced non-finite values", -1);
    return x;
}

void check_report(const SolveReport& report, const SparseMatrix& L, const SolverOptions& options)
{
    const double scale = std::max(1.0, max_abs(L));
    if (!(report.residual <= options.residual_tol * scale)) {
        std::ostringstream msg;
        msg << "steady-state residual " << report.residual << " exceeds tolerance " << options.residual_tol * scale
            << " (dimension " << L.rows() << ", max|L| " << max_abs(L) << ")";
        throw SolveError(msg.str());
    }
    if (report.min_eigenvalue < options.positivity_floor) {
        std::ostringstream msg;
        msg << "steady state has eigenvalue " << report.min_eigenvalue << " below the positivity floor "
            << options.positivity_floor;
        throw SolveError(msg.str());
    }
}

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

Eigen::VectorXd trace_weights(const FockCutoffs& cutoffs)
{
    const Eigen::Index d = cutoffs.dim();
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d * d);
    for (Eigen::Index i = 0; i < d; ++i) w(i * (d + 1)) = 1.0;
    return w;
}

Eigen::VectorXd trace_weights(const PhononDiagonalLayout& layout)
{
    Eigen::VectorXd w = Eigen::VectorXd::Zero(layout.size());
    for (Eigen::Index i = 0; i < layout.size(); ++i) w(i) = layout.is_population(i) ? 1.0 : 0.0;
    return w;
}

Eigen::VectorXd SolveReport::populations() const
{
    const FockCutoffs& c = cutoffs_used;
    Eigen::VectorXd pops(c.dim());
    if (layout == StateLayout::Full) {
        const Eigen::Index d = c.dim();
        for (Eigen::Index i = 0; i < d; ++i) pops(i) = state(i * (d + 1)).real();
    } else {
        const PhononDiagonalLayout l(c);
        for (int n = 0; n <= c.n_max; ++n)
            for (int m = 0; m <= c.m_max; ++m) pops(c.index(n, m)) = state(l.index(n, n, m)).real();
    }
    return pops;
}

DensityMatrix SolveReport::density_matrix() const
{
    if (layout == StateLayout::Full) return DensityMatrix(unvec(state));
    return DensityMatrix(PhononDiagonalLayout(cutoffs_used).to_matrix(state));
}

SolveReport steady_state(const Superoperator& L, const FockCutoffs& cutoffs, const SolverOptions& options)
{
    const auto start = Clock::now();
    const Eigen::Index d = cutoffs.dim();
    if (L.rows() != d * d || L.cols() != d * d) throw std::invalid_argument("steady_state: generator does not match cutoffs");

    DenseVector x = constrained_null_vector(L, trace_weights(cutoffs), 0, options.refinement_steps);
    DenseMatrix rho = unvec(x);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    SolveReport report;
    report.layout = StateLayout::Full;
    report.cutoffs_used = cutoffs;
    report.state = vec(rho);
    report.residual = (L * report.state).norm();
    report.min_eigenvalue = min_hermitian_eigenvalue(rho);
    report.wall_time = seconds_since(start);
    check_report(report, L, options);
    return report;
}

SolveReport steady_state(const ReducedGenerator& L, const SolverOptions& options)
{
    const auto start = Clock::now();
    const auto& layout = L.layout;
    const FockCutoffs& c = layout.cutoffs();

    DenseVector x = constrained_null_vector(L.matrix, trace_weights(layout), layout.index(0, 0, 0),
                                            options.refinement_steps);
    DenseVector h(x.size());
    for (int n2 = 0; n2 <= c.n_max; ++n2)
        for (int n1 = 0; n1 <= c.n_max; ++n1)
            for (int m = 0; m <= c.m_max; ++m)
                h(layout.index(n1, n2, m)) = 0.5 * (x(layout.index(n1, n2, m)) + std::conj(x(layout.index(n2, n1, m))));
    double trace = 0.0;
    for (Eigen::Index i = 0; i < h.size(); ++i)
        if (layout.is_population(i)) trace += h(i).real();
    h /= trace;

    SolveReport report;
    report.layout = StateLayout::PhononDiagonal;
    report.cutoffs_used = c;
    report.state = h;
    report.residual = (L.matrix * h).norm();

    // rho_bar is block diagonal in the phonon number.
    double lowest = std::numeric_limits<double>::infinity();
    DenseMatrix block(c.photon_dim(), c.photon_dim());
    for (int m = 0; m <= c.m_max; ++m) {
        for (int n2 = 0; n2 <= c.n_max; ++n2)
            for (int n1 = 0; n1 <= c.n_max; ++n1) block(n1, n2) = h(layout.index(n1, n2, m));
        lowest = std::min(lowest, min_hermitian_eigenvalue(block));
    }
    report.min_eigenvalue = lowest;
    report.wall_time = seconds_since(start);
    check_report(report, L.matrix, options);
    return report;
}

Propagation propagate_linear(const Eigen::SparseMatrix<Complex>& L,
                             const DenseVector& x0,
                             const Eigen::VectorXd& weights,
                             double t_final,
                             double tol)
{
    if (!(t_final > 0.0)) throw std::invalid_argument("propagate: t_final must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("propagate: tol must be > 0");
    if (L.cols() != x0.size() || weights.size() != x0.size()) throw std::invalid_argument("propagate: dimension mismatch");

    // Dormand-Prince 5(4) tableau
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    const auto trace_of = [&](const DenseVector& v) { return (weights.cast<Complex>().array() * v.array()).sum(); };

    Propagation out;
    DenseVector x = x0;
    const Complex trace0 = trace_of(x0);
    double t = 0.0;
    double h = std::min(t_final, 0.1 / std::max(1.0, max_abs(L)));
    const double h_min = 1e-13 * std::max(1.0, t_final);

    DenseVector k1 = L * x, k2, k3, k4, k5, k6, k7, y;
    while (t < t_final) {
        h = std::min(h, t_final - t);
        k2 = L * (x + h * a21 * k1);
        k3 = L * (x + h * (a31 * k1 + a32 * k2));
        k4 = L * (x + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = L * (x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = L * (x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = L * y;
        const DenseVector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double scale = tol + tol * std::max(std::abs(x(i)), std::abs(y(i)));
            err_norm = std::max(err_norm, std::abs(err(i)) / scale);
        }

        if (err_norm <= 1.0) {
            t += h;
            x.swap(y);
            k1.swap(k7); // FSAL
            ++out.steps;
            out.trace_drift = std::max(out.trace_drift, std::abs(trace_of(x) - trace0));
        } else {
            ++out.rejected;
        }
        const double factor = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        h *= factor;
        if (t < t_final && h < h_min) {
            std::ostringstream msg;
            msg << "propagate: step size underflow at t = " << t << " (h = " << h << ")";
            throw SolveError(msg.str());
        }
    }
    out.state = std::move(x);
    out.time = t;
    return out;
}

Propagation propagate(const Superoperator& L, const DenseMatrix& rho0, double t_final, double tol)
{
    const Eigen::Index d = rho0.rows();
    if (L.rows() != d * d) throw std::invalid_argument("propagate: generator does not match state");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d * d);
    for (Eigen::Index i = 0; i < d; ++i) w(i * (d + 1)) = 1.0;
    return propagate_linear(L, vec(rho0), w, t_final, tol);
}

Propagation propagate(const ReducedGenerator& L, const DenseVector& coords0, double t_final, double tol)
{
    return propagate_linear(L.matrix, coords0, trace_weights(L.layout), t_final, tol);
}

namespace {

double relative_change(double now, double before)
{
    const double scale = std::max(std::abs(now), 1e-300);
    return std::abs(now - before) / scale;
}

double relative_change(const std::optional<double>& now, const std::optional<double>& before)
{
    if (!now && !before) return 0.0;
    if (!now || !before) return std::numeric_limits<double>::infinity();
    return relative_change(*now, *before);
}

} // namespace

SolveReport converge_cutoffs(const SystemParams& params,
                             ExpansionOrder order,
                             double obs_tol,
                             const CutoffPolicy& policy)
{
    require_well_formed(params);
    require_valid(policy.start);
    if (policy.max_rounds < 2) throw std::invalid_argument("converge_cutoffs: max_rounds must be >= 2");
    if (!(obs_tol >= 0.0)) throw std::invalid_argument("converge_cutoffs: obs_tol must be >= 0");

    FockCutoffs cutoffs = policy.start;
    const SolveReport first = steady_state(phonon_diagonal_generator(params, cutoffs, order), policy.solver);
    ObservablesRecord prev_obs =
        observables_from_distribution(distribution_from_populations(first.populations(), cutoffs), params.chi());

    std::ostringstream drift;
    for (int round = 2; round <= policy.max_rounds; ++round) {
        cutoffs.n_max += policy.photon_step;
        cutoffs.m_max += policy.phonon_step;
        SolveReport current = steady_state(phonon_diagonal_generator(params, cutoffs, order), policy.solver);
        const ObservablesRecord obs =
            observables_from_distribution(distribution_from_populations(current.populations(), cutoffs), params.chi());

        const double change = std::max({relative_change(obs.mean_photon, prev_obs.mean_photon),
                                        relative_change(obs.mean_phonon, prev_obs.mean_phonon),
                                        relative_change(obs.g2_a, prev_obs.g2_a),
                                        relative_change(obs.g2_b, prev_obs.g2_b)});
        drift << "  (" << cutoffs.n_max << ", " << cutoffs.m_max << "): max relative change " << change << '\n';
        if (change < obs_tol) return current;
        prev_obs = obs;
    }
    throw ConvergenceError("cutoffs did not converge to relative tolerance " + std::to_string(obs_tol) + " within " +
                           std::to_string(policy.max_rounds) + " rounds:\n" + drift.str());
}

} // namespace multiphonon
