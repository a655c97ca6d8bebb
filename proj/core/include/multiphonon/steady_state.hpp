// steady_state.hpp: Stationary states of Liouvillians: trace-constrained
// sparse direct solve, explicit time propagation, cutoff escalation.

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Sparse>

#include "multiphonon/liouvillian.hpp"
#include "multiphonon/observables.hpp"
#include "multiphonon/operators.hpp"
#include "multiphonon/params.hpp"

namespace multiphonon {

struct SolverOptions {
    double residual_tol{1e-9};      // relative to max(1, max|L_ij|)
    double positivity_floor{-1e-8};
    int refinement_steps{2};
};

enum class StateLayout { Full, PhononDiagonal };

struct SolveReport {
    StateLayout layout{StateLayout::Full};
    FockCutoffs cutoffs_used;
    DenseVector state;        // vec(rho), or phonon-diagonal coordinates
    double residual{0.0};     // ||L x||_2 after Hermitization and renormalization
    double min_eigenvalue{0.0};
    double wall_time{0.0};    // seconds

    // Product-basis diagonal, index n * (m_max + 1) + m.
    Eigen::VectorXd populations() const;
    DensityMatrix density_matrix() const;
};

class SolveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-unique stationary state; carries an estimate of the null-space dimension.
class DegenerateSteadyState : public SolveError {
public:
    DegenerateSteadyState(const std::string& what, Eigen::Index nullity)
        : SolveError(what), nullity_(nullity) {}
    Eigen::Index nullity_estimate() const noexcept { return nullity_; }

private:
    Eigen::Index nullity_;
};

// Solves L x = 0, tr x = 1 by replacing the (redundant) first population row
// with the trace functional.
SolveReport steady_state(const Superoperator& L, const FockCutoffs& cutoffs, const SolverOptions& options = {});
SolveReport steady_state(const ReducedGenerator& L, const SolverOptions& options = {});

struct Propagation {
    DenseVector state;
    double time{0.0};
    long steps{0};
    long rejected{0};
    double trace_drift{0.0}; // max |tr(x(t)) - tr(x(0))| over accepted steps
};

// Adaptive Dormand-Prince 5(4) integration of dx/dt = L x. `trace_weights`
// selects the entries summed into the trace. Throws SolveError on step-size underflow.
Propagation propagate_linear(const Eigen::SparseMatrix<Complex>& L,
                             const DenseVector& x0,
                             const Eigen::VectorXd& trace_weights,
                             double t_final,
                             double tol);

Propagation propagate(const Superoperator& L, const DenseMatrix& rho0, double t_final, double tol);
Propagation propagate(const ReducedGenerator& L, const DenseVector& coords0, double t_final, double tol);

Eigen::VectorXd trace_weights(const FockCutoffs& cutoffs);
Eigen::VectorXd trace_weights(const PhononDiagonalLayout& layout);

struct CutoffPolicy {
    FockCutoffs start{6, 12};
    int photon_step{2};
    int phonon_step{4};
    int max_rounds{8};
    SolverOptions solver{};
};

class ConvergenceError : public SolveError {
public:
    using SolveError::SolveError;
};

// Solves on the phonon-diagonal subspace at growing cutoffs until <n>, <m>,
// g2_a and g2_b all change by less than obs_tol (relative) between rounds.
SolveReport converge_cutoffs(const SystemParams& params,
                             ExpansionOrder order,
                             double obs_tol,
                             const CutoffPolicy& policy = {});

} // namespace multiphonon
