// liouvillian.hpp: Lab-frame and polaron-frame generators, and the reduced
// generator on the phonon-diagonal subspace.

#pragma once

#include <vector>

#include "multiphonon/operators.hpp"
#include "multiphonon/params.hpp"

namespace multiphonon {

// How the photon-loss anticommutator is closed in the truncated space.
//   TracePreserving: -(kappa_a/2){a^dag a (x) K, rho} with K from
//     secular_jump_normalization, so the truncated generator conserves trace
//     exactly. K = I except on the top phonon levels.
//   Literal: -(kappa_a/2){a^dag a, rho} as in the untruncated equation.
enum class LossClosure { TracePreserving, Literal };

struct GeneratorOptions {
    LossClosure closure{LossClosure::TracePreserving};
};

// rho' = -i[H, rho] + kappa_a D[a] + kappa_b (1 + nbar) D[b] + kappa_b nbar D[b^dag],
// H = Delta a^dag a + b^dag b + epsilon (a + a^dag) + g a^dag a (b + b^dag).
std::vector<SandwichTerm> full_liouvillian_terms(const SystemParams& params, const FockCutoffs& cutoffs);
Superoperator full_liouvillian(const SystemParams& params, const FockCutoffs& cutoffs);

// Polaron-frame Hamiltonian used by the secular generator:
// Delta a^dag a + b^dag b + epsilon (a + a^dag) F - chi^2 (a^dag a)^2,
// F = secular_exponent_operator(chi, N).
Operator transformed_hamiltonian(const SystemParams& params, const FockCutoffs& cutoffs, ExpansionOrder order);

std::vector<SandwichTerm> transformed_liouvillian_terms(const SystemParams& params,
                                                        const FockCutoffs& cutoffs,
                                                        ExpansionOrder order,
                                                        const GeneratorOptions& options = {});
Superoperator transformed_liouvillian(const SystemParams& params,
                                      const FockCutoffs& cutoffs,
                                      ExpansionOrder order,
                                      const GeneratorOptions& options = {});

// Coordinates x(n1, n2, m) = <n1, m| rho |n2, m>.
class PhononDiagonalLayout {
public:
    explicit PhononDiagonalLayout(FockCutoffs cutoffs);

    const FockCutoffs& cutoffs() const noexcept { return cutoffs_; }
    Eigen::Index size() const noexcept { return size_; }

    Eigen::Index index(int n1, int n2, int m) const noexcept
    {
        return (static_cast<Eigen::Index>(n2) * nd_ + n1) * md_ + m;
    }
    bool is_population(Eigen::Index i) const noexcept;

    // Embedding into / projection from column-major vec(rho) on the full space.
    DenseVector expand(const DenseVector& coords) const;
    DenseVector restrict(const DenseVector& full_vec) const;
    DenseMatrix to_matrix(const DenseVector& coords) const;

private:
    FockCutoffs cutoffs_;
    Eigen::Index nd_;
    Eigen::Index md_;
    Eigen::Index size_;
};

struct ReducedGenerator {
    PhononDiagonalLayout layout;
    Eigen::SparseMatrix<Complex> matrix;
};

// Restricts sum_k coeff_k A_k rho B_k to the phonon-diagonal subspace.
// Throws std::invalid_argument if a term maps a phonon-diagonal state outside it.
ReducedGenerator restrict_to_phonon_diagonal(const std::vector<SandwichTerm>& terms, const FockCutoffs& cutoffs);

ReducedGenerator phonon_diagonal_generator(const SystemParams& params,
                                           const FockCutoffs& cutoffs,
                                           ExpansionOrder order,
                                           const GeneratorOptions& options = {});

// max_j |sum over population rows of L(i, j)|
double trace_defect(const ReducedGenerator& L);

struct GeneratorBundle {
    Superoperator full;
    Superoperator transformed;
    ReducedGenerator reduced;
    SystemParams params;
    FockCutoffs cutoffs;
    ExpansionOrder order;
};

// Builds all three generators; the two full-space ones scale as D^2 and are
// meant for modest cutoffs.
GeneratorBundle build_generators(const SystemParams& params,
                                 const FockCutoffs& cutoffs,
                                 ExpansionOrder order,
                                 const GeneratorOptions& options = {});

} // namespace multiphonon
