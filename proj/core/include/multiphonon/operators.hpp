// operators.hpp: Truncated Fock-space operators, superoperator builders and
// the photon-number-conditioned displacement (polaron) transform.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "multiphonon/params.hpp"

namespace multiphonon {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using DenseVector = Eigen::VectorXcd;

// Operators on a single mode or on the photon x phonon product space.
using Operator = Eigen::SparseMatrix<Complex>;
// Acts on column-major vec(rho): vec(rho)[i + j*D] = rho(i, j).
using Superoperator = Eigen::SparseMatrix<Complex>;

enum class Subsystem { Photon, Phonon };

Operator identity(int dim);
// A(k-1, k) = sqrt(k). Throws for dim < 1.
Operator annihilation(int dim);
Operator creation(int dim);
Operator number(int dim);

// Kronecker embedding into the product space, photon index slow.
Operator embed(const Operator& op, Subsystem subsystem, const FockCutoffs& cutoffs);

// Map rho -> A rho B, i.e. (B^T kron A) on vec(rho).
Superoperator superop_sandwich(const Operator& A, const Operator& B);
Superoperator superop_left(const Operator& A);
Superoperator superop_right(const Operator& B);

DenseVector vec(const DenseMatrix& rho);
DenseMatrix unvec(const DenseVector& v);

DenseMatrix apply(const Superoperator& L, const DenseMatrix& rho);

// max_j |sum_i L(i*(D+1), j)|: how far tr(L rho) is from zero for arbitrary rho.
double trace_defect(const Superoperator& L);

double max_abs(const Operator& A);
double max_abs(const DenseMatrix& A);

// Hermitian, unit-trace, positive (within tolerances) state on a product space.
class DensityMatrix {
public:
    static constexpr double trace_tolerance = 1e-12;
    static constexpr double hermiticity_tolerance = 1e-12;
    static constexpr double positivity_floor = -1e-8;

    // Validates the invariants and throws std::domain_error if one fails.
    explicit DensityMatrix(DenseMatrix rho);

    // Hermitizes as (rho + rho^dagger)/2 and rescales to unit trace before validating.
    static DensityMatrix normalized(const DenseMatrix& rho);

    const DenseMatrix& matrix() const noexcept { return rho_; }
    Eigen::Index dim() const noexcept { return rho_.rows(); }
    double min_eigenvalue() const;

private:
    DenseMatrix rho_;
};

double min_hermitian_eigenvalue(const DenseMatrix& h);

struct PolaronTransform {
    Operator unitary;         // exp[chi a^dagger a (b - b^dagger)] on the product space
    double unitarity_defect;  // max |U^dagger U - I|
};

// Built block by block: photon block n is the phonon displacement
// exp[chi n (b - b^dagger)] from a dense exponential of the truncated generator.
PolaronTransform polaron_unitary(double chi, const FockCutoffs& cutoffs);

// Lab-frame state -> polaron frame: U^dagger rho U.
DenseMatrix to_polaron_frame(const DenseMatrix& rho, const Operator& unitary);

} // namespace multiphonon

namespace multiphonon {

// coeff * left * rho * right
struct SandwichTerm {
    Complex coeff;
    Operator left;
    Operator right;
};

Superoperator assemble_superoperator(const std::vector<SandwichTerm>& terms);

} // namespace multiphonon
