#include "multiphonon/operators.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace multiphonon {

namespace {

using Triplet = Eigen::Triplet<Complex>;

Operator diagonal(int dim, auto&& entry)
{
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k) {
        const Complex v = entry(k);
        if (v != Complex{}) t.emplace_back(k, k, v);
    }
    Operator op(dim, dim);
    op.setFromTriplets(t.begin(), t.end());
    return op;
}

void require_dim(int dim)
{
    if (dim < 1) throw std::invalid_argument("operator dimension must be >= 1");
}

} // namespace

Operator identity(int dim)
{
    require_dim(dim);
    return diagonal(dim, [](int) { return Complex{1.0}; });
}

Operator annihilation(int dim)
{
    require_dim(dim);
    std::vector<Triplet> t;
    for (int k = 1; k < dim; ++k) t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
    Operator a(dim, dim);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

Operator creation(int dim)
{
    return Operator(annihilation(dim).adjoint());
}

Operator number(int dim)
{
    require_dim(dim);
    return diagonal(dim, [](int k) { return Complex{static_cast<double>(k)}; });
}

Operator embed(const Operator& op, Subsystem subsystem, const FockCutoffs& cutoffs)
{
    require_valid(cutoffs);
    const int expected = subsystem == Subsystem::Photon ? cutoffs.photon_dim() : cutoffs.phonon_dim();
    if (op.rows() != expected || op.cols() != expected) {
        throw std::invalid_argument("embed: operator dimension " + std::to_string(op.rows()) +
                                    " does not match subsystem dimension " + std::to_string(expected));
    }
    Operator out;
    if (subsystem == Subsystem::Photon) {
        out = Eigen::kroneckerProduct(op, identity(cutoffs.phonon_dim()));
    } else {
        out = Eigen::kroneckerProduct(identity(cutoffs.photon_dim()), op);
    }
    out.makeCompressed();
    return out;
}

Superoperator superop_sandwich(const Operator& A, const Operator& B)
{
    if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows()) {
        throw std::invalid_argument("superop_sandwich: operands must be square with equal dimension");
    }
    Superoperator out = Eigen::kroneckerProduct(Operator(B.transpose()), A);
    out.makeCompressed();
    return out;
}

Superoperator superop_left(const Operator& A)
{
    return superop_sandwich(A, identity(static_cast<int>(A.rows())));
}

Superoperator superop_right(const Operator& B)
{
    return superop_sandwich(identity(static_cast<int>(B.rows())), B);
}

DenseVector vec(const DenseMatrix& rho)
{
    return Eigen::Map<const DenseVector>(rho.data(), rho.size());
}

DenseMatrix unvec(const DenseVector& v)
{
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) throw std::invalid_argument("unvec: length is not a perfect square");
    return Eigen::Map<const DenseMatrix>(v.data(), d, d);
}

DenseMatrix apply(const Superoperator& L, const DenseMatrix& rho)
{
    if (L.cols() != rho.size()) throw std::invalid_argument("apply: dimension mismatch");
    return unvec(L * vec(rho));
}

double trace_defect(const Superoperator& L)
{
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(L.rows()))));
    if (d * d != L.rows()) throw std::invalid_argument("trace_defect: not a superoperator");
    Eigen::VectorXcd column_sums = Eigen::VectorXcd::Zero(L.cols());
    for (Eigen::Index j = 0; j < L.outerSize(); ++j) {
        for (Superoperator::InnerIterator it(L, j); it; ++it) {
            if (it.row() % (d + 1) == 0) column_sums(j) += it.value();
        }
    }
    return column_sums.size() == 0 ? 0.0 : column_sums.cwiseAbs().maxCoeff();
}

double max_abs(const Operator& A)
{
    double m = 0.0;
    for (Eigen::Index j = 0; j < A.outerSize(); ++j) {
        for (Operator::InnerIterator it(A, j); it; ++it) m = std::max(m, std::abs(it.value()));
    }
    return m;
}

double max_abs(const DenseMatrix& A)
{
    return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

double min_hermitian_eigenvalue(const DenseMatrix& h)
{
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

DensityMatrix::DensityMatrix(DenseMatrix rho) : rho_(std::move(rho))
{
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
        throw std::domain_error("density matrix must be square and non-empty");
    }
    if (!rho_.allFinite()) throw std::domain_error("density matrix has non-finite entries");
    const double trace_err = std::abs(rho_.trace() - Complex{1.0});
    if (trace_err > trace_tolerance) {
        throw std::domain_error("density matrix trace deviates from 1 by " + std::to_string(trace_err));
    }
    const double herm_err = max_abs(DenseMatrix(rho_ - rho_.adjoint()));
    if (herm_err > hermiticity_tolerance) {
        throw std::domain_error("density matrix is not Hermitian (defect " + std::to_string(herm_err) + ")");
    }
    const double lowest = min_eigenvalue();
    if (lowest < positivity_floor) {
        throw std::domain_error("density matrix has eigenvalue " + std::to_string(lowest) +
                                " below the positivity floor");
    }
}

DensityMatrix DensityMatrix::normalized(const DenseMatrix& rho)
{
    DenseMatrix h = 0.5 * (rho + rho.adjoint());
    const Complex tr = h.trace();
    if (std::abs(tr) == 0.0) throw std::domain_error("cannot normalize a traceless matrix");
    h /= tr.real();
    return DensityMatrix(std::move(h));
}

double DensityMatrix::min_eigenvalue() const
{
    return min_hermitian_eigenvalue(rho_);
}

PolaronTransform polaron_unitary(double chi, const FockCutoffs& cutoffs)
{
    require_valid(cutoffs);
    if (!std::isfinite(chi)) throw std::invalid_argument("polaron_unitary: chi is not finite");

    const int phonons = cutoffs.phonon_dim();
    const DenseMatrix b = DenseMatrix(annihilation(phonons));
    const DenseMatrix generator = b - b.adjoint();

    std::vector<Triplet> t;
    double defect = 0.0;
    const DenseMatrix eye = DenseMatrix::Identity(phonons, phonons);
    for (int n = 0; n <= cutoffs.n_max; ++n) {
        const DenseMatrix block = (chi * static_cast<double>(n) * generator).exp();
        defect = std::max(defect, max_abs(DenseMatrix(block.adjoint() * block - eye)));
        for (int j = 0; j < phonons; ++j) {
            for (int i = 0; i < phonons; ++i) {
                if (block(i, j) != Complex{}) t.emplace_back(cutoffs.index(n, i), cutoffs.index(n, j), block(i, j));
            }
        }
    }
    Operator U(cutoffs.dim(), cutoffs.dim());
    U.setFromTriplets(t.begin(), t.end());
    return {std::move(U), defect};
}

DenseMatrix to_polaron_frame(const DenseMatrix& rho, const Operator& unitary)
{
    const DenseMatrix U = DenseMatrix(unitary);
    return U.adjoint() * rho * U;
}

} // namespace multiphonon

namespace multiphonon {

Superoperator assemble_superoperator(const std::vector<SandwichTerm>& terms)
{
    if (terms.empty()) throw std::invalid_argument("assemble_superoperator: no terms");
    const auto d = terms.front().left.rows();
    Superoperator L(d * d, d * d);
    for (const auto& term : terms) {
        if (term.coeff == Complex{}) continue;
        L += term.coeff * superop_sandwich(term.left, term.right);
    }
    L.makeCompressed();
    return L;
}

} // namespace multiphonon
