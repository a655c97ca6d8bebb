#include "multiphonon/liouvillian.hpp"

#include <cmath>
#include <stdexcept>

#include "multiphonon/secular.hpp"

namespace multiphonon {

namespace {

constexpr Complex I{0.0, 1.0};

void push_hamiltonian(std::vector<SandwichTerm>& terms, const Operator& H)
{
    const Operator one = identity(static_cast<int>(H.rows()));
    terms.push_back({-I, H, one});
    terms.push_back({I, one, H});
}

// rate * (X rho X^dag - 1/2 {X^dag X, rho})
void push_dissipator(std::vector<SandwichTerm>& terms, double rate, const Operator& X)
{
    if (rate == 0.0) return;
    const Operator Xd = X.adjoint();
    const Operator XdX = Xd * X;
    const Operator one = identity(static_cast<int>(X.rows()));
    terms.push_back({Complex{rate}, X, Xd});
    terms.push_back({Complex{-0.5 * rate}, XdX, one});
    terms.push_back({Complex{-0.5 * rate}, one, XdX});
}

struct ModeOperators {
    Operator a, ad, n, b, bd, nb;

    explicit ModeOperators(const FockCutoffs& c)
    {
        a = embed(annihilation(c.photon_dim()), Subsystem::Photon, c);
        ad = a.adjoint();
        n = embed(number(c.photon_dim()), Subsystem::Photon, c);
        b = embed(annihilation(c.phonon_dim()), Subsystem::Phonon, c);
        bd = b.adjoint();
        nb = embed(number(c.phonon_dim()), Subsystem::Phonon, c);
    }
};

} // namespace

std::vector<SandwichTerm> full_liouvillian_terms(const SystemParams& p, const FockCutoffs& c)
{
    require_well_formed(p);
    require_valid(c);
    const ModeOperators ops(c);

    Operator H = p.delta * ops.n + ops.nb;
    if (p.epsilon != 0.0) H += p.epsilon * Operator(ops.a + ops.ad);
    if (p.g != 0.0) H += p.g * Operator(ops.n * Operator(ops.b + ops.bd));
    H.prune(Complex{0.0});

    std::vector<SandwichTerm> terms;
    push_hamiltonian(terms, H);
    push_dissipator(terms, p.kappa_a, ops.a);
    push_dissipator(terms, p.kappa_b * (1.0 + p.nbar), ops.b);
    push_dissipator(terms, p.kappa_b * p.nbar, ops.bd);
    return terms;
}

Superoperator full_liouvillian(const SystemParams& p, const FockCutoffs& c)
{
    return assemble_superoperator(full_liouvillian_terms(p, c));
}

Operator transformed_hamiltonian(const SystemParams& p, const FockCutoffs& c, ExpansionOrder order)
{
    require_well_formed(p);
    require_valid(c);
    const ModeOperators ops(c);
    const double chi = p.chi();

    Operator H = p.delta * ops.n + ops.nb;
    if (p.epsilon != 0.0) {
        const Operator F = embed(secular_exponent_operator(chi, order, c.m_max), Subsystem::Phonon, c);
        H += p.epsilon * Operator(Operator(ops.a + ops.ad) * F);
    }
    if (chi != 0.0) H -= (chi * chi) * Operator(ops.n * ops.n);
    H.prune(Complex{0.0});
    return H;
}

std::vector<SandwichTerm> transformed_liouvillian_terms(const SystemParams& p,
                                                        const FockCutoffs& c,
                                                        ExpansionOrder order,
                                                        const GeneratorOptions& options)
{
    const ModeOperators ops(c);
    const double chi = p.chi();

    std::vector<SandwichTerm> terms;
    push_hamiltonian(terms, transformed_hamiltonian(p, c, order));

    // Photon loss: kappa_a * jump(rho) - kappa_a/2 {a^dag a (x) K, rho}
    for (auto& jump : secular_damping_terms(chi, order, c)) {
        jump.coeff *= p.kappa_a;
        terms.push_back(std::move(jump));
    }
    Operator loss = ops.n;
    if (options.closure == LossClosure::TracePreserving) {
        loss = ops.n * embed(secular_jump_normalization(chi, order, c.m_max), Subsystem::Phonon, c);
    }
    const Operator one = identity(c.dim());
    terms.push_back({Complex{-0.5 * p.kappa_a}, loss, one});
    terms.push_back({Complex{-0.5 * p.kappa_a}, one, loss});

    // Phonon damping with the chi^2 photon-number dephasing it induces.
    push_dissipator(terms, p.kappa_b * (1.0 + p.nbar), ops.b);
    push_dissipator(terms, p.kappa_b * p.nbar, ops.bd);
    push_dissipator(terms, p.kappa_b * (1.0 + 2.0 * p.nbar) * chi * chi, ops.n);
    return terms;
}

Superoperator transformed_liouvillian(const SystemParams& p,
                                      const FockCutoffs& c,
                                      ExpansionOrder order,
                                      const GeneratorOptions& options)
{
    return assemble_superoperator(transformed_liouvillian_terms(p, c, order, options));
}

PhononDiagonalLayout::PhononDiagonalLayout(FockCutoffs cutoffs)
    : cutoffs_(cutoffs), nd_(cutoffs.photon_dim()), md_(cutoffs.phonon_dim()), size_(nd_ * nd_ * md_)
{
    require_valid(cutoffs_);
}

bool PhononDiagonalLayout::is_population(Eigen::Index i) const noexcept
{
    const Eigen::Index pair = i / md_;
    return pair % nd_ == pair / nd_;
}

DenseVector PhononDiagonalLayout::expand(const DenseVector& coords) const
{
    if (coords.size() != size_) throw std::invalid_argument("expand: coordinate length mismatch");
    const Eigen::Index d = cutoffs_.dim();
    DenseVector full = DenseVector::Zero(d * d);
    for (int n2 = 0; n2 < nd_; ++n2)
        for (int n1 = 0; n1 < nd_; ++n1)
            for (int m = 0; m < md_; ++m)
                full(cutoffs_.index(n1, m) + d * cutoffs_.index(n2, m)) = coords(index(n1, n2, m));
    return full;
}

DenseVector PhononDiagonalLayout::restrict(const DenseVector& full_vec) const
{
    const Eigen::Index d = cutoffs_.dim();
    if (full_vec.size() != d * d) throw std::invalid_argument("restrict: vector length mismatch");
    DenseVector coords(size_);
    for (int n2 = 0; n2 < nd_; ++n2)
        for (int n1 = 0; n1 < nd_; ++n1)
            for (int m = 0; m < md_; ++m)
                coords(index(n1, n2, m)) = full_vec(cutoffs_.index(n1, m) + d * cutoffs_.index(n2, m));
    return coords;
}

DenseMatrix PhononDiagonalLayout::to_matrix(const DenseVector& coords) const
{
    return unvec(expand(coords));
}

ReducedGenerator restrict_to_phonon_diagonal(const std::vector<SandwichTerm>& terms, const FockCutoffs& c)
{
    PhononDiagonalLayout layout(c);
    const int md = c.phonon_dim();
    const int nd = c.photon_dim();

    std::vector<Eigen::Triplet<Complex>> triplets;
    double leak = 0.0;
    for (const auto& term : terms) {
        if (term.coeff == Complex{}) continue;
        const Operator& A = term.left;
        const Operator Bt = term.right.transpose(); // column j of Bt is row j of B
        for (int n2 = 0; n2 < nd; ++n2) {
            for (int n1 = 0; n1 < nd; ++n1) {
                for (int m = 0; m < md; ++m) {
                    const Eigen::Index col = layout.index(n1, n2, m);
                    for (Operator::InnerIterator ia(A, c.index(n1, m)); ia; ++ia) {
                        const auto i = static_cast<int>(ia.row());
                        for (Operator::InnerIterator ib(Bt, c.index(n2, m)); ib; ++ib) {
                            const auto j = static_cast<int>(ib.row());
                            const Complex v = term.coeff * ia.value() * ib.value();
                            if (i % md != j % md) {
                                leak = std::max(leak, std::abs(v));
                                continue;
                            }
                            triplets.emplace_back(layout.index(i / md, j / md, i % md), col, v);
                        }
                    }
                }
            }
        }
    }
    if (leak > 0.0) {
        throw std::invalid_argument("generator couples phonon-diagonal states to phonon coherences (max entry " +
                                    std::to_string(leak) + ")");
    }
    Eigen::SparseMatrix<Complex> M(layout.size(), layout.size());
    M.setFromTriplets(triplets.begin(), triplets.end());
    M.prune(Complex{0.0});
    M.makeCompressed();
    return {layout, std::move(M)};
}

ReducedGenerator phonon_diagonal_generator(const SystemParams& p,
                                           const FockCutoffs& c,
                                           ExpansionOrder order,
                                           const GeneratorOptions& options)
{
    return restrict_to_phonon_diagonal(transformed_liouvillian_terms(p, c, order, options), c);
}

double trace_defect(const ReducedGenerator& L)
{
    Eigen::VectorXcd sums = Eigen::VectorXcd::Zero(L.matrix.cols());
    for (Eigen::Index j = 0; j < L.matrix.outerSize(); ++j) {
        for (Eigen::SparseMatrix<Complex>::InnerIterator it(L.matrix, j); it; ++it) {
            if (L.layout.is_population(it.row())) sums(j) += it.value();
        }
    }
    return sums.size() == 0 ? 0.0 : sums.cwiseAbs().maxCoeff();
}

GeneratorBundle build_generators(const SystemParams& p,
                                 const FockCutoffs& c,
                                 ExpansionOrder order,
                                 const GeneratorOptions& options)
{
    const auto transformed_terms = transformed_liouvillian_terms(p, c, order, options);
    return GeneratorBundle{full_liouvillian(p, c),
                           assemble_superoperator(transformed_terms),
                           restrict_to_phonon_diagonal(transformed_terms, c),
                           p,
                           c,
                           order};
}

} // namespace multiphonon
