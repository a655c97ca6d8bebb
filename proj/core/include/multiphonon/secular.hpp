// secular.hpp: Secular (time-independent) multiphonon terms of the
// polaron-frame master equation, truncated at chi^(2N).
//
// The exponentials exp[+-chi(b - b^dagger)] are expanded in chi, every power
// (b^dagger - b)^n is rewritten in anti-normal order b^r b^dagger^(k-r), and
// only terms whose net phonon-number change vanishes are kept. Operator words
// are materialized directly as truncated matrices; no normal ordering is done.

#pragma once

#include <memory>
#include <vector>

#include "multiphonon/operators.hpp"
#include "multiphonon/params.hpp"

namespace multiphonon {

// b^lowering b^dagger^raising
struct PhononWord {
    int lowering{0};
    int raising{0};

    int length() const noexcept { return lowering + raising; }
    // Net change of the phonon number when the word acts on a ket.
    int shift() const noexcept { return raising - lowering; }
    friend bool operator==(const PhononWord&, const PhononWord&) = default;
};

Operator materialize(const PhononWord& word, int phonon_dim);

// One anti-normal-ordered piece of (b^dagger - b)^n / n!:
// weight * b^r b^dagger^(k-r), where k has the parity of n and (n-k)/2
// commutator contractions were taken.
struct OrderedPiece {
    int k;
    int r;
    double weight;
};

std::vector<OrderedPiece> ordered_power_expansion(int n);

// One term of exp[chi(b-b^dag)] a rho a^dag exp[-chi(b-b^dag)]:
// coeff(chi) * left_word * (a rho a^dag) * right_word.
struct TermDescriptor {
    int n1, n2, k1, k2, r1, r2;
    double weight; // chi-free part of the coefficient, sign included

    int order() const noexcept { return n1 + n2; }
    double coeff(double chi) const;
    PhononWord left_word() const noexcept { return {r1, k1 - r1}; }
    PhononWord right_word() const noexcept { return {r2, k2 - r2}; }
};

// Every tuple with n1 + n2 <= 2N obeying the parity constraint and
// k1 - 2 r1 + k2 - 2 r2 = 0, in lexicographic (n1, n2, k1, k2, r1, r2) order.
std::vector<TermDescriptor> enumerate_damping_terms(ExpansionOrder order);

// Same list, memoized per order (thread-safe).
std::shared_ptr<const std::vector<TermDescriptor>> cached_damping_terms(ExpansionOrder order);

// Secular part of exp[+-chi(b - b^dagger)] up to chi^(2N); phonon-diagonal,
// with the untruncated diagonal elements at every level including the top.
Operator secular_exponent_operator(double chi, ExpansionOrder order, int m_max);

// Terms of the secular photon-jump map on the product space, collected per
// distinct (left word, right word) pair.
std::vector<SandwichTerm> secular_damping_terms(double chi, ExpansionOrder order, const FockCutoffs& cutoffs);

Superoperator secular_damping_superop(double chi, ExpansionOrder order, const FockCutoffs& cutoffs);

// Phonon operator K with tr[jump(rho)] = tr[(a^dag a (x) K) rho]; K = I apart
// from the top phonon levels, where the truncated words lose the cancellation.
Operator secular_jump_normalization(double chi, ExpansionOrder order, int m_max);

// Term-by-term transcription of the chi^4 expansion of the photon jump map.
Superoperator chi4_reference_superop(double chi, const FockCutoffs& cutoffs);

} // namespace multiphonon
