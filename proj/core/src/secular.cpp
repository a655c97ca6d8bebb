#include "multiphonon/secular.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace multiphonon {

namespace {

double factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

double binomial(int n, int k)
{
    return factorial(n) / (factorial(k) * factorial(n - k));
}

void require_order(ExpansionOrder order)
{
    if (order.value < 0) throw std::invalid_argument("expansion order must be >= 0");
}

Operator photon_op(const Operator& op, const FockCutoffs& c)
{
    return embed(op, Subsystem::Photon, c);
}

Operator phonon_op(const Operator& op, const FockCutoffs& c)
{
    return embed(op, Subsystem::Phonon, c);
}

} // namespace

Operator materialize(const PhononWord& word, int phonon_dim)
{
    if (word.lowering < 0 || word.raising < 0) throw std::invalid_argument("negative word exponent");
    const Operator b = annihilation(phonon_dim);
    const Operator bd = creation(phonon_dim);
    Operator out = identity(phonon_dim);
    // b^lowering b^dagger^raising, built right to left
    for (int i = 0; i < word.raising; ++i) out = Operator(bd * out);
    for (int i = 0; i < word.lowering; ++i) out = Operator(b * out);
    out.prune(Complex{0.0});
    return out;
}

std::vector<OrderedPiece> ordered_power_expansion(int n)
{
    if (n < 0) throw std::invalid_argument("power must be >= 0");
    // (A + B)^n with A = -b, B = b^dagger and central [A, B] = -1.
    std::vector<OrderedPiece> pieces;
    for (int k = n % 2; k <= n; k += 2) {
        const int contractions = (n - k) / 2;
        const double base = std::pow(0.5, contractions) / (factorial(k) * factorial(contractions));
        for (int r = 0; r <= k; ++r) {
            const double sign = (r % 2 == 0) ? 1.0 : -1.0;
            pieces.push_back({k, r, sign * base * binomial(k, r)});
        }
    }
    return pieces;
}

double TermDescriptor::coeff(double chi) const
{
    return weight * std::pow(chi, order());
}

std::vector<TermDescriptor> enumerate_damping_terms(ExpansionOrder order)
{
    require_order(order);
    const int max_power = 2 * order.value;
    std::vector<TermDescriptor> terms;
    for (int n1 = 0; n1 <= max_power; ++n1) {
        const auto left = ordered_power_expansion(n1);
        const double left_sign = (n1 % 2 == 0) ? 1.0 : -1.0; // (-chi)^n1
        for (int n2 = 0; n1 + n2 <= max_power; ++n2) {
            const auto right = ordered_power_expansion(n2);
            for (const auto& l : left) {
                for (const auto& r : right) {
                    if ((l.k - 2 * l.r) + (r.k - 2 * r.r) != 0) continue;
                    terms.push_back({n1, n2, l.k, r.k, l.r, r.r, left_sign * l.weight * r.weight});
                }
            }
        }
    }
    std::sort(terms.begin(), terms.end(), [](const TermDescriptor& x, const TermDescriptor& y) {
        return std::tie(x.n1, x.n2, x.k1, x.k2, x.r1, x.r2) < std::tie(y.n1, y.n2, y.k1, y.k2, y.r1, y.r2);
    });
    return terms;
}

std::shared_ptr<const std::vector<TermDescriptor>> cached_damping_terms(ExpansionOrder order)
{
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const std::vector<TermDescriptor>>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[order.value];
    if (!slot) slot = std::make_shared<const std::vector<TermDescriptor>>(enumerate_damping_terms(order));
    return slot;
}

Operator secular_exponent_operator(double chi, ExpansionOrder order, int m_max)
{
    require_order(order);
    if (m_max < 0) throw std::invalid_argument("m_max must be >= 0");
    const int dim = m_max + 1;
    // Single-sided: only pieces with as many b as b^dagger survive, i.e. k = 2r.
    // b^r b^dagger^r is diagonal with <m|b^r b^dagger^r|m> = (m+1)...(m+r),
    // evaluated exactly rather than as a truncated product.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(dim);
    for (int n = 0; n <= 2 * order.value; n += 2) {
        for (const auto& piece : ordered_power_expansion(n)) {
            if (piece.k != 2 * piece.r) continue;
            const double c = piece.weight * std::pow(chi, n);
            for (int m = 0; m < dim; ++m) {
                double rising = 1.0;
                for (int j = 1; j <= piece.r; ++j) rising *= m + j;
                diag(m) += c * rising;
            }
        }
    }
    Operator out(dim, dim);
    out.reserve(Eigen::VectorXi::Constant(dim, 1));
    for (int m = 0; m < dim; ++m)
        if (diag(m) != 0.0) out.insert(m, m) = diag(m);
    out.makeCompressed();
    return out;
}

namespace {

// Collects coefficients per distinct (left word, right word) pair; keyed and
// therefore emitted in a fixed order.
std::map<std::tuple<int, int, int, int>, double> collect_word_pairs(double chi, ExpansionOrder order)
{
    std::map<std::tuple<int, int, int, int>, double> pairs;
    for (const auto& t : *cached_damping_terms(order)) {
        const auto lw = t.left_word();
        const auto rw = t.right_word();
        pairs[{lw.lowering, lw.raising, rw.lowering, rw.raising}] += t.coeff(chi);
    }
    return pairs;
}

} // namespace

std::vector<SandwichTerm> secular_damping_terms(double chi, ExpansionOrder order, const FockCutoffs& cutoffs)
{
    require_valid(cutoffs);
    const int pdim = cutoffs.phonon_dim();
    const Operator a = photon_op(annihilation(cutoffs.photon_dim()), cutoffs);
    const Operator ad = photon_op(creation(cutoffs.photon_dim()), cutoffs);

    std::vector<SandwichTerm> out;
    for (const auto& [key, c] : collect_word_pairs(chi, order)) {
        if (c == 0.0) continue;
        const auto [l_low, l_raise, r_low, r_raise] = key;
        const Operator left = phonon_op(materialize({l_low, l_raise}, pdim), cutoffs);
        const Operator right = phonon_op(materialize({r_low, r_raise}, pdim), cutoffs);
        out.push_back({Complex{c}, Operator(left * a), Operator(ad * right)});
    }
    return out;
}

Superoperator secular_damping_superop(double chi, ExpansionOrder order, const FockCutoffs& cutoffs)
{
    return assemble_superoperator(secular_damping_terms(chi, order, cutoffs));
}

Operator secular_jump_normalization(double chi, ExpansionOrder order, int m_max)
{
    if (m_max < 0) throw std::invalid_argument("m_max must be >= 0");
    const int dim = m_max + 1;
    Operator k(dim, dim);
    for (const auto& [key, c] : collect_word_pairs(chi, order)) {
        const auto [l_low, l_raise, r_low, r_raise] = key;
        k += c * Operator(materialize({r_low, r_raise}, dim) * materialize({l_low, l_raise}, dim));
    }
    k.prune(Complex{0.0});
    return k;
}

Superoperator chi4_reference_superop(double chi, const FockCutoffs& cutoffs)
{
    require_valid(cutoffs);
    const int pdim = cutoffs.phonon_dim();
    const Operator a = photon_op(annihilation(cutoffs.photon_dim()), cutoffs);
    const Operator ad = photon_op(creation(cutoffs.photon_dim()), cutoffs);
    const Operator b = phonon_op(annihilation(pdim), cutoffs);
    const Operator bd = phonon_op(creation(pdim), cutoffs);
    const Operator one = identity(cutoffs.dim());

    const double c2 = chi * chi;
    const double c4 = c2 * c2;
    const Operator bbd = b * bd;
    const Operator b2 = b * b;
    const Operator bd2 = bd * bd;
    const Operator b2bd2 = b2 * bd2;
    const Operator one_minus_2bbd = one - 2.0 * bbd;

    // a rho a^dag
    Superoperator L = superop_sandwich(a, ad);

    // (a rho a^dag {chi^2/2! (1 - 2 b b^dag) + chi^4/4! (6 b^2 b^dag^2 - 12 b b^dag + 3)} + H.c.)
    const Operator bracket = (c2 / 2.0) * one_minus_2bbd + (c4 / 24.0) * (6.0 * b2bd2 - 12.0 * bbd + 3.0 * one);
    L += superop_sandwich(a, Operator(ad * bracket));
    L += superop_sandwich(Operator(bracket.adjoint() * a), ad);

    // chi^2 (1 + chi^2) (b a rho a^dag b^dag + b^dag a rho a^dag b)
    L += (c2 * (1.0 + c2)) * superop_sandwich(Operator(b * a), Operator(ad * bd));
    L += (c2 * (1.0 + c2)) * superop_sandwich(Operator(bd * a), Operator(ad * b));

    // -chi^4/2 (b a rho a^dag b b^dag^2 + b^dag a rho a^dag b^2 b^dag + H.c.)
    const Operator b_bd2 = b * bd2;
    const Operator b2_bd = b2 * bd;
    L += (-c4 / 2.0) * superop_sandwich(Operator(b * a), Operator(ad * b_bd2));
    L += (-c4 / 2.0) * superop_sandwich(Operator(bd * a), Operator(ad * b2_bd));
    L += (-c4 / 2.0) * superop_sandwich(Operator(Operator(b_bd2.adjoint()) * a), Operator(ad * Operator(b.adjoint())));
    L += (-c4 / 2.0) * superop_sandwich(Operator(Operator(b2_bd.adjoint()) * a), Operator(ad * Operator(bd.adjoint())));

    // chi^4/4 (b^2 a rho a^dag b^dag^2 + (1 - 2bb^dag) a rho a^dag (1 - 2bb^dag) + b^dag^2 a rho a^dag b^2)
    L += (c4 / 4.0) * superop_sandwich(Operator(b2 * a), Operator(ad * bd2));
    L += (c4 / 4.0) * superop_sandwich(Operator(one_minus_2bbd * a), Operator(ad * one_minus_2bbd));
    L += (c4 / 4.0) * superop_sandwich(Operator(bd2 * a), Operator(ad * b2));

    L.makeCompressed();
    return L;
}

} // namespace multiphonon
