#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <tuple>

#include "multiphonon/secular.hpp"
#include "oracles.hpp"

using namespace multiphonon;
using oracle::Mat;

namespace {

// Coefficient of a damping term written out independently of the library.
double expected_weight(const TermDescriptor& t)
{
    const auto half = [](int n, int k) {
        const int j = (n - k) / 2;
        return std::pow(0.5, j) / oracle::factorial(j);
    };
    const double sign = ((t.n1 % 2) ? -1.0 : 1.0) * (((t.r1 + t.r2) % 2) ? -1.0 : 1.0);
    return sign / (oracle::factorial(t.k1) * oracle::factorial(t.k2)) * half(t.n1, t.k1) * half(t.n2, t.k2) *
           oracle::binomial(t.k1, t.r1) * oracle::binomial(t.k2, t.r2);
}

// Photon jump a rho a^dag followed by the truncated Taylor series of
// exp[chi X] (.) exp[-chi X], X = b - b^dag, keeping only the components that
// conserve the phonon coherence order m1 - m2.
Mat taylor_secular_jump(double chi, int N, const FockCutoffs& c, const Mat& rho)
{
    const int nd = c.photon_dim(), md = c.phonon_dim();
    const Mat a = oracle::kron(oracle::lowering(nd), Mat::Identity(md, md));
    const Mat b = oracle::lowering(md);
    const Mat X = oracle::kron(Mat::Identity(nd, nd), Mat(b - b.adjoint()));
    const Mat jumped = a * rho * a.adjoint();

    std::vector<Mat> powers{Mat::Identity(c.dim(), c.dim())};
    for (int n = 1; n <= 2 * N; ++n) powers.push_back(powers.back() * X);

    const int D = c.dim();
    Mat out = Mat::Zero(D, D);
    // Decompose jumped by input coherence order so the filter can be applied per component.
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
            if (jumped(i, j) == 0.0) continue;
            const int order_in = i % md - j % md;
            Mat unit = Mat::Zero(D, D);
            unit(i, j) = jumped(i, j);
            Mat evolved = Mat::Zero(D, D);
            for (int n1 = 0; n1 <= 2 * N; ++n1)
                for (int n2 = 0; n1 + n2 <= 2 * N; ++n2)
                    evolved += std::pow(chi, n1) * std::pow(-chi, n2) / (oracle::factorial(n1) * oracle::factorial(n2)) *
                               powers[n1] * unit * powers[n2];
            for (int p = 0; p < D; ++p)
                for (int q = 0; q < D; ++q)
                    if (p % md - q % md == order_in) out(p, q) += evolved(p, q);
        }
    }
    return out;
}

} // namespace

TEST(ExponentOperator, OrderZeroIsIdentity)
{
    EXPECT_EQ(max_abs(Operator(secular_exponent_operator(0.3, ExpansionOrder(0), 6) - identity(7))), 0.0);
}

TEST(ExponentOperator, OrderOneMatchesSecondOrderForm)
{
    const double chi = 0.1;
    const DenseMatrix F = DenseMatrix(secular_exponent_operator(chi, ExpansionOrder(1), 10));
    for (int m = 0; m <= 10; ++m) EXPECT_NEAR(F(m, m).real(), 1.0 - chi * chi * (m + 0.5), 1e-15) << m;
    EXPECT_EQ(max_abs(DenseMatrix(F - DenseMatrix(F.diagonal().asDiagonal()))), 0.0);
}

TEST(ExponentOperator, OrderTwoMatchesSymmetricBracket)
{
    const double chi = 0.2;
    const DenseMatrix F = DenseMatrix(secular_exponent_operator(chi, ExpansionOrder(2), 12));
    for (int m = 0; m <= 12; ++m) {
        const double bb2 = (m + 1.0) * (m + 2.0); // <m|b^2 b^dag^2|m>
        const double expected =
            1.0 - chi * chi * (m + 0.5) + std::pow(chi, 4) / 24.0 * (6.0 * bb2 - 12.0 * (m + 1.0) + 3.0);
        EXPECT_NEAR(F(m, m).real(), expected, 1e-14) << m;
    }
}

TEST(ExponentOperator, ConvergesToDisplacementDiagonal)
{
    // <m|exp[chi(b - b^dag)]|m> = e^{-chi^2/2} L_m(chi^2); check m = 0, 1.
    const double chi = 0.15;
    const DenseMatrix F = DenseMatrix(secular_exponent_operator(chi, ExpansionOrder(6), 4));
    const double x = chi * chi;
    EXPECT_NEAR(F(0, 0).real(), std::exp(-x / 2.0), 1e-13);
    EXPECT_NEAR(F(1, 1).real(), std::exp(-x / 2.0) * (1.0 - x), 1e-13);
}

TEST(Enumeration, OrderZeroIsThePlainJump)
{
    const auto terms = enumerate_damping_terms(ExpansionOrder(0));
    ASSERT_EQ(terms.size(), 1u);
    EXPECT_EQ(terms[0].weight, 1.0);
    EXPECT_EQ(terms[0].left_word().length(), 0);
    EXPECT_EQ(terms[0].right_word().length(), 0);
}

TEST(Enumeration, InvariantsAndCoefficients)
{
    for (int N = 0; N <= 4; ++N) {
        const auto terms = enumerate_damping_terms(ExpansionOrder(N));
        for (const auto& t : terms) {
            EXPECT_EQ((t.n1 - t.k1) % 2, 0);
            EXPECT_EQ((t.n2 - t.k2) % 2, 0);
            EXPECT_GE(t.n1 - t.k1, 0);
            EXPECT_GE(t.n2 - t.k2, 0);
            EXPECT_EQ(t.k1 - 2 * t.r1 + t.k2 - 2 * t.r2, 0);
            EXPECT_EQ(t.order() % 2, 0);
            EXPECT_LE(t.order(), 2 * N);
            EXPECT_NEAR(t.weight, expected_weight(t), 1e-15);
            EXPECT_EQ(t.left_word().shift() + t.right_word().shift(), 0);
        }
        const auto key = [](const TermDescriptor& t) { return std::tie(t.n1, t.n2, t.k1, t.k2, t.r1, t.r2); };
        for (std::size_t i = 1; i < terms.size(); ++i) EXPECT_LT(key(terms[i - 1]), key(terms[i]));
    }
}

TEST(Enumeration, IsCompleteAgainstBruteForce)
{
    for (int N = 0; N <= 3; ++N) {
        std::size_t count = 0;
        for (int n1 = 0; n1 <= 2 * N; ++n1)
            for (int n2 = 0; n1 + n2 <= 2 * N; ++n2)
                for (int k1 = n1 % 2; k1 <= n1; k1 += 2)
                    for (int k2 = n2 % 2; k2 <= n2; k2 += 2)
                        for (int r1 = 0; r1 <= k1; ++r1)
                            for (int r2 = 0; r2 <= k2; ++r2)
                                if (k1 - 2 * r1 + k2 - 2 * r2 == 0) ++count;
        EXPECT_EQ(enumerate_damping_terms(ExpansionOrder(N)).size(), count) << "N=" << N;
    }
}

TEST(Enumeration, CacheReturnsTheSameList)
{
    const auto direct = enumerate_damping_terms(ExpansionOrder(3));
    const auto cached = cached_damping_terms(ExpansionOrder(3));
    ASSERT_EQ(direct.size(), cached->size());
    for (std::size_t i = 0; i < direct.size(); ++i) EXPECT_EQ(direct[i].weight, (*cached)[i].weight);
    EXPECT_EQ(cached.get(), cached_damping_terms(ExpansionOrder(3)).get());
}

TEST(OrderedExpansion, ReproducesPowersOnLowStates)
{
    // (b^dag - b)^n / n! on states far below the cutoff.
    const int dim = 16;
    const Mat b = oracle::lowering(dim);
    const Mat X = b.adjoint() - b;
    Mat power = Mat::Identity(dim, dim);
    for (int n = 1; n <= 6; ++n) {
        power = power * X;
        Mat sum = Mat::Zero(dim, dim);
        for (const auto& p : ordered_power_expansion(n))
            sum += p.weight * DenseMatrix(materialize({p.r, p.k - p.r}, dim));
        const Mat expected = power / oracle::factorial(n);
        EXPECT_LE((sum - expected).block(0, 0, dim - n, dim - n).cwiseAbs().maxCoeff(), 1e-12) << "n=" << n;
    }
}

TEST(Damping, OrderZeroIsPhotonJump)
{
    const FockCutoffs c{3, 4};
    const Operator a = embed(annihilation(4), Subsystem::Photon, c);
    const Superoperator expected = superop_sandwich(a, Operator(a.adjoint()));
    EXPECT_EQ(max_abs(Operator(secular_damping_superop(0.2, ExpansionOrder(0), c) - expected)), 0.0);
}

TEST(Damping, OrderOneMatchesSecondOrderTerms)
{
    // a rho a^dag + (chi^2/2)[(1 - 2 b b^dag) J + J (1 - 2 b b^dag)] + chi^2 (b J b^dag + b^dag J b), J = a rho a^dag
    const double chi = 0.1;
    const FockCutoffs c{2, 5};
    const int nd = c.photon_dim(), md = c.phonon_dim();
    const Mat a = oracle::kron(oracle::lowering(nd), Mat::Identity(md, md));
    const Mat b = oracle::kron(Mat::Identity(nd, nd), oracle::lowering(md));
    const Mat one = Mat::Identity(c.dim(), c.dim());
    const Mat s = one - 2.0 * b * b.adjoint();
    std::mt19937 rng(5);
    const Superoperator S = secular_damping_superop(chi, ExpansionOrder(1), c);
    for (int trial = 0; trial < 3; ++trial) {
        const Mat rho = oracle::random_state(c.dim(), rng);
        const Mat J = a * rho * a.adjoint();
        const Mat expected =
            J + chi * chi / 2.0 * (s * J + J * s) + chi * chi * (b * J * b.adjoint() + b.adjoint() * J * b);
        EXPECT_LE(max_abs(DenseMatrix(multiphonon::apply(S, rho) - expected)), 1e-14);
    }
}

TEST(Damping, OrderTwoMatchesLiteralTranscription)
{
    const FockCutoffs c{6, 8};
    for (double chi : {0.05, 0.1, 0.2}) {
        const Superoperator diff = secular_damping_superop(chi, ExpansionOrder(2), c) - chi4_reference_superop(chi, c);
        EXPECT_LE(max_abs(diff), 1e-12) << "chi=" << chi;
    }
    EXPECT_EQ(max_abs(Operator(chi4_reference_superop(0.0, c) - secular_damping_superop(0.0, ExpansionOrder(0), c))), 0.0);
}

TEST(Damping, MatchesFilteredTaylorSeriesAwayFromEdge)
{
    std::mt19937 rng(17);
    for (int N = 1; N <= 3; ++N) {
        const FockCutoffs c{2, 2 * N + 3};
        const int md = c.phonon_dim(), safe = md - 2 * N;
        // state supported on phonon levels that words of length 2N cannot push past the cutoff
        Mat rho = oracle::random_state(c.dim(), rng);
        for (int i = 0; i < c.dim(); ++i)
            for (int j = 0; j < c.dim(); ++j)
                if (i % md >= safe || j % md >= safe) rho(i, j) = 0.0;
        const double chi = 0.3;
        const Mat expected = taylor_secular_jump(chi, N, c, rho);
        EXPECT_LE(max_abs(DenseMatrix(multiphonon::apply(secular_damping_superop(chi, ExpansionOrder(N), c), rho) - expected)), 1e-13)
            << "N=" << N;
    }
}

TEST(Damping, SuccessiveOrdersDifferAtTheNextPower)
{
    const FockCutoffs c{4, 8};
    const std::vector<double> chis{0.05, 0.1, 0.2};
    for (int N = 0; N <= 2; ++N) {
        std::vector<double> logs_chi, logs_gap;
        for (double chi : chis) {
            const double gap = max_abs(Operator(secular_damping_superop(chi, ExpansionOrder(N), c) -
                                                secular_damping_superop(chi, ExpansionOrder(N + 1), c)));
            logs_chi.push_back(std::log(chi));
            logs_gap.push_back(std::log(gap));
        }
        const double slope = (logs_gap.back() - logs_gap.front()) / (logs_chi.back() - logs_chi.front());
        EXPECT_NEAR(slope, 2.0 * (N + 1), 0.1) << "N=" << N;
    }
    // chi^4 gap between N = 1 and the literal chi^4 map: ratio ~16 when chi doubles
    std::vector<double> gaps;
    for (double chi : chis)
        gaps.push_back(max_abs(Operator(secular_damping_superop(chi, ExpansionOrder(1), c) - chi4_reference_superop(chi, c))));
    EXPECT_NEAR(gaps[1] / gaps[0], 16.0, 1e-9);
    EXPECT_NEAR(gaps[2] / gaps[1], 16.0, 1e-9);
}

TEST(Damping, PreservesPhononDiagonalStates)
{
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const FockCutoffs c{3, 7};
    const int md = c.phonon_dim();
    for (int N = 0; N <= 3; ++N) {
        Mat rho = oracle::random_state(c.dim(), rng);
        for (int i = 0; i < c.dim(); ++i)
            for (int j = 0; j < c.dim(); ++j)
                if (i % md != j % md) rho(i, j) = 0.0;
        const Mat out = multiphonon::apply(secular_damping_superop(0.2, ExpansionOrder(N), c), rho);
        double off = 0.0;
        for (int i = 0; i < c.dim(); ++i)
            for (int j = 0; j < c.dim(); ++j)
                if (i % md != j % md) off = std::max(off, std::abs(out(i, j)));
        EXPECT_LE(off, 1e-15) << "N=" << N;
    }
}

TEST(Damping, JumpNormalizationIsIdentityAwayFromEdge)
{
    for (int N = 0; N <= 3; ++N) {
        const int m_max = 12;
        const DenseMatrix K = DenseMatrix(secular_jump_normalization(0.2, ExpansionOrder(N), m_max));
        const int edge = m_max + 1 - 2 * N;
        EXPECT_LE(max_abs(DenseMatrix(K.block(0, 0, edge, edge) - DenseMatrix::Identity(edge, edge))), 1e-13) << "N=" << N;
        EXPECT_LE(max_abs(DenseMatrix(K - K.adjoint())), 1e-15);
    }
}

TEST(Words, MaterializeTruncatedProduct)
{
    const int dim = 5;
    const Mat b = oracle::lowering(dim);
    const Mat expected = b * b * b.adjoint();
    EXPECT_LE(max_abs(DenseMatrix(DenseMatrix(materialize({2, 1}, dim)) - expected)), 1e-14);
    const PhononWord w{1, 3};
    EXPECT_EQ(w.length(), 4);
    EXPECT_EQ(w.shift(), 2);
}
