#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "multiphonon/params.hpp"

using namespace multiphonon;

namespace {

SystemParams comb_params(double delta = 0.05)
{
    return {delta, 0.02, 0.1, 2e-3, 2e-5, 1.0};
}

bool has(const std::vector<Diagnostic>& diags, DiagnosticKind kind)
{
    return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.kind == kind; });
}

} // namespace

TEST(Regime, CombParametersRaiseNoWarnings)
{
    EXPECT_TRUE(validate_regime(comb_params()).empty());
}

TEST(Regime, DetuningAtMechanicalFrequencyIsResonant)
{
    const auto diags = validate_regime(comb_params(1.0));
    EXPECT_TRUE(has(diags, DiagnosticKind::ResonanceProximity));
    EXPECT_TRUE(has(diags, DiagnosticKind::DetuningNotSmall));
}

TEST(Regime, ResonanceWindowScalesWithCouplingSquared)
{
    // window = max(kappa_a, 10 g^2) = 0.1 for g = 0.1
    EXPECT_TRUE(has(validate_regime(comb_params(0.91)), DiagnosticKind::ResonanceProximity));
    EXPECT_FALSE(has(validate_regime(comb_params(0.89)), DiagnosticKind::ResonanceProximity));
    EXPECT_TRUE(has(validate_regime(comb_params(-1.95)), DiagnosticKind::ResonanceProximity));
}

TEST(Regime, DriveStrongerThanCouplingViolatesOrdering)
{
    SystemParams p = comb_params();
    p.g = 0.03;
    p.epsilon = 0.05;
    EXPECT_TRUE(has(validate_regime(p), DiagnosticKind::CouplingOrdering));
}

TEST(Regime, LargeDecayIsFlagged)
{
    SystemParams p = comb_params();
    p.kappa_a = 0.2;
    EXPECT_TRUE(has(validate_regime(p), DiagnosticKind::DecayNotSmall));
}

TEST(Regime, IsPure)
{
    SystemParams p = comb_params(1.0);
    p.epsilon = 0.5;
    const auto a = validate_regime(p);
    const auto b = validate_regime(p);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].kind, b[i].kind);
        EXPECT_EQ(a[i].message, b[i].message);
    }
}

TEST(Regime, MalformedInputsAreHardErrors)
{
    SystemParams p = comb_params();
    p.delta = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(validate_regime(p), std::invalid_argument);
    p = comb_params();
    p.kappa_b = -1e-5;
    EXPECT_THROW(validate_regime(p), std::invalid_argument);
    p = comb_params();
    p.kappa_a = 0.0;
    EXPECT_THROW(validate_regime(p), std::invalid_argument);
    p = comb_params();
    p.nbar = -0.1;
    EXPECT_THROW(validate_regime(p), std::invalid_argument);
    p = comb_params();
    p.g = std::numeric_limits<double>::infinity();
    EXPECT_THROW(validate_regime(p), std::invalid_argument);
}

TEST(Params, ChiIsTheCouplingInMechanicalUnits)
{
    // dimensionful g = 0.3 MHz, omega = 3 MHz, rescaled before storage
    const double omega = 3.0, g = 0.3;
    SystemParams p;
    p.g = g / omega;
    EXPECT_DOUBLE_EQ(p.chi(), 0.1);
    SystemParams q;
    q.g = (2 * g) / (2 * omega);
    EXPECT_DOUBLE_EQ(q.chi(), p.chi());
}

TEST(Cutoffs, IndexIsPhononFast)
{
    const FockCutoffs c{3, 4};
    EXPECT_EQ(c.dim(), 20);
    EXPECT_EQ(c.index(0, 0), 0);
    EXPECT_EQ(c.index(0, 4), 4);
    EXPECT_EQ(c.index(1, 0), 5);
    EXPECT_EQ(c.index(3, 4), 19);
    const FockCutoffs single{0, 0};
    EXPECT_EQ(single.dim(), 1);
    EXPECT_THROW(require_valid(FockCutoffs{-1, 2}), std::invalid_argument);
}

TEST(Config, ParsesAllKeysWithComments)
{
    const auto cfg = parse_config(R"(# comb point
delta = 0.05   # detuning
epsilon=0.02
g = 0.1
kappa_a = 2e-3
kappa_b = 2e-5

nbar = 1
n_max = 10
m_max = 24
order_N = 3
)");
    EXPECT_DOUBLE_EQ(cfg.params.delta, 0.05);
    EXPECT_DOUBLE_EQ(cfg.params.epsilon, 0.02);
    EXPECT_DOUBLE_EQ(cfg.params.g, 0.1);
    EXPECT_DOUBLE_EQ(cfg.params.kappa_a, 2e-3);
    EXPECT_DOUBLE_EQ(cfg.params.kappa_b, 2e-5);
    EXPECT_DOUBLE_EQ(cfg.params.nbar, 1.0);
    EXPECT_EQ(cfg.cutoffs, (FockCutoffs{10, 24}));
    EXPECT_EQ(cfg.order.value, 3);
}

TEST(Config, RejectsUnknownKeysAndBadValues)
{
    EXPECT_THROW(parse_config("omega = 1\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("delta = fast\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("n_max = 2.5\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("delta 0.1\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("kappa_a = -1\n"), std::invalid_argument);
    EXPECT_THROW(parse_config("order_N = -1\n"), std::invalid_argument);
}

TEST(Config, LoadsFromFile)
{
    const auto path = std::filesystem::temp_directory_path() / "multiphonon_params_test.conf";
    {
        std::ofstream out(path);
        out << "delta = 0.09\nnbar = 2\n";
    }
    const auto cfg = load_config(path);
    EXPECT_DOUBLE_EQ(cfg.params.delta, 0.09);
    EXPECT_DOUBLE_EQ(cfg.params.nbar, 2.0);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path), std::runtime_error);
}
