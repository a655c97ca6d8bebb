#include "verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "multiphonon/liouvillian.hpp"
#include "multiphonon/observables.hpp"
#include "multiphonon/secular.hpp"
#include "multiphonon/steady_state.hpp"

namespace multiphonon::cli {

namespace {

struct Check {
    std::string name;
    std::function<std::string(bool&)> run; // returns a detail string
};

std::string fmt(const char* format, double a, double b = 0.0)
{
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b);
    return buf;
}

SystemParams reference_point()
{
    return SystemParams{0.05, 0.02, 0.1, 2e-3, 2e-5, 1.0};
}

} // namespace

bool run_verification(std::ostream& out)
{
    std::vector<Check> checks;

    checks.push_back({"chi4 expansion vs literal transcription", [](bool& ok) {
        const FockCutoffs c{6, 8};
        double worst = 0.0;
        for (double chi : {0.05, 0.1, 0.2}) {
            const Superoperator diff = secular_damping_superop(chi, ExpansionOrder(2), c) - chi4_reference_superop(chi, c);
            worst = std::max(worst, max_abs(diff));
        }
        ok = worst <= 1e-12;
        return fmt("max deviation %.3e", worst);
    }});

    for (int n = 0; n <= 3; ++n) {
        checks.push_back({"damping term count N=" + std::to_string(n), [n](bool& ok) {
            const auto terms = enumerate_damping_terms(ExpansionOrder(n));
            ok = !terms.empty();
            for (const auto& t : terms) ok = ok && t.order() % 2 == 0 && t.order() <= 2 * n;
            return fmt("%.0f terms", static_cast<double>(terms.size()));
        }});
    }

    checks.push_back({"trace preservation N<=3", [](bool& ok) {
        const FockCutoffs c{4, 8};
        const SystemParams p = reference_point();
        double worst = trace_defect(full_liouvillian(p, c));
        for (int n = 0; n <= 3; ++n) {
            worst = std::max(worst, trace_defect(transformed_liouvillian(p, c, ExpansionOrder(n))));
            worst = std::max(worst, trace_defect(phonon_diagonal_generator(p, c, ExpansionOrder(n))));
        }
        ok = worst <= 1e-12;
        return fmt("max defect %.3e", worst);
    }});

    checks.push_back({"fixed-mirror photon number", [](bool& ok) {
        SystemParams p = reference_point();
        p.g = 0.0;
        const auto report = steady_state(phonon_diagonal_generator(p, FockCutoffs{12, 2}, ExpansionOrder(1)));
        const auto obs = observables_from_distribution(
            distribution_from_populations(report.populations(), report.cutoffs_used), p);
        const auto ref = fixed_mirror_reference(p);
        const double rel = std::abs(obs.mean_photon - ref.mean_photon) / ref.mean_photon;
        ok = rel <= 1e-6 && obs.g2_a && std::abs(*obs.g2_a - 1.0) <= 1e-6;
        return fmt("relative error %.3e, g2_a %.8f", rel, obs.g2_a.value_or(NAN));
    }});

    checks.push_back({"thermal phonon limit", [](bool& ok) {
        SystemParams p = reference_point();
        p.epsilon = 0.0;
        p.g = 0.0;
        const auto report = steady_state(phonon_diagonal_generator(p, FockCutoffs{1, 60}, ExpansionOrder(1)));
        const auto obs = observables_from_distribution(
            distribution_from_populations(report.populations(), report.cutoffs_used), p);
        ok = std::abs(obs.mean_phonon - p.nbar) <= 1e-8 && obs.g2_b && std::abs(*obs.g2_b - 2.0) <= 1e-6;
        return fmt("<m> %.10f, g2_b %.8f", obs.mean_phonon, obs.g2_b.value_or(NAN));
    }});

    checks.push_back({"reduced vs transformed steady state", [](bool& ok) {
        const FockCutoffs c{3, 5};
        const SystemParams p = reference_point();
        const auto full = steady_state(transformed_liouvillian(p, c, ExpansionOrder(1)), c);
        const auto reduced = steady_state(phonon_diagonal_generator(p, c, ExpansionOrder(1)));
        const auto a = observables_from_distribution(distribution_from_populations(full.populations(), c), p);
        const auto b = observables_from_distribution(distribution_from_populations(reduced.populations(), c), p);
        const double diff = std::max(std::abs(a.mean_photon - b.mean_photon), std::abs(a.mean_phonon - b.mean_phonon));
        ok = diff <= 1e-9;
        return fmt("max observable difference %.3e", diff);
    }});

    checks.push_back({"polaron frame consistency", [](bool& ok) {
        const FockCutoffs c{4, 8};
        SystemParams p = reference_point();
        p.g = 0.05;
        const auto lab = steady_state(full_liouvillian(p, c), c);
        const auto unitary = polaron_unitary(p.chi(), c);
        const auto framed = DensityMatrix::normalized(to_polaron_frame(lab.density_matrix().matrix(), unitary.unitary));
        const auto reference = distribution(framed, c);
        std::vector<double> dist;
        for (int n = 0; n <= 2; ++n) {
            const auto s = steady_state(phonon_diagonal_generator(p, c, ExpansionOrder(n)));
            dist.push_back((distribution_from_populations(s.populations(), c).table - reference.table).cwiseAbs().sum());
        }
        ok = dist[1] < dist[0];
        return fmt("L1 distance N=0 %.3e, N=1 %.3e", dist[0], dist[1]);
    }});

    bool all = true;
    for (const auto& check : checks) {
        bool ok = false;
        std::string detail;
        try {
            detail = check.run(ok);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("error: ") + e.what();
        }
        all = all && ok;
        out << (ok ? "PASS " : "FAIL ") << check.name << " (" << detail << ")\n";
    }
    return all;
}

} // namespace multiphonon::cli
