#include "multiphonon/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace multiphonon {

namespace {

void require_finite(double value, const char* name)
{
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string("parameter '") + name + "' is not finite");
    }
}

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_real(const std::string& key, const std::string& value, int line_no)
{
    double out = 0.0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": '" + key +
                                    "' expects a real number, got '" + value + "'");
    }
    return out;
}

int parse_int(const std::string& key, const std::string& value, int line_no)
{
    int out = 0;
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": '" + key +
                                    "' expects an integer, got '" + value + "'");
    }
    return out;
}

} // namespace

void require_well_formed(const SystemParams& p)
{
    require_finite(p.delta, "delta");
    require_finite(p.epsilon, "epsilon");
    require_finite(p.g, "g");
    require_finite(p.kappa_a, "kappa_a");
    require_finite(p.kappa_b, "kappa_b");
    require_finite(p.nbar, "nbar");
    if (p.epsilon < 0.0) throw std::invalid_argument("epsilon must be >= 0");
    if (p.g < 0.0) throw std::invalid_argument("g must be >= 0");
    if (p.kappa_a <= 0.0) throw std::invalid_argument("kappa_a must be > 0");
    if (p.kappa_b <= 0.0) throw std::invalid_argument("kappa_b must be > 0");
    if (p.nbar < 0.0) throw std::invalid_argument("nbar must be >= 0");
}

void require_valid(const FockCutoffs& c)
{
    if (c.n_max < 0 || c.m_max < 0) {
        throw std::invalid_argument("Fock cutoffs must be non-negative");
    }
}

const char* to_string(DiagnosticKind kind)
{
    switch (kind) {
    case DiagnosticKind::CouplingOrdering: return "coupling-ordering";
    case DiagnosticKind::ResonanceProximity: return "resonance-proximity";
    case DiagnosticKind::DecayNotSmall: return "decay-not-small";
    case DiagnosticKind::DetuningNotSmall: return "detuning-not-small";
    }
    return "unknown";
}

std::vector<Diagnostic> validate_regime(const SystemParams& p)
{
    require_well_formed(p);
    std::vector<Diagnostic> out;
    std::ostringstream msg;

    if (!(1.0 > p.g && p.g > p.epsilon)) {
        msg << "expected omega > g > epsilon, got g=" << p.g << ", epsilon=" << p.epsilon;
        out.push_back({DiagnosticKind::CouplingOrdering, msg.str()});
        msg.str({});
    }

    // Delta = +-k omega makes the dropped e^{+-ik omega t} terms secular.
    const double window = std::max(p.kappa_a, 10.0 * p.g * p.g);
    const int k_top = static_cast<int>(std::ceil(std::abs(p.delta))) + 2;
    for (int k = 1; k <= k_top; ++k) {
        const double gap = std::min(std::abs(p.delta - k), std::abs(p.delta + k));
        if (gap <= window) {
            msg << "detuning " << p.delta << " lies within " << window << " of the resonance "
                << (p.delta < 0 ? "-" : "") << k << " omega";
            out.push_back({DiagnosticKind::ResonanceProximity, msg.str()});
            msg.str({});
        }
    }

    if (!(p.kappa_a < 0.1 && p.kappa_b < 0.1)) {
        msg << "secular approximation needs kappa_a, kappa_b << omega, got kappa_a=" << p.kappa_a
            << ", kappa_b=" << p.kappa_b;
        out.push_back({DiagnosticKind::DecayNotSmall, msg.str()});
        msg.str({});
    }

    if (!(std::abs(p.delta) < 1.0)) {
        msg << "|delta| = " << std::abs(p.delta) << " is not small compared with omega";
        out.push_back({DiagnosticKind::DetuningNotSmall, msg.str()});
    }
    return out;
}

RunConfig parse_config(const std::string& text)
{
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key or value");
        }

        if (key == "delta") cfg.params.delta = parse_real(key, value, line_no);
        else if (key == "epsilon") cfg.params.epsilon = parse_real(key, value, line_no);
        else if (key == "g") cfg.params.g = parse_real(key, value, line_no);
        else if (key == "kappa_a") cfg.params.kappa_a = parse_real(key, value, line_no);
        else if (key == "kappa_b") cfg.params.kappa_b = parse_real(key, value, line_no);
        else if (key == "nbar") cfg.params.nbar = parse_real(key, value, line_no);
        else if (key == "n_max") cfg.cutoffs.n_max = parse_int(key, value, line_no);
        else if (key == "m_max") cfg.cutoffs.m_max = parse_int(key, value, line_no);
        else if (key == "order_N") cfg.order = ExpansionOrder(parse_int(key, value, line_no));
        else throw std::invalid_argument("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    require_well_formed(cfg.params);
    require_valid(cfg.cutoffs);
    if (cfg.order.value < 0) throw std::invalid_argument("order_N must be >= 0");
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace multiphonon
