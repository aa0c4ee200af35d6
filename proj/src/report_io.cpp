#include "mhill/report_io.hpp"

#include <cstdio>

namespace mhill {

const char* const kVersion = "0.1.0";

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json meta_json(const nlohmann::json& config_echo, const NormalizedPotential& pot)
{
    nlohmann::json rot = nlohmann::json::array();
    for (int i = 0; i < 2; ++i)
        rot.push_back({pot.rotation(i, 0), pot.rotation(i, 1)});
    return {{"version", kVersion},
            {"config", config_echo},
            {"rotation_applied", pot.rotation_applied},
            {"rotation", rot},
            {"mean_diag", {pot.v10, pot.v20}},
            {"c0", pot.c0},
            {"l1_norm", pot.l1_norm}};
}

namespace {

const char* kind_name(GapKind k)
{
    switch (k) {
    case GapKind::Stable:
        return "stable";
    case GapKind::Resonance:
        return "resonance";
    default:
        return "unresolved";
    }
}

} // namespace

nlohmann::json to_json(const SpectralReport& report)
{
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& b : report.bands) {
        const char* branch =
            b.branch == 3 ? "both" : (b.branch == 2 ? "second" : "first");
        bands.push_back({{"lo", b.lo}, {"hi", b.hi}, {"branch", branch}});
    }
    nlohmann::json gaps = nlohmann::json::array();
    for (const auto& g : report.gaps)
        gaps.push_back({{"lo", g.lo},
                        {"hi", g.hi},
                        {"kind", kind_name(g.kind)},
                        {"lo_origin", g.lo_origin},
                        {"hi_origin", g.hi_origin},
                        {"flagged", g.flagged}});
    nlohmann::json j{{"window", {report.window_lo, report.window_hi}},
                     {"bands", bands},
                     {"gaps", gaps}};
    if (!report.periodic_eigs.empty())
        j["periodic_eigenvalues"] = to_json(report.periodic_eigs);
    if (!report.antiperiodic_eigs.empty())
        j["antiperiodic_eigenvalues"] = to_json(report.antiperiodic_eigs);
    if (!report.resonances.empty())
        j["resonances"] = to_json(report.resonances);
    return j;
}

nlohmann::json to_json(const std::vector<EigenvalueEntry>& eigs)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : eigs)
        out.push_back({{"lambda", e.lambda},
                       {"multiplicity", e.multiplicity},
                       {"resolved", e.resolved}});
    return out;
}

nlohmann::json to_json(const std::vector<ResonanceEntry>& res)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : res)
        out.push_back({{"re", r.lambda.real()},
                       {"im", r.lambda.imag()},
                       {"multiplicity", r.multiplicity},
                       {"real", r.real}});
    return out;
}

nlohmann::json to_json(const std::vector<CheckResult>& checks)
{
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : checks)
        out.push_back({{"name", c.name},
                       {"passed", c.passed},
                       {"measured", c.measured},
                       {"threshold", c.threshold},
                       {"detail", c.detail},
                       {"seconds", c.seconds}});
    return out;
}

std::string sweep_csv(const std::vector<std::array<double, 6>>& rows)
{
    std::string out = "lambda,delta1,delta2,rho,d_plus,d_minus\n";
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) {
            out += format_double(r[i]);
            out += (i + 1 < r.size()) ? ',' : '\n';
        }
    }
    return out;
}

} // namespace mhill
