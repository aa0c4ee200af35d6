#include "mhill/closedform.hpp"
#include "mhill/report_io.hpp"
#include "mhill/spectrum.hpp"
#include "mhill/verify.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace mhill;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerify = 4;

struct CommonArgs {
    std::string potential_path;
    std::vector<double> window;
    std::vector<double> rect;
    double grid = 40.0;
    double tol = 1e-10;
    std::string out;
    std::string format = "json";
    int n_max = 30;
    int truncate = 40;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool need_potential = true)
{
    auto* p = cmd->add_option("--potential", a.potential_path, "potential document (JSON)");
    if (need_potential)
        p->required();
    cmd->add_option("--window", a.window, "real window: min max")->expected(2);
    cmd->add_option("--grid", a.grid, "grid points per unit sqrt(lambda)");
    cmd->add_option("--tol", a.tol, "relative propagation tolerance");
    cmd->add_option("--out", a.out, "output path (default: stdout)");
    cmd->add_option("--format", a.format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--n-max", a.n_max, "largest cluster index for asymptotics");
    cmd->add_option("--truncate", a.truncate, "reconstruction truncation");
}

ScanOptions scan_options(const CommonArgs& a)
{
    ScanOptions opt;
    opt.grid_density = a.grid;
    opt.propagate.tol = a.tol;
    return opt;
}

void validate_window(const CommonArgs& a)
{
    if (a.window.size() != 2 || !(a.window[0] < a.window[1]))
        throw SchemaError("--window needs min < max");
    if (!(a.grid > 0.0) || !(a.tol > 0.0))
        throw SchemaError("grid density and tolerance must be positive");
}

void emit(const CommonArgs& a, const std::string& text)
{
    if (a.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n')
            std::cout << '\n';
        return;
    }
    std::ofstream f(a.out, std::ios::binary);
    if (!f)
        throw SchemaError("cannot open output file: " + a.out);
    f << text;
}

nlohmann::json echo_config(const CommonArgs& a, const std::string& command)
{
    nlohmann::json j{{"command", command},
                     {"potential", a.potential_path},
                     {"grid", a.grid},
                     {"tol", a.tol},
                     {"format", a.format}};
    if (a.window.size() == 2)
        j["window"] = a.window;
    if (a.rect.size() == 4)
        j["rect"] = a.rect;
    return j;
}

NormalizedPotential load_potential(const CommonArgs& a)
{
    return normalize_potential(parse_potential_file(a.potential_path));
}

int cmd_bands(const CommonArgs& a)
{
    validate_window(a);
    const NormalizedPotential pot = load_potential(a);
    const ScanOptions opt = scan_options(a);
    SpectralReport report = scan_bands(pot, a.window[0], a.window[1], opt);

    // endpoint provenance needs the zero lists over a slightly wider window
    const double pad = std::max(1.0, 0.02 * (a.window[1] - a.window[0]));
    report.periodic_eigs = periodic_eigenvalues(pot, a.window[0] - pad, a.window[1] + pad, opt);
    report.antiperiodic_eigs =
        antiperiodic_eigenvalues(pot, a.window[0] - pad, a.window[1] + pad, opt);
    if (!pot.scalar_like)
        for (const auto& e : real_resonances(pot, a.window[0] - pad, a.window[1] + pad, opt))
            report.resonances.push_back({Complex(e.lambda, 0.0), e.multiplicity, true});
    classify_gaps(report, opt.match_tol);

    nlohmann::json doc{{"meta", meta_json(echo_config(a, "bands"), pot)},
                       {"results", to_json(report)},
                       {"diagnostics",
                        {{"grid_density", opt.grid_density}, {"edge_tol", opt.edge_tol}}}};
    emit(a, doc.dump(2));
    return kExitOk;
}

int cmd_eigs(const CommonArgs& a, const std::string& which)
{
    validate_window(a);
    const NormalizedPotential pot = load_potential(a);
    const ScanOptions opt = scan_options(a);
    nlohmann::json results;
    if (which == "periodic" || which == "both")
        results["periodic_eigenvalues"] =
            to_json(periodic_eigenvalues(pot, a.window[0], a.window[1], opt));
    if (which == "antiperiodic" || which == "both")
        results["antiperiodic_eigenvalues"] =
            to_json(antiperiodic_eigenvalues(pot, a.window[0], a.window[1], opt));
    nlohmann::json doc{{"meta", meta_json(echo_config(a, "eigs"), pot)},
                       {"results", results},
                       {"diagnostics", {{"grid_density", opt.grid_density}}}};
    emit(a, doc.dump(2));
    return kExitOk;
}

int cmd_resonances(const CommonArgs& a)
{
    const NormalizedPotential pot = load_potential(a);
    const ScanOptions opt = scan_options(a);
    std::vector<ResonanceEntry> list;
    if (a.rect.size() == 4) {
        if (!(a.rect[0] < a.rect[1]) || !(a.rect[2] < a.rect[3]))
            throw SchemaError("--rect needs re0 < re1 and im0 < im1");
        list = complex_resonances(pot, Complex(a.rect[0], a.rect[2]),
                                  Complex(a.rect[1], a.rect[3]), opt);
    } else {
        validate_window(a);
        for (const auto& e : real_resonances(pot, a.window[0], a.window[1], opt))
            list.push_back({Complex(e.lambda, 0.0), e.multiplicity, true});
    }
    nlohmann::json doc{{"meta", meta_json(echo_config(a, "resonances"), pot)},
                       {"results", {{"resonances", to_json(list)}}},
                       {"diagnostics", {{"grid_density", opt.grid_density}}}};
    emit(a, doc.dump(2));
    return kExitOk;
}

int cmd_reconstruct(const CommonArgs& a)
{
    validate_window(a);
    const NormalizedPotential pot = load_potential(a);
    const ScanOptions opt = scan_options(a);
    const auto periodic = enumerate_eigenvalues_to_cluster(pot, true, a.truncate, opt);
    const auto anti = enumerate_eigenvalues_to_cluster(pot, false, a.truncate, opt);
    const DiscriminantProduct dp = reconstruct_dplus(periodic, a.truncate);
    const DiscriminantProduct dm = reconstruct_dminus(anti, a.truncate);
    Propagator prop(pot, opt.propagate);

    nlohmann::json table = nlohmann::json::array();
    const int pts = 101;
    for (int i = 0; i < pts; ++i) {
        const Complex l(a.window[0] + (a.window[1] - a.window[0]) * i / (pts - 1), 0.0);
        const TraceValues t = traces_at(prop, l);
        const Complex dpl = dp(l), dml = dm(l);
        const Complex mu1 = 0.25 * (dml - dpl);
        const Complex rho = (mu1 - 1.0) * (mu1 - 1.0) - dpl;
        table.push_back({{"lambda", l.real()},
                         {"d_plus", t.d_plus.real()},
                         {"d_minus", t.d_minus.real()},
                         {"d_plus_reconstructed", dpl.real()},
                         {"d_minus_reconstructed", dml.real()},
                         {"mu1_recovered", mu1.real()},
                         {"rho_recovered", rho.real()}});
    }
    auto rho_rec = [&dp, &dm](Complex l) {
        const Complex mu1 = 0.25 * (dm(l) - dp(l));
        return (mu1 - 1.0) * (mu1 - 1.0) - dp(l);
    };
    nlohmann::json res = nlohmann::json::array();
    for (const auto& z :
         real_zero_scan(rho_rec, a.window[0], a.window[1], opt.grid_density, opt.root_tol,
                        opt.winding_accept))
        res.push_back({{"lambda", z.z.real()}, {"multiplicity", z.multiplicity}});

    nlohmann::json doc{{"meta", meta_json(echo_config(a, "reconstruct"), pot)},
                       {"results",
                        {{"table", table},
                         {"resonances_from_reconstruction", res},
                         {"truncation", a.truncate}}},
                       {"diagnostics",
                        {{"periodic_list", to_json(periodic)},
                         {"antiperiodic_list", to_json(anti)}}}};
    emit(a, doc.dump(2));
    return kExitOk;
}

int cmd_sweep(const CommonArgs& a)
{
    validate_window(a);
    const NormalizedPotential pot = load_potential(a);
    const ScanOptions opt = scan_options(a);
    Propagator prop(pot, opt.propagate);

    std::vector<std::array<double, 6>> rows;
    const double s_lo = std::sqrt(std::max(0.0, a.window[0]));
    const double s_hi = std::sqrt(std::max(0.0, a.window[1]));
    const int n = std::max(2, static_cast<int>(std::ceil((s_hi - s_lo) * a.grid)));
    for (int i = 0; i <= n; ++i) {
        const double s = s_lo + (s_hi - s_lo) * i / n;
        const double l = (a.window[0] < 0.0 && i == 0) ? a.window[0] : s * s;
        const LyapunovData d = lyapunov_at(prop, Complex(l, 0.0));
        rows.push_back({l, d.delta1.real(), d.delta2.real(), d.rho.real(), d.d_plus.real(),
                        d.d_minus.real()});
    }
    if (a.format == "csv") {
        emit(a, sweep_csv(rows));
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows)
            arr.push_back({{"lambda", r[0]},
                           {"delta1", r[1]},
                           {"delta2", r[2]},
                           {"rho", r[3]},
                           {"d_plus", r[4]},
                           {"d_minus", r[5]}});
        nlohmann::json doc{{"meta", meta_json(echo_config(a, "sweep"), pot)},
                           {"results", {{"sweep", arr}}}};
        emit(a, doc.dump(2));
    }
    return kExitOk;
}

int cmd_verify(const CommonArgs& a, const std::string& suite)
{
    const auto checks = run_suite(suite, a.n_max);
    bool all = true;
    for (const auto& c : checks) {
        all = all && c.passed;
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name
                  << " (measured=" << format_double(c.measured)
                  << ", threshold=" << format_double(c.threshold) << ", "
                  << format_double(c.seconds) << " s)\n";
        if (!c.detail.empty())
            std::cout << "       " << c.detail << "\n";
    }
    if (!a.out.empty()) {
        std::ofstream f(a.out, std::ios::binary);
        f << to_json(checks).dump(2);
    }
    return all ? kExitOk : kExitVerify;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Band, gap and resonance engine for periodic 2x2 matrix potentials"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string which = "both";
    std::string suite;

    auto* bands = app.add_subcommand("bands", "bands and classified gaps over a real window");
    add_common(bands, args);

    auto* eigs = app.add_subcommand("eigs", "periodic / anti-periodic eigenvalues");
    add_common(eigs, args);
    eigs->add_option("--which", which, "periodic, antiperiodic or both")
        ->check(CLI::IsMember({"periodic", "antiperiodic", "both"}));

    auto* res = app.add_subcommand("resonances", "real or complex zeros of rho");
    add_common(res, args);
    res->add_option("--rect", args.rect, "complex rectangle: re0 re1 im0 im1")->expected(4);

    auto* rec = app.add_subcommand("reconstruct",
                                   "spectral-determinant products from eigenvalue lists");
    add_common(rec, args);

    auto* sweep = app.add_subcommand("sweep", "CSV/JSON sweep of the spectral functions");
    add_common(sweep, args);

    auto* verify = app.add_subcommand("verify", "built-in verification suites");
    verify->add_option("suite", suite, "suite name")
        ->required()
        ->check(CLI::IsMember(suite_names()));
    add_common(verify, args, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (bands->parsed())
            return cmd_bands(args);
        if (eigs->parsed())
            return cmd_eigs(args, which);
        if (res->parsed())
            return cmd_resonances(args);
        if (rec->parsed())
            return cmd_reconstruct(args);
        if (sweep->parsed())
            return cmd_sweep(args);
        if (verify->parsed())
            return cmd_verify(args, suite);
    } catch (const SchemaError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericError& e) {
        std::cerr << "numerical resolution failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitConfig;
}
