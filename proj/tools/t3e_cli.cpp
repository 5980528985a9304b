// Command-line front end: evaluate and export the constant ledger, run the
// verification suites, run the harmonic 1-form pipeline, and solve for the
// maximal admissible metric perturbation.  Artifacts are deterministic for a
// fixed configuration (the embedded timestamp is informational only) and
// every artifact carries the configuration plus the ledger table hash.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "t3e/export.hpp"

namespace fs = std::filesystem;
using namespace t3e;

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    return buf;
}

PerturbationKind parse_kind(const std::string& s) {
    if (s == "conformal") return PerturbationKind::conformal;
    if (s == "offdiag") return PerturbationKind::offdiag;
    if (s == "random" || s == "random_seeded") return PerturbationKind::random_seeded;
    throw ConfigError("unknown perturbation kind: " + s);
}

struct CommonOutput {
    std::string out_dir = "out";

    fs::path prepare() const {
        fs::path dir = out_dir;
        if (const char* env = std::getenv("T3E_OUTPUT_DIR")) dir = env;
        fs::create_directories(dir);
        return dir;
    }
};

ordered_json artifact_envelope(const ordered_json& config, const Ledger& ledger) {
    ordered_json j;
    j["config"] = config;
    j["ledger_hash"] = ledger_hash_string(ledger_rows(ledger));
    j["timestamp"] = iso_timestamp();  // excluded from any content hashing
    return j;
}

LedgerOptions parse_ledger_options(const std::string& inverse, const std::string& christoffel) {
    LedgerOptions opts;
    if (inverse == "derived")
        opts.inverse_bound = InverseBoundMode::derived;
    else if (inverse != "stated")
        throw ConfigError("unknown inverse-bound mode: " + inverse);
    if (christoffel == "first-order")
        opts.christoffel = ChristoffelMode::first_order;
    else if (christoffel != "quadratic")
        throw ConfigError("unknown christoffel mode: " + christoffel);
    return opts;
}

int cmd_ledger(const std::string& format, const std::vector<double>& deltas,
               const CommonOutput& out, const LedgerOptions& opts) {
    Ledger ledger(opts);
    std::vector<double> probes = deltas.empty() ? std::vector<double>{0.0, 1e-15, 1e-3, 1e-2}
                                                : deltas;
    auto rows = ledger_rows(ledger, probes);
    fs::path dir = out.prepare();

    ordered_json config;
    config["command"] = "ledger";
    config["format"] = format;
    config["delta_probes"] = probes;

    const std::string hash = ledger_hash_string(rows);
    if (format == "md") {
        std::string md = "<!-- config: " + config.dump() + " ledger_hash: " + hash + " -->\n" +
                         ledger_rows_markdown(rows);
        write_file((dir / "ledger.md").string(), md);
        std::cout << md;
    } else if (format == "csv") {
        std::string csv = "# config: " + config.dump() + " ledger_hash: " + hash + "\n" +
                          ledger_rows_csv(rows);
        write_file((dir / "ledger.csv").string(), csv);
        std::cout << csv;
    } else if (format == "json") {
        ordered_json j = artifact_envelope(config, ledger);
        j["rows"] = ledger_rows_json(rows);
        write_file((dir / "ledger.json").string(), j.dump(2) + "\n");
        std::cout << "wrote " << (dir / "ledger.json").string() << " (" << rows.size()
                  << " rows, hash " << ledger_hash_string(rows) << ")\n";
    } else {
        throw ConfigError("unknown format: " + format);
    }
    return 0;
}

int cmd_verify(const std::string& suite, int grid_n, std::uint64_t seed, int cases, double delta,
               const std::string& kind, const CommonOutput& out, const LedgerOptions& opts) {
    Ledger ledger(opts);
    SuiteConfig cfg;
    cfg.grid = GridSpec(grid_n);
    cfg.seed = seed;
    cfg.cases = cases;
    cfg.delta = delta;
    cfg.kind = parse_kind(kind);
    fs::path dir = out.prepare();

    std::vector<std::string> suites =
        (suite == "all") ? suite_names() : std::vector<std::string>{suite};
    bool ok = true;
    for (const auto& name : suites) {
        auto recs = run_suite(ledger, name, cfg);
        write_file((dir / ("verify-" + name + ".jsonl")).string(), records_jsonl(recs));
        ordered_json config;
        config["command"] = "verify";
        config["suite"] = name;
        config["grid_n"] = grid_n;
        config["seed"] = seed;
        config["cases"] = cases;
        config["delta"] = delta;
        config["kind"] = kind;
        ordered_json summary = artifact_envelope(config, ledger);
        summary["all_gating_pass"] = all_gating_pass(recs);
        summary["records"] = recs.size();
        write_file((dir / ("verify-" + name + "-summary.json")).string(), summary.dump(2) + "\n");
        write_file((dir / ("verify-" + name + "-summary.csv")).string(),
                   records_csv_summary(recs));
        const bool suite_ok = all_gating_pass(recs);
        ok = ok && suite_ok;
        int gating_total = 0, gating_passed = 0, informational = 0;
        for (const auto& r : recs) {
            if (r.gating) {
                ++gating_total;
                gating_passed += r.pass;
            } else {
                ++informational;
            }
        }
        std::cout << name << ": " << gating_passed << "/" << gating_total
                  << " gating records pass";
        if (informational > 0) std::cout << ", " << informational << " informational";
        std::cout << (suite_ok ? "" : "  [GATING FAILURE]") << "\n";
    }
    return ok ? 0 : 1;
}

int cmd_one_form(double delta, const std::string& kind, int grid_n, std::uint64_t seed, int axis,
                 double tol, int max_iter, bool dump_fields, const CommonOutput& out,
                 const LedgerOptions& opts) {
    Ledger ledger(opts);
    MetricContext ctx(perturbation_family(delta, parse_kind(kind), GridSpec(grid_n), seed));
    OneFormCertificate cert = certify_one_form(ledger, ctx, axis - 1, tol, max_iter);
    fs::path dir = out.prepare();

    ordered_json config;
    config["command"] = "one-form";
    config["delta"] = delta;
    config["kind"] = kind;
    config["grid_n"] = grid_n;
    config["seed"] = seed;
    config["axis"] = axis;
    config["tol"] = tol;
    config["max_iter"] = max_iter;
    ordered_json j = artifact_envelope(config, ledger);
    j["certificate"] = certificate_json(cert);
    write_file((dir / "one-form-certificate.json").string(), j.dump(2) + "\n");

    if (dump_fields) {
        SolveResult sol = solve_xi(ctx, axis - 1, tol, max_iter);
        OneFormField omega = build_one_form(ctx.g.grid, sol.xi, axis - 1);
        save_one_form((dir / "one-form-omega").string(), omega, kind, seed);
        save_metric_field((dir / "one-form-metric").string(), ctx.g, kind, seed);
    }

    std::cout << "one-form certificate: " << (cert.pass ? "pass" : "FAIL")
              << "  min |omega|_g = " << format_full(cert.min_pointwise_norm)
              << "  d*_g residual = " << format_full(cert.residual_codifferential)
              << "  sign: " << cert.sign_choice << "\n";
    if (cert.epsilon_defined)
        std::cout << "  epsilon(delta) = [" << format_full(cert.epsilon_bound.lo()) << ", "
                  << format_full(cert.epsilon_bound.hi()) << "]\n";
    else
        std::cout << "  epsilon(delta): not evaluable at this delta (beyond-theorem regime)\n";
    return cert.pass ? 0 : 1;
}

int cmd_solve_delta(const std::string& criterion, const CommonOutput& out,
                    const LedgerOptions& opts) {
    Ledger ledger(opts);
    DeltaCriterion crit;
    if (criterion == "absorption")
        crit = DeltaCriterion::absorption;
    else if (criterion == "one-form" || criterion == "one_form")
        crit = DeltaCriterion::one_form;
    else
        throw ConfigError("unknown criterion: " + criterion);
    DeltaStarResult r = ledger.max_admissible_delta(crit);
    fs::path dir = out.prepare();

    ordered_json config;
    config["command"] = "solve-delta";
    config["criterion"] = criterion;
    ordered_json j = artifact_envelope(config, ledger);
    j["result"] = delta_star_json(r);
    write_file((dir / ("delta-star-" + criterion + ".json")).string(), j.dump(2) + "\n");

    std::cout << "delta* (" << criterion << ") = " << format_full(r.delta_star) << "\n"
              << "  certified " << r.holds_quantity << " at " << format_full(r.delta_holds)
              << ": [" << format_full(r.holds_value.lo()) << ", "
              << format_full(r.holds_value.hi()) << "]\n"
              << "  certified failure (" << r.fails_quantity << ") at "
              << format_full(r.delta_fails) << ": [" << format_full(r.fails_value.lo()) << ", "
              << format_full(r.fails_value.hi()) << "]\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"explicit elliptic-estimate constants on the 3-torus: "
                 "rigorous ledger, verification suites, harmonic 1-form pipeline"};
    app.require_subcommand(1);

    CommonOutput out;
    std::string inverse_mode = "stated";
    std::string christoffel_mode = "quadratic";
    app.add_option("--out", out.out_dir, "output directory (or T3E_OUTPUT_DIR)")
        ->capture_default_str();
    app.add_option("--inverse-bound", inverse_mode, "inverse-metric bound: stated | derived")
        ->capture_default_str();
    app.add_option("--christoffel", christoffel_mode,
                   "Christoffel bound variant: quadratic | first-order")
        ->capture_default_str();

    auto* ledger_cmd = app.add_subcommand("ledger", "evaluate and export the constant table");
    std::string format = "md";
    std::vector<double> deltas;
    ledger_cmd->add_option("--format", format, "md | csv | json")->capture_default_str();
    ledger_cmd->add_option("--delta", deltas, "delta probes for the parametric constants");

    auto* verify_cmd = app.add_subcommand("verify", "run verification suites");
    std::string suite = "all";
    int grid_n = 32;
    std::uint64_t seed = 0;
    int cases = 20;
    double delta = 1e-2;
    std::string kind = "conformal";
    verify_cmd->add_option("--suite", suite, "suite name or 'all'")->capture_default_str();
    verify_cmd->add_option("--grid", grid_n, "grid points per axis")->capture_default_str();
    verify_cmd->add_option("--seed", seed, "base random seed")->capture_default_str();
    verify_cmd->add_option("--cases", cases, "test cases per suite")->capture_default_str();
    verify_cmd->add_option("--delta", delta, "perturbation size for metric suites")
        ->capture_default_str();
    verify_cmd->add_option("--kind", kind, "conformal | offdiag | random")->capture_default_str();

    auto* oneform_cmd = app.add_subcommand("one-form", "harmonic 1-form pipeline + certificate");
    double of_delta = 1e-2;
    std::string of_kind = "conformal";
    int of_grid = 32;
    std::uint64_t of_seed = 0;
    int axis = 1;
    double tol = 1e-10;
    int max_iter = 200;
    bool dump_fields = false;
    oneform_cmd->add_option("--delta", of_delta, "perturbation size")->capture_default_str();
    oneform_cmd->add_option("--kind", of_kind, "conformal | offdiag | random")
        ->capture_default_str();
    oneform_cmd->add_option("--grid", of_grid, "grid points per axis")->capture_default_str();
    oneform_cmd->add_option("--seed", of_seed, "seed")->capture_default_str();
    oneform_cmd->add_option("--axis", axis, "coordinate 1-form axis (1, 2 or 3)")
        ->capture_default_str();
    oneform_cmd->add_option("--tol", tol, "solver relative-residual tolerance")
        ->capture_default_str();
    oneform_cmd->add_option("--max-iter", max_iter, "solver iteration cap")->capture_default_str();
    oneform_cmd->add_flag("--dump-fields", dump_fields, "write omega and g as binary snapshots");

    auto* solve_cmd = app.add_subcommand("solve-delta", "bisect the maximal admissible delta");
    std::string criterion = "absorption";
    solve_cmd->add_option("--criterion", criterion, "absorption | one-form")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        LedgerOptions opts = parse_ledger_options(inverse_mode, christoffel_mode);
        if (ledger_cmd->parsed()) return cmd_ledger(format, deltas, out, opts);
        if (verify_cmd->parsed())
            return cmd_verify(suite, grid_n, seed, cases, delta, kind, out, opts);
        if (oneform_cmd->parsed())
            return cmd_one_form(of_delta, of_kind, of_grid, of_seed, axis, tol, max_iter,
                                dump_fields, out, opts);
        if (solve_cmd->parsed()) return cmd_solve_delta(criterion, out, opts);
    } catch (const std::exception& e) {
        ordered_json diag;
        diag["error"] = e.what();
        std::cerr << diag.dump() << "\n";
        return 2;
    }
    return 2;
}
