// bdhvar: prime-ideal counting experiments for Galois number fields.
//
// Subcommands
//   field-info  field invariants (degree, conductor, ramified primes)
//   phik        table of phi(q), phi_K(q) and the subgroup index
//   constants   numerically evaluated Dirichlet-series constants
//   variance    S(x; Q1, Q2) with theorem-side predictions
//   verify      replay the library's analytic identities (quick/full)
//   regress     slope of S/(xQ) against log Q from a variance CSV
//
// Output is CSV (stdout, or atomic file write with --out).  A key=value
// config file can seed any common option; explicit flags win.

#include <CLI11.hpp>

#include "bdhvar/experiment.hpp"

int main(int argc, char** argv) {
    using namespace bdhvar;

    CLI::App app{"Barban-Davenport-Halberstam variance experiments for Galois number fields"};
    app.set_config("--config", "", "key=value config file (flags win)");
    app.require_subcommand(1);

    ExperimentConfig cfg;
    std::string q_grid_spec;
    bool q_full = false;
    std::vector<u64> q_list;

    app.add_option("--out", cfg.out_path, "output CSV path (atomic write); default stdout");
    app.add_option("--threads", cfg.threads, "worker threads")->default_val(1);
    app.add_flag("--sequential", cfg.sequential, "force single-threaded deterministic mode");
    app.add_flag("--gnuplot", cfg.gnuplot, "also write a two-column <out>.dat (variance)");

    auto* info = app.add_subcommand("field-info", "describe fields");
    info->add_option("--field", cfg.fields, "field descriptor (repeatable)")->required();

    auto* phik = app.add_subcommand("phik", "phi_K table for one field");
    phik->add_option("--field", cfg.fields, "field descriptor")->required();
    phik->add_option("--q-max", cfg.q_max, "table up to this modulus")->default_val(100);

    auto* consts = app.add_subcommand("constants", "Dirichlet-series constants");
    consts->add_option("--field", cfg.fields, "field descriptor (repeatable)")->required();
    consts->add_option("--xs", cfg.fit_xs, "fit sample points (default 1e3,1e4,1e5,1e6)")
        ->delimiter(',');

    auto* var = app.add_subcommand("variance", "variance S(x;Q1,Q2) vs predictions");
    var->add_option("--field", cfg.fields, "field descriptor (repeatable)")->required();
    var->add_option("--x", cfg.xs, "norm bound x (repeatable / comma list)")
        ->required()
        ->delimiter(',');
    auto* og = var->add_option("--q-grid", q_grid_spec, "geometric:k  (Q = x/2^j, j < k)");
    auto* ol = var->add_option("--q-list", q_list, "explicit Q values")->delimiter(',');
    auto* of = var->add_flag("--q-full", q_full, "single cell with Q = x (default)");
    og->excludes(ol)->excludes(of);
    ol->excludes(of);
    var->add_option("--q1", cfg.q1, "lower modulus cutoff Q1 (default 0)");
    var->add_flag("--hj", cfg.with_hj, "also report the H/J decomposition");

    auto* verify = app.add_subcommand("verify", "identity verification suite");
    verify->add_option("--field", cfg.fields, "field descriptor (repeatable)")->required();
    verify->add_option("--budget", cfg.budget, "quick | full")->default_val("quick");

    auto* regress = app.add_subcommand("regress", "slope fit from variance CSV");
    regress->add_option("--in", cfg.in_path, "variance CSV produced by this tool")->required();

    // common options may appear after the subcommand name
    for (auto* sc : {info, phik, consts, var, verify, regress}) sc->fallthrough();

    CLI11_PARSE(app, argc, argv);

    if (info->parsed()) cfg.subcommand = Subcommand::field_info;
    if (phik->parsed()) cfg.subcommand = Subcommand::phik;
    if (consts->parsed()) cfg.subcommand = Subcommand::constants;
    if (var->parsed()) cfg.subcommand = Subcommand::variance;
    if (verify->parsed()) cfg.subcommand = Subcommand::verify;
    if (regress->parsed()) cfg.subcommand = Subcommand::regress;

    if (var->parsed()) {
        if (!q_grid_spec.empty()) {
            if (q_grid_spec.rfind("geometric:", 0) != 0) {
                std::cerr << "error: --q-grid expects geometric:k" << std::endl;
                return 1;
            }
            cfg.q_grid.kind = QGrid::Kind::geometric;
            cfg.q_grid.k = std::stoi(q_grid_spec.substr(10));
        } else if (!q_list.empty()) {
            cfg.q_grid.kind = QGrid::Kind::explicit_list;
            cfg.q_grid.list = q_list;
        } else {
            cfg.q_grid.kind = QGrid::Kind::full;
        }
    }

    try {
        CsvTable table = run_experiment(cfg);
        emit_results(table, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
    return 0;
}
