#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bdhvar/experiment.hpp"

using namespace bdhvar;

TEST_CASE("csv escaping round trip") {
    CsvTable t;
    t.header = {"a", "b"};
    t.rows.push_back({"plain", "with,comma"});
    t.rows.push_back({"with \"quote\"", "multi,\"mix\""});
    std::ostringstream os;
    write_csv(t, os);
    std::istringstream is(os.str());
    CsvTable back = read_csv(is);
    REQUIRE(back.header == t.header);
    REQUIRE(back.rows == t.rows);
}

TEST_CASE("atomic write leaves no partial file") {
    namespace fs = std::filesystem;
    CsvTable t;
    t.header = {"x"};
    t.rows.push_back({"1"});
    fs::path dir = fs::temp_directory_path() / "bdhvar_test_csv";
    fs::create_directories(dir);
    fs::path target = dir / "out.csv";
    write_csv_atomic(t, target.string());
    REQUIRE(fs::exists(target));
    REQUIRE_FALSE(fs::exists(target.string() + ".tmp"));
    // failure before rename leaves the destination untouched
    fs::path bad = dir / "no_such_subdir" / "out.csv";
    REQUIRE_THROWS(write_csv_atomic(t, bad.string()));
    REQUIRE_FALSE(fs::exists(bad));
    fs::remove_all(dir);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg;
    cfg.subcommand = Subcommand::variance;
    REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);  // no fields
    cfg.fields = {"Q"};
    REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);  // no x
    cfg.xs = {1000};
    REQUIRE_NOTHROW(validate(cfg));
    cfg.q_grid.kind = QGrid::Kind::explicit_list;
    cfg.q_grid.list = {2000};
    REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);  // Q > x
    cfg.q_grid.list = {500};
    cfg.threads = 0;
    REQUIRE_THROWS_AS(validate(cfg), std::invalid_argument);

    ExperimentConfig ph;
    ph.subcommand = Subcommand::phik;
    ph.fields = {"Q", "Q(i)"};
    REQUIRE_THROWS_AS(validate(ph), std::invalid_argument);  // schema has no field column
}

TEST_CASE("geometric grid") {
    QGrid g;
    g.kind = QGrid::Kind::geometric;
    g.k = 3;
    REQUIRE(g.values(1000) == std::vector<u64>{250, 500, 1000});
    g.kind = QGrid::Kind::full;
    REQUIRE(g.values(64) == std::vector<u64>{64});
}

TEST_CASE("regress_slope recovers synthetic slopes exactly") {
    std::vector<SlopePoint> rows;
    const double deg = 2.0, C2 = -7.25;
    for (u64 q : {1250ull, 2500ull, 5000ull, 10000ull}) {
        double S = deg * 1e4 * q * std::log(static_cast<double>(q)) + C2 * q * 1e4;
        rows.push_back({10000, q, S});
    }
    SlopeFit fit = regress_slope(rows);
    REQUIRE(fit.slope == Catch::Approx(deg).epsilon(1e-9));
    REQUIRE(fit.intercept == Catch::Approx(C2).epsilon(1e-9));
    REQUIRE(fit.r2 == Catch::Approx(1.0).epsilon(1e-12));

    REQUIRE_THROWS_AS(regress_slope({rows[0], rows[1], rows[2]}), std::invalid_argument);
    std::vector<SlopePoint> degenerate(4, rows[0]);
    REQUIRE_THROWS_AS(regress_slope(degenerate), std::invalid_argument);
    std::vector<SlopePoint> mixed = rows;
    mixed[1].x = 20000;
    REQUIRE_THROWS_AS(regress_slope(mixed), std::invalid_argument);
}

TEST_CASE("run_experiment variance smoke") {
    ExperimentConfig cfg;
    cfg.subcommand = Subcommand::variance;
    cfg.fields = {"Q"};
    cfg.xs = {10000};
    cfg.q_grid.kind = QGrid::Kind::full;
    CsvTable t = run_experiment(cfg);
    REQUIRE(t.rows.size() == 1);
    const auto& row = t.rows[0];
    REQUIRE(row[0] == "Q");
    REQUIRE(row[8] == "eq5_full_range");
    REQUIRE(row.back().empty());  // no error
    double S = std::stod(row[4]);
    double pred = std::stod(row[7]);
    REQUIRE(S > 0.0);
    REQUIRE(std::abs(S / pred - 1.0) < 0.05);  // desk-scale agreement at x = 1e4
}

TEST_CASE("run_experiment phik matches the product formula") {
    ExperimentConfig cfg;
    cfg.subcommand = Subcommand::phik;
    cfg.fields = {"quad:-1"};
    cfg.q_max = 20;
    CsvTable t = run_experiment(cfg);
    REQUIRE(t.rows.size() == 20);
    FieldSpec F = parse_field("quad:-1");
    BaseData bd = base_data(F);
    for (u64 q = 1; q <= 20; ++q) {
        const auto& row = t.rows[q - 1];
        REQUIRE(row[0] == std::to_string(q));
        REQUIRE(row[2] == std::to_string(phi_k_by_formula(F, bd, q)));
        REQUIRE(row[4] == "yes");
    }
}

TEST_CASE("run_experiment reports per-cell errors without aborting") {
    ExperimentConfig cfg;
    cfg.subcommand = Subcommand::field_info;
    cfg.fields = {"Q", "quad:12", "cyc:5"};
    CsvTable t = run_experiment(cfg);
    REQUIRE(t.rows.size() == 3);
    REQUIRE(t.rows[0].back().empty());
    REQUIRE_FALSE(t.rows[1].back().empty());  // quad:12 invalid, row kept
    REQUIRE(t.rows[2].back().empty());
}

TEST_CASE("sequential runs are byte identical") {
    ExperimentConfig cfg;
    cfg.subcommand = Subcommand::variance;
    cfg.fields = {"Q(i)"};
    cfg.xs = {2000};
    cfg.q_grid.kind = QGrid::Kind::geometric;
    cfg.q_grid.k = 3;
    cfg.sequential = true;
    auto render = [&] {
        std::ostringstream os;
        CsvTable t = run_experiment(cfg);
        for (auto& row : t.rows) row[10].clear();  // runtime_s differs between runs
        write_csv(t, os);
        return os.str();
    };
    REQUIRE(render() == render());
}

TEST_CASE("regress subcommand consumes variance output") {
    namespace fs = std::filesystem;
    ExperimentConfig cfg;
    cfg.subcommand = Subcommand::variance;
    cfg.fields = {"Q"};
    cfg.xs = {4000};
    cfg.q_grid.kind = QGrid::Kind::geometric;
    cfg.q_grid.k = 4;
    CsvTable t = run_experiment(cfg);
    fs::path path = fs::temp_directory_path() / "bdhvar_regress_in.csv";
    write_csv_atomic(t, path.string());

    ExperimentConfig rg;
    rg.subcommand = Subcommand::regress;
    rg.in_path = path.string();
    CsvTable out = run_experiment(rg);
    REQUIRE(out.rows.size() == 1);
    REQUIRE(out.rows[0][0] == "Q");
    double slope = std::stod(out.rows[0][2]);
    REQUIRE(std::abs(slope - 1.0) < 0.5);  // desk scale at x = 4000
    fs::remove(path);
}

TEST_CASE("verify_suite quick passes on Q and Q(i)") {
    for (const char* name : {"Q", "Q(i)"}) {
        VerifyReport rep = verify_suite(parse_field(name), /*full=*/false);
        for (const auto& c : rep.checks) {
            INFO(name << " check " << c.name << " measured " << c.measured << " detail " << c.detail);
            REQUIRE(c.pass);
        }
    }
}
