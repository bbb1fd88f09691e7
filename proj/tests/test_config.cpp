#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "homog/expr.hpp"
#include "homog/harness.hpp"

using namespace homog;

namespace {

std::string minimal_config() {
  return "experiment.kind micro-run\n"
         "grid.cells_per_side 4\n"
         "time.dyadic_level_m 2\n"
         "load.expr_x t * sin(pi*x) * sin(pi*y)\n";
}

Eigen::VectorXd pt2(double a, double b) {
  Eigen::Vector2d v(a, b);
  return v;
}

}  // namespace

TEST_CASE("expression grammar: values, precedence, errors") {
  CHECK(Expr::parse("1 + 2 * 3")(pt2(0, 0), 0.0) == doctest::Approx(7.0));
  CHECK(Expr::parse("(1 + 2) * 3")(pt2(0, 0), 0.0) == doctest::Approx(9.0));
  CHECK(Expr::parse("2 ^ 3 ^ 2")(pt2(0, 0), 0.0) == doctest::Approx(512.0));  // right assoc
  CHECK(Expr::parse("-x + t")(pt2(1.5, 0), 2.0) == doctest::Approx(0.5));
  CHECK(Expr::parse("sin(pi / 2) + cos(0)")(pt2(0, 0), 0.0) == doctest::Approx(2.0));
  CHECK(Expr::parse("sqrt(abs(-9))")(pt2(0, 0), 0.0) == doctest::Approx(3.0));
  CHECK(Expr::parse("exp(0) * y")(pt2(0, 4.0), 0.0) == doctest::Approx(4.0));
  CHECK(Expr::parse("1 - 2 - 3")(pt2(0, 0), 0.0) == doctest::Approx(-4.0));  // left assoc
  CHECK_THROWS_AS(Expr::parse("1 +"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("foo(1)"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("(1"), std::invalid_argument);
  CHECK_THROWS_AS(Expr::parse("1 2"), std::invalid_argument);
}

TEST_CASE("minimal config parses with defaults filled") {
  ExperimentConfig cfg = parse_config(minimal_config());
  CHECK(cfg.kind == ExperimentKind::micro_run);
  CHECK(cfg.dim == 2);
  CHECK(cfg.phases.size() == 2);  // default two-phase checkerboard
  CHECK(cfg.cells_per_side == 4);
  CHECK(cfg.dyadic_level_m == 2);
  CHECK(cfg.tol.stagger == doctest::Approx(1e-8));
  CHECK(cfg.seed_list == std::vector<std::uint64_t>{1});
  // the load expression actually evaluates
  const Eigen::VectorXd b = cfg.load_fn()(pt2(0.5, 0.5), 2.0);
  CHECK(b[0] == doctest::Approx(2.0));
  CHECK(b[1] == doctest::Approx(0.0));
}

TEST_CASE("config rejections carry locations and field names") {
  // unknown key with line number
  try {
    parse_config("experiment.kind micro-run\nbogus.key 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& ex) {
    CHECK(std::string(ex.what()).find("line 2") != std::string::npos);
    CHECK(std::string(ex.what()).find("bogus.key") != std::string::npos);
  }
  // eta list not decreasing names the field
  try {
    parse_config("eta.list 0.1 0.2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& ex) {
    CHECK(std::string(ex.what()).find("eta.list") != std::string::npos);
    CHECK(std::string(ex.what()).find("decreasing") != std::string::npos);
  }
  // probabilities summing to 0.99 report the sum
  try {
    parse_config(
        "phase.0.probability 0.49\nphase.0.stiffness_scalar 1\n"
        "phase.1.probability 0.5\nphase.1.stiffness_scalar 2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& ex) {
    CHECK(std::string(ex.what()).find("0.99") != std::string::npos);
  }
  // malformed number with line and key
  CHECK_THROWS_AS(parse_config("grid.length abc\n"), ConfigError);
  // malformed load expression carries the key
  try {
    parse_config("load.expr_x 1 +\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& ex) {
    CHECK(std::string(ex.what()).find("load.expr_x") != std::string::npos);
  }
  // unresolved microstructure: spacing coarser than eta
  CHECK_THROWS_AS(parse_config("grid.cells_per_side 4\neta.list 0.125\n"), ConfigError);
  // duplicate key
  CHECK_THROWS_AS(parse_config("grid.length 1\ngrid.length 2\n"), ConfigError);
}

TEST_CASE("csv formatting round-trips doubles") {
  for (double v : {1.0 / 3.0, 2.5e-17, -1.0e100, 0.1, 123456789.123456789}) {
    CHECK(std::stod(fmt17(v)) == v);
  }
}

TEST_CASE("micro-run: deterministic report with ledgers and tables") {
  ExperimentConfig cfg = parse_config(minimal_config());
  RunReport a = run(cfg);
  REQUIRE(!a.numerical_failure);
  CHECK(a.all_pass());
  CHECK(a.exit_code() == 0);
  // 2^m + 1 checkpoints plus the summary table
  CHECK(a.tables.size() == 6);
  CHECK(a.ledgers.size() == 5);
  // ledger keys of the sidecar schema
  const auto& j = a.ledgers.back().second;
  for (const char* key : {"step", "t", "elastic", "hardening", "regularization",
                          "dissipation_cum", "work_cum", "energy_margin"})
    CHECK(j.contains(key));
  // rerun: byte-identical CSV bodies
  RunReport b = run(cfg);
  REQUIRE(a.tables.size() == b.tables.size());
  for (std::size_t i = 0; i < a.tables.size(); ++i) CHECK(a.tables[i].body() == b.tables[i].body());
}

TEST_CASE("micro-run in the elastic limit has a zero dissipation column") {
  std::string text = minimal_config();
  text +=
      "phase.0.probability 0.5\nphase.0.stiffness_scalar 1\nphase.0.yield_stress 100\n"
      "phase.1.probability 0.5\nphase.1.stiffness_scalar 2\nphase.1.yield_stress 100\n";
  ExperimentConfig cfg = parse_config(text);
  RunReport rep = run(cfg);
  REQUIRE(!rep.numerical_failure);
  const CsvTable& summary = rep.tables.back();
  REQUIRE(summary.header[4] == "dissipation_inc");
  for (const auto& row : summary.rows) CHECK(std::stod(row[4]) == 0.0);
}

TEST_CASE("cell-problem report carries the effective tensor ledger") {
  std::string text =
      "experiment.kind cell-problem\n"
      "grid.cells_per_side 8\n"
      "grid.periodic true\n"
      "seeds.list 1 2\n";
  ExperimentConfig cfg = parse_config(text);
  RunReport rep = run(cfg);
  REQUIRE(!rep.numerical_failure);
  CHECK(rep.all_pass());
  REQUIRE(rep.ledgers.size() == 1);
  const auto& j = rep.ledgers.front().second;
  CHECK(j["samples"] == 2);
  CHECK(j["mean_row_major"].size() == 9);
}

TEST_CASE("eta-sweep produces the convergence table and verdicts") {
  std::string text =
      "experiment.kind eta-sweep\n"
      "eta.list 0.125 0.03125\n"
      "seeds.list 1 2 3 4\n";
  ExperimentConfig cfg = parse_config(text);
  RunReport rep = run(cfg);
  REQUIRE(!rep.numerical_failure);
  REQUIRE(rep.tables.size() == 1);
  const CsvTable& t = rep.tables.front();
  CHECK(t.header == std::vector<std::string>{"eta", "entry_id", "seed", "pairing", "limit",
                                             "abs_err"});
  CHECK(t.rows.size() == 2 * 4 * 24);
  CHECK(rep.verdicts.size() == 2);
}

TEST_CASE("emit writes the report file tree") {
  namespace fs = std::filesystem;
  ExperimentConfig cfg = parse_config(minimal_config());
  RunReport rep = run(cfg);
  const fs::path dir = fs::temp_directory_path() / "homog_emit_test";
  fs::remove_all(dir);
  emit(rep, dir.string());
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "tables" / "micro_summary.csv"));
  CHECK(fs::exists(dir / "ledgers" / "micro_step_0000.json"));
  std::ifstream in(dir / "report.json");
  nlohmann::json j;
  in >> j;
  CHECK(j["kind"] == "micro-run");
  CHECK(j["verdicts"].size() == rep.verdicts.size());
  fs::remove_all(dir);
}

TEST_CASE("numerical failures are captured into the report") {
  // a load that evaluates to NaN poisons the linear solve
  std::string text =
      "experiment.kind micro-run\n"
      "grid.cells_per_side 4\n"
      "time.dyadic_level_m 2\n"
      "load.expr_x sqrt(0 - 1 - t)\n";
  ExperimentConfig cfg = parse_config(text);
  RunReport rep = run(cfg);
  CHECK(rep.numerical_failure);
  CHECK(rep.exit_code() == 3);
  REQUIRE(!rep.statuses.empty());
  CHECK(rep.statuses.front().find("numerical failure") != std::string::npos);
}
