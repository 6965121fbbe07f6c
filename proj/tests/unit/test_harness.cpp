#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mazenet/error.hpp"
#include "mazenet/experiment.hpp"

using namespace mazenet;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const std::string& out_file = "/dev/null") {
  const std::string cmd = std::string(MAZENET_CLI_PATH) + " " + args + " > " + out_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig small_batch() {
  ExperimentConfig c;
  c.maze_n = 5;
  c.batch_sets = 3;
  c.train_count = 2;
  c.test_count = 2;
  c.training.epochs = 3;
  c.training.cluster_k = 4;
  c.methods = {Method::None, Method::Euclidean};
  return c;
}

}  // namespace

TEST_CASE("method names") {
  for (Method m : kMethods) CHECK(parse_method(to_string(m)) == m);
  CHECK(kMethods.size() == 5);
  CHECK_THROWS_AS(parse_method("random"), ArgumentError);
  CHECK(parse_method_list("all").size() == 5);
  CHECK(parse_method_list("none, euclidean") == std::vector<Method>{Method::None, Method::Euclidean});
  CHECK_THROWS_AS(parse_method_list("none,none"), ArgumentError);
}

TEST_CASE("settings and config text") {
  ExperimentConfig c;
  apply_setting(c, "--n", "8");
  apply_setting(c, "obstacle_fraction", "0.2");
  apply_setting(c, "gain-mode", "inverse");
  apply_setting(c, "per-maze-updates", "true");
  apply_setting(c, "schedule", "offset");
  CHECK(c.maze_n == 8);
  CHECK(c.obstacle_fraction == 0.2);
  CHECK(c.training.gain_mode == GainMode::NaiveInverse);
  CHECK(c.training.per_maze_updates);
  CHECK(c.training.schedule == ReclusterSchedule::Offset);
  CHECK_THROWS_AS(apply_setting(c, "colour", "red"), ArgumentError);
  CHECK_THROWS_AS(apply_setting(c, "n", "8x"), ArgumentError);
  CHECK_THROWS_AS(apply_setting(c, "per-maze-updates", "maybe"), ArgumentError);

  const auto kv = parse_config_text("# comment\nn = 6\n\nepochs=4  # trailing\n");
  REQUIRE(kv.size() == 2);
  CHECK(kv[0] == std::pair<std::string, std::string>{"n", "6"});
  CHECK(kv[1] == std::pair<std::string, std::string>{"epochs", "4"});
  try {
    parse_config_text("n = 6\nbroken line\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  c.methods = {Method::Submaze};
  c.maze_n = 10;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
  c.maze_n = 12;
  CHECK_NOTHROW(c.validate());
  c.methods = {Method::Cluster};
  c.training.cluster_k = 145;
  CHECK_THROWS_AS(c.validate(), ArgumentError);
}

TEST_CASE("maze sets use disjoint seeds") {
  const ExperimentConfig c = small_batch();
  const MazeSet a = make_maze_set(c, 0);
  const MazeSet b = make_maze_set(c, 1);
  CHECK_FALSE(a.train[0] == a.test[0]);
  CHECK_FALSE(a.train[0] == b.train[0]);
  CHECK(make_maze_set(c, 0).test == a.test);
}

TEST_CASE("batch output is deterministic and its aggregates recompute") {
  const ExperimentConfig c = small_batch();
  const BatchResult r1 = run_batch(c);
  const BatchResult r2 = run_batch(c);
  std::ostringstream o1;
  std::ostringstream o2;
  write_batch_csv(o1, r1, c);
  write_batch_csv(o2, r2, c);
  CHECK(o1.str() == o2.str());
  CHECK(o1.str().rfind("# mazenet batch", 0) == 0);

  const auto rows = csv_rows(o1.str());
  REQUIRE(rows.size() == 1 + 6 + 2);
  CHECK(rows[0][0] == "set");
  for (Method m : c.methods) {
    double sum_c = 0.0;
    double sum_g = 0.0;
    int count = 0;
    std::vector<double> cs;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i][0] == "all" || rows[i][1] != to_string(m) || rows[i][2] != "ok") continue;
      sum_g += std::stod(rows[i][3]);
      sum_c += std::stod(rows[i][4]);
      cs.push_back(std::stod(rows[i][4]));
      ++count;
    }
    REQUIRE(count == 3);
    for (const auto& row : rows) {
      if (row[0] != "all" || row[1] != to_string(m)) continue;
      CHECK(row[2] == "failed=0");
      CHECK(std::abs(std::stod(row[3]) - sum_g / count) < 1e-12);
      CHECK(std::abs(std::stod(row[4]) - sum_c / count) < 1e-12);
      double ss = 0.0;
      for (double v : cs) ss += (v - sum_c / count) * (v - sum_c / count);
      CHECK(std::abs(std::stod(row[6]) - std::sqrt(ss / (count - 1))) < 1e-12);
    }
  }
}

TEST_CASE("untrained batch is reproducible") {
  ExperimentConfig c = small_batch();
  c.batch_sets = 1;
  c.training.epochs = 0;
  const BatchResult a = run_batch(c);
  const BatchResult b = run_batch(c);
  CHECK(a.rows[0].correctness == b.rows[0].correctness);
}

TEST_CASE("failed sets are excluded from aggregates") {
  std::vector<BatchRow> rows(3);
  rows[0].goodness = 0.2;
  rows[0].correctness = 0.4;
  rows[1].failed = true;
  rows[2].goodness = 0.4;
  rows[2].correctness = 0.8;
  const auto agg = aggregate_rows(rows, {Method::None});
  CHECK(agg[0].ok_sets == 2);
  CHECK(agg[0].failed_sets == 1);
  CHECK(agg[0].mean_correctness == doctest::Approx(0.6));
}

TEST_CASE("bench rows") {
  BenchConfig b;
  b.gain_sizes = {1, 50};
  b.jacobian_sizes = {40};
  b.p = 12;
  b.reps = 3;
  const auto rows = run_bench(b);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].mode == "naive_inverse");
  CHECK(rows[1].mode == "linear_solve");
  CHECK(rows[4].kernel == BenchKernel::JacobianAssembly);
  for (const auto& r : rows) CHECK(r.median_ms >= 0.0);
}

TEST_CASE("command line") {
  const fs::path dir = fs::temp_directory_path() / "mazenet_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  SUBCASE("gen is byte-identical across runs") {
    REQUIRE(run_cli("gen --n 12 --count 5 --seed 1 --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("gen --n 12 --count 5 --seed 1 --out " + (dir / "b").string()) == 0);
    for (int i = 0; i < 5; ++i) {
      const std::string name = "maze_00" + std::to_string(i) + ".txt";
      CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
      CHECK_FALSE(slurp(dir / "a" / name).empty());
    }
  }
  SUBCASE("batch rows") {
    const fs::path out = dir / "batch.csv";
    REQUIRE(run_cli("batch --method euclidean --sets 2 --epochs 5 --n 6 --out " + out.string()) == 0);
    const auto rows = csv_rows(slurp(out));
    REQUIRE(rows.size() == 4);
    CHECK(rows[1][2] == "ok");
    CHECK(rows[3][0] == "all");
  }
  SUBCASE("config file with command-line override") {
    const fs::path cfg = dir / "run.cfg";
    std::ofstream(cfg) << "n = 5\nsets = 1\nepochs = 2\nmethod = none\nseed = 3\n";
    const fs::path a = dir / "a.csv";
    const fs::path b = dir / "b.csv";
    REQUIRE(run_cli("batch --config " + cfg.string() + " --out " + a.string()) == 0);
    REQUIRE(run_cli("batch --config " + cfg.string() + " --seed 4 --out " + b.string()) == 0);
    CHECK(slurp(a).find("seed=3") != std::string::npos);
    CHECK(slurp(b).find("seed=4") != std::string::npos);
  }
  SUBCASE("bench rows") {
    const fs::path out = dir / "bench.csv";
    REQUIRE(run_cli("bench --sizes 100,500 --out " + out.string()) == 0);
    CHECK(csv_rows(slurp(out)).size() == 5);
  }
  SUBCASE("train then eval") {
    REQUIRE(run_cli("train --n 5 --train-count 2 --epochs 3 --method euclidean --out " + (dir / "t").string()) == 0);
    CHECK(fs::exists(dir / "t" / "weights.txt"));
    CHECK(csv_rows(slurp(dir / "t" / "history.csv")).size() == 4);
    const fs::path out = dir / "eval.csv";
    CHECK(run_cli("eval --n 5 --method euclidean --weights " + (dir / "t" / "weights.txt").string(), out.string()) == 0);
    CHECK(csv_rows(slurp(out)).back()[0] == "mean");
    CHECK(run_cli("eval --n 5 --method none --weights " + (dir / "t" / "weights.txt").string()) == 1);
  }
  SUBCASE("cluster csv") {
    const fs::path out = dir / "cluster.csv";
    REQUIRE(run_cli("cluster --n 6 --cluster-k 5 --seed 2 --out " + out.string()) == 0);
    CHECK(csv_rows(slurp(out)).size() == 37);
  }
  SUBCASE("usage errors") {
    CHECK(run_cli("") == 1);
    CHECK(run_cli("batch --bogus") == 1);
    CHECK(run_cli("batch --n 7 --method submaze --submaze-m 4") == 1);
    CHECK(run_cli("batch --obstacle-fraction lots") == 1);
    CHECK(run_cli("--help") == 0);
  }
  SUBCASE("runtime errors") {
    CHECK(run_cli("train --mazes /nonexistent/maze.txt --out " + (dir / "x").string()) == 2);
  }
  fs::remove_all(dir);
}
