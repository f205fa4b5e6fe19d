#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string g_cli;   // path to the coopsim binary, from argv
fs::path g_workdir;  // scratch directory for configs and outputs

int run_cli(const std::string& args) {
  std::string cmd = "\"" + g_cli + "\" " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scenario_json(const std::string& plan, int frames = 2,
                          const std::string& extra = "") {
  return R"({
    "version": 1,
    "seed": 42,
    "frames": )" + std::to_string(frames) + R"(,
    "scene": {"cars": 4, "pedestrians": 2, "bounds": [60, 40]},
    "nodes": [
      {"id": 1, "kind": "cpv", "pose": {"x": 10, "y": 10},
       "sensor": {"preset": "vehicle", "horizontal_resolution": 2.0}},
      {"id": 2, "kind": "central_perception_infra", "pose": {"x": 30, "y": 20},
       "sensor": {"preset": "infrastructure", "horizontal_resolution": 2.0}}
    ],
    "links": [{"from": 1, "to": 2, "bandwidth": 100000000}],
    "plan": )" + plan + extra + R"(
  })";
}

const std::string kStaticPlan =
    R"({"modes": {"1": "feature_extraction", "2": "feature_extraction"},
        "flows": [[1, 2]]})";

}  // namespace

TEST_CASE("usage errors fail fast") {
  CHECK(run_cli("") != 0);
  CHECK(run_cli("simulate") != 0);
  CHECK(run_cli("frobnicate x") != 0);
}

TEST_CASE("schema problems exit with code 2") {
  fs::path bad = g_workdir / "bad.json";
  write_file(bad, "{\"version\": 1}");
  CHECK(run_cli("simulate " + bad.string()) == 2);

  write_file(bad, "not json at all");
  CHECK(run_cli("simulate " + bad.string()) == 2);

  CHECK(run_cli("simulate " + (g_workdir / "missing.json").string()) != 0);
}

TEST_CASE("simulate writes the full artifact set") {
  fs::path cfg = g_workdir / "run.json";
  write_file(cfg, scenario_json(kStaticPlan));
  fs::path out = g_workdir / "out_sim";
  REQUIRE(run_cli("simulate " + cfg.string() + " --output " + out.string()) == 0);

  for (const char* name : {"ap_report.json", "messages.csv",
                           "node_combinations.csv", "plan.json",
                           "detections.jsonl", "frames.json"}) {
    INFO(name);
    CHECK(fs::exists(out / name));
    CHECK(fs::file_size(out / name) > 0);
  }
  CHECK(read_file(out / "messages.csv").rfind("frame,from,to,bytes,kind", 0) == 0);
  CHECK(read_file(out / "ap_report.json").find("overall_ap") != std::string::npos);
}

TEST_CASE("reruns and thread counts leave artifacts byte-identical") {
  fs::path cfg = g_workdir / "run.json";
  write_file(cfg, scenario_json(kStaticPlan));
  fs::path a = g_workdir / "det_a", b = g_workdir / "det_b", c = g_workdir / "det_c";
  REQUIRE(run_cli("simulate " + cfg.string() + " --output " + a.string()) == 0);
  REQUIRE(run_cli("simulate " + cfg.string() + " --output " + b.string()) == 0);
  REQUIRE(run_cli("simulate " + cfg.string() + " --output " + c.string() +
                  " --threads 8") == 0);
  for (const char* name : {"ap_report.json", "messages.csv",
                           "node_combinations.csv", "plan.json",
                           "detections.jsonl", "frames.json"}) {
    INFO(name);
    CHECK(read_file(a / name) == read_file(b / name));
    CHECK(read_file(a / name) == read_file(c / name));
  }
}

TEST_CASE("infeasible plans exit with code 3") {
  fs::path cfg = g_workdir / "tight.json";
  std::string text = scenario_json(kStaticPlan);
  auto pos = text.find("100000000");
  text.replace(pos, 9, "16");  // features never fit in 16 bytes
  write_file(cfg, text);
  CHECK(run_cli("simulate " + cfg.string() + " --output " +
                (g_workdir / "out_tight").string()) == 3);
}

TEST_CASE("optimize solves and reports, exit 4 when nothing is feasible") {
  fs::path cfg = g_workdir / "solve.json";
  write_file(cfg, scenario_json("\"solve:greedy\"", 1));
  fs::path out = g_workdir / "out_opt";
  REQUIRE(run_cli("optimize " + cfg.string() + " --solver exhaustive --output " +
                  out.string()) == 0);
  CHECK(fs::exists(out / "plan.json"));
  std::string report = read_file(out / "solver_report.json");
  CHECK(report.find("objective") != std::string::npos);
  CHECK(report.find("plans_considered") != std::string::npos);

  // greedy gives the same artifacts
  REQUIRE(run_cli("optimize " + cfg.string() + " --solver greedy --output " +
                  (g_workdir / "out_opt_g").string()) == 0);

  // capacity nobody can meet
  std::string impossible = scenario_json("\"solve:greedy\"", 1);
  impossible.replace(impossible.find("\"kind\": \"cpv\""), 13,
                     "\"capacity\": 1e-12, \"kind\": \"cpv\"");
  write_file(cfg, impossible);
  CHECK(run_cli("optimize " + cfg.string() + " --output " +
                (g_workdir / "out_opt_bad").string()) == 4);
}

TEST_CASE("a solver plan embedded in the scenario runs end to end") {
  fs::path cfg = g_workdir / "solve_sim.json";
  write_file(cfg, scenario_json("\"solve:greedy\"", 1));
  fs::path out = g_workdir / "out_solve_sim";
  REQUIRE(run_cli("simulate " + cfg.string() + " --output " + out.string()) == 0);
  CHECK(fs::exists(out / "plan.json"));
}

TEST_CASE("replay reproduces the reported AP from the frame dump") {
  fs::path cfg = g_workdir / "run.json";
  write_file(cfg, scenario_json(kStaticPlan));
  fs::path out = g_workdir / "out_replay";
  REQUIRE(run_cli("simulate " + cfg.string() + " --output " + out.string()) == 0);
  REQUIRE(run_cli("replay " + out.string()) == 0);
  CHECK(read_file(out / "ap_report_replay.json") ==
        read_file(out / "ap_report.json"));
}

TEST_CASE("sweep emits one row per strategy and budget") {
  fs::path cfg = g_workdir / "sweep.json";
  write_file(cfg, scenario_json(kStaticPlan, 1));
  fs::path out = g_workdir / "out_sweep";
  REQUIRE(run_cli("sweep " + cfg.string() +
                  " --strategies top_k_nearest,random_priority"
                  " --budgets 400,100 --k-max 1000 --output " +
                  out.string()) == 0);
  std::string csv = read_file(out / "tradeoff.csv");
  CHECK(csv.rfind("strategy,budget_cells", 0) == 0);
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 1 + 2 * 2);
  CHECK(run_cli("sweep " + cfg.string() + " --strategies psychic --output " +
                out.string()) == 2);
}

int main(int argc, char** argv) {
  doctest::Context context;
  // the last non-option argument is the path to the binary under test
  for (int i = argc - 1; i >= 1; --i) {
    std::string arg = argv[i];
    if (!arg.empty() && arg[0] != '-') {
      g_cli = arg;
      break;
    }
  }
  if (g_cli.empty() || !fs::exists(g_cli)) {
    std::fprintf(stderr, "test_cli: binary path argument missing\n");
    return 1;
  }
  g_workdir = fs::temp_directory_path() / "coopsim_cli_test";
  fs::remove_all(g_workdir);
  fs::create_directories(g_workdir);
  context.applyCommandLine(1, argv);  // keep doctest from eating our path arg
  int res = context.run();
  fs::remove_all(g_workdir);
  return res;
}
