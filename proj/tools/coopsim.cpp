#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coopsim/config.hpp"
#include "coopsim/rng.hpp"
#include "coopsim/io.hpp"
#include "coopsim/topology.hpp"

namespace fs = std::filesystem;
using namespace coopsim;

namespace {

constexpr int kExitSchema = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNoPlan = 4;

// Per-frame dump with everything needed to re-derive metrics offline.
std::string frames_to_json(const ScenarioResult& result,
                           const std::vector<Scene>& scenes,
                           const PipelineConfig& cfg) {
  nlohmann::ordered_json j;
  j["thresholds"] = {{"car", cfg.thresholds.iou.at(ObjectClass::Car)},
                     {"pedestrian", cfg.thresholds.iou.at(ObjectClass::Pedestrian)}};
  auto frames = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.frames.size(); ++i) {
    const auto& fr = result.frames[i];
    nlohmann::ordered_json f;
    f["frame_index"] = fr.frame_index;
    f["scene"] = nlohmann::ordered_json::parse(io::scene_to_json(scenes[i]));
    nlohmann::ordered_json pts = nlohmann::ordered_json::object();
    for (const auto& [id, n] : fr.gt_points) pts[std::to_string(id)] = n;
    f["gt_points"] = pts;
    auto dets = nlohmann::ordered_json::array();
    for (const auto& d : fr.final_detections)
      dets.push_back(nlohmann::ordered_json::parse(
          io::detections_to_jsonl({d}).substr(0, io::detections_to_jsonl({d}).size() - 1)));
    f["detections"] = dets;
    frames.push_back(f);
  }
  j["frames"] = frames;
  return j.dump(2) + "\n";
}

std::vector<Scene> regenerate_scenes(const ScenarioSpec& spec) {
  std::vector<Scene> scenes;
  for (int f = 0; f < spec.frames; ++f) {
    Scene s = generate_scene(
        spec.scene_config,
        substream(spec.seed, "scene", static_cast<std::uint64_t>(f)).next_u64());
    s.frame_index = f;
    scenes.push_back(s);
  }
  return scenes;
}

void write_run_artifacts(const fs::path& dir, const ScenarioFile& file,
                         const ScenarioResult& result) {
  fs::create_directories(dir);
  io::write_text(dir / "ap_report.json", io::ap_report_to_json(result.report));
  io::write_text(dir / "messages.csv", io::messages_to_csv(result.frames));
  io::write_text(dir / "node_combinations.csv",
                 io::combinations_to_csv(result.by_combination));
  io::write_text(dir / "plan.json", io::plan_to_json(result.plan));
  std::string jsonl;
  for (const auto& fr : result.frames)
    jsonl += io::detections_to_jsonl(fr.final_detections);
  io::write_text(dir / "detections.jsonl", jsonl);
  io::write_text(dir / "frames.json",
                 frames_to_json(result, regenerate_scenes(file.spec),
                                file.spec.pipeline));
}

int cmd_simulate(const std::string& config_path, const std::string& out_override) {
  ScenarioFile file = load_scenario(config_path);
  if (!out_override.empty()) file.output_dir = out_override;
  ScenarioResult result;
  try {
    result = run_scenario(file.spec);
  } catch (const std::runtime_error& e) {
    std::string what = e.what();
    if (what.find("infeasible") != std::string::npos ||
        what.find("no feasible") != std::string::npos) {
      std::cerr << "error: " << what << "\n";
      return what.find("no feasible") != std::string::npos ? kExitNoPlan
                                                           : kExitInfeasible;
    }
    throw;
  }
  write_run_artifacts(file.output_dir, file, result);
  std::cout << "simulate: frames=" << result.frames.size()
            << " overall_ap=" << result.report.overall_ap << " -> "
            << file.output_dir << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path,
              const std::vector<std::string>& strategy_names,
              std::vector<std::int64_t> budgets, std::int64_t k_max,
              const std::string& out_override) {
  ScenarioFile file = load_scenario(config_path);
  if (!out_override.empty()) file.output_dir = out_override;

  std::vector<FilterStrategy> strategies;
  for (const auto& name : strategy_names) {
    auto s = strategy_from_string(name);
    if (!s) {
      std::cerr << "error: unknown strategy '" << name << "'\n";
      return kExitSchema;
    }
    strategies.push_back(*s);
  }
  if (budgets.empty()) budgets = {8000, 6000, 4000, 2000, 1500, 1000, 500};

  TradeoffCurve curve = sweep_budget(file.spec, strategies, budgets, k_max);
  fs::create_directories(file.output_dir);
  io::write_text(fs::path(file.output_dir) / "tradeoff.csv",
                 io::tradeoff_to_csv(curve));

  // AP-drop resistance: worst-case reduction per strategy over the sweep
  std::map<std::string, double> worst;
  for (const auto& row : curve.rows)
    worst[row.strategy] = std::max(worst[row.strategy], row.ap_reduction);
  std::cerr << "ap-drop resistance (1 - worst reduction):\n";
  for (const auto& [name, w] : worst)
    std::cerr << "  " << name << ": " << (1.0 - w) << "\n";

  std::cout << "sweep: " << curve.rows.size() << " rows -> " << file.output_dir
            << "/tradeoff.csv\n";
  return 0;
}

int cmd_optimize(const std::string& config_path, const std::string& solver,
                 const std::string& out_override) {
  ScenarioFile file = load_scenario(config_path);
  if (!out_override.empty()) file.output_dir = out_override;
  const ScenarioSpec& spec = file.spec;
  spec.graph.validate();

  VoxelGridSpec grid = spec.grid.nx > 0
                           ? spec.grid
                           : grid_for_bounds(spec.scene_config.bounds,
                                             spec.grid.cell_dx, spec.grid.cell_dy,
                                             spec.grid.cell_dz);
  std::vector<SensedFrame> sensed;
  for (int f = 0; f < spec.frames; ++f) {
    Scene scene = generate_scene(
        spec.scene_config,
        substream(spec.seed, "scene", static_cast<std::uint64_t>(f)).next_u64());
    scene.frame_index = f;
    sensed.push_back(sense_frame(spec.graph, scene, grid,
                                 spec.graph.active_nodes(f), f, spec.seed));
  }

  SolveStats stats;
  TopologyPlan plan;
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (solver == "exhaustive")
      plan = solve_exhaustive(spec.graph, sensed, spec.pipeline, spec.cost_model,
                              spec.seed, &stats);
    else
      plan = solve_greedy(spec.graph, sensed, spec.pipeline, spec.cost_model,
                          spec.seed, &stats);
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoPlan;
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(file.output_dir);
  io::write_text(fs::path(file.output_dir) / "plan.json", io::plan_to_json(plan));
  nlohmann::ordered_json report;
  report["objective"] = stats.best_objective;
  report["plans_considered"] = stats.plans_considered;
  report["plans_evaluated"] = stats.plans_evaluated;
  report["wall_seconds"] = wall;
  report["feasible"] = true;
  io::write_text(fs::path(file.output_dir) / "solver_report.json",
                 report.dump(2) + "\n");

  std::cout << "optimize: solver=" << solver << " J=" << stats.best_objective
            << " flows=" << plan.flows.size() << " -> " << file.output_dir
            << "/plan.json\n";
  return 0;
}

int cmd_replay(const std::string& run_dir) {
  nlohmann::json j = nlohmann::json::parse(io::read_text(fs::path(run_dir) / "frames.json"));
  EvalThresholds thresholds;
  thresholds.iou[ObjectClass::Car] = j.at("thresholds").at("car");
  thresholds.iou[ObjectClass::Pedestrian] = j.at("thresholds").at("pedestrian");

  std::vector<EvalFrame> frames;
  for (const auto& jf : j.at("frames")) {
    EvalFrame ef;
    Scene scene = io::scene_from_json(jf.at("scene").dump());
    ef.gts = scene.objects;
    for (const auto& [id, n] : jf.at("gt_points").items())
      ef.gt_points[std::stoi(id)] = n.get<int>();
    std::string jsonl;
    for (const auto& jd : jf.at("detections")) jsonl += jd.dump() + "\n";
    ef.detections = io::detections_from_jsonl(jsonl);
    frames.push_back(std::move(ef));
  }
  ApReport report = compute_ap_report(frames, thresholds);
  io::write_text(fs::path(run_dir) / "ap_report_replay.json",
                 io::ap_report_to_json(report));
  std::cout << "replay: frames=" << frames.size()
            << " overall_ap=" << report.overall_ap << " -> " << run_dir
            << "/ap_report_replay.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cooperative perception MEC simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, solver = "greedy", run_dir;
  std::vector<std::string> strategies = {"top_k_nearest", "top_k_farthest",
                                         "random_voxel", "random_priority"};
  std::vector<std::int64_t> budgets;
  std::int64_t k_max = 15000;
  int threads = 1;  // accepted for interface stability; results never depend on it

  auto* sim = app.add_subcommand("simulate", "run a scenario and emit reports");
  sim->add_option("config", config_path)->required();
  sim->add_option("--output", out_dir);
  sim->add_option("--threads", threads);

  auto* swp = app.add_subcommand("sweep", "bandwidth/AP trade-off sweep");
  swp->add_option("config", config_path)->required();
  swp->add_option("--strategies", strategies)->delimiter(',');
  swp->add_option("--budgets", budgets)->delimiter(',');
  swp->add_option("--k-max", k_max);
  swp->add_option("--output", out_dir);
  swp->add_option("--threads", threads);

  auto* opt = app.add_subcommand("optimize", "solve the topology plan");
  opt->add_option("config", config_path)->required();
  opt->add_option("--solver", solver)->check(CLI::IsMember({"greedy", "exhaustive"}));
  opt->add_option("--output", out_dir);

  auto* rep = app.add_subcommand("replay", "re-derive metrics from dumped logs");
  rep->add_option("run_dir", run_dir)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(config_path, out_dir);
    if (swp->parsed()) return cmd_sweep(config_path, strategies, budgets, k_max, out_dir);
    if (opt->parsed()) return cmd_optimize(config_path, solver, out_dir);
    if (rep->parsed()) return cmd_replay(run_dir);
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
