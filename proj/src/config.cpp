#include "coopsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coopsim/io.hpp"

namespace coopsim {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where,
                  const std::set<std::string>& required,
                  const std::set<std::string>& optional) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!required.count(key) && !optional.count(key))
      throw SchemaError(where + ": unknown key '" + key + "'");
  }
  for (const auto& key : required)
    if (!j.contains(key))
      throw SchemaError(where + ": missing required key '" + key + "'");
}

Pose parse_pose(const json& j, const std::string& where) {
  require_keys(j, where, {"x", "y"}, {"z", "roll", "pitch", "yaw"});
  Pose p;
  p.x = j.at("x");
  p.y = j.at("y");
  p.z = j.value("z", 0.0);
  p.roll = j.value("roll", 0.0);
  p.pitch = j.value("pitch", 0.0);
  p.yaw = j.value("yaw", 0.0);
  return p.normalized();
}

SensorSpec parse_sensor(const json& j, const std::string& where) {
  if (j.is_string()) {
    std::string preset = j.get<std::string>();
    if (preset == "vehicle") return vehicle_sensor();
    if (preset == "infrastructure") return infrastructure_sensor();
    throw SchemaError(where + ": unknown sensor preset '" + preset + "'");
  }
  require_keys(j, where, {},
               {"channels", "mount_height", "range", "rotation_hz", "upper_fov",
                "lower_fov", "noise_std", "dropoff_rate", "dropoff_intensity",
                "horizontal_resolution", "preset"});
  SensorSpec s = j.value("preset", std::string("vehicle")) == "infrastructure"
                     ? infrastructure_sensor()
                     : vehicle_sensor();
  s.channels = j.value("channels", s.channels);
  s.mount_height = j.value("mount_height", s.mount_height);
  s.range = j.value("range", s.range);
  s.rotation_hz = j.value("rotation_hz", s.rotation_hz);
  s.upper_fov = j.value("upper_fov", s.upper_fov);
  s.lower_fov = j.value("lower_fov", s.lower_fov);
  s.noise_std = j.value("noise_std", s.noise_std);
  s.dropoff_rate = j.value("dropoff_rate", s.dropoff_rate);
  s.dropoff_intensity = j.value("dropoff_intensity", s.dropoff_intensity);
  s.horizontal_resolution = j.value("horizontal_resolution", s.horizontal_resolution);
  if (s.channels < 1 || s.range <= 0 || s.lower_fov > s.upper_fov ||
      s.dropoff_rate < 0 || s.dropoff_rate > 1)
    throw SchemaError(where + ": sensor parameters out of range");
  return s;
}

NodeSpec parse_node(const json& j) {
  require_keys(j, "nodes[]", {"id", "kind", "pose"},
               {"sensor", "capacity", "modes"});
  NodeSpec n;
  n.id = j.at("id");
  auto kind = kind_from_string(j.at("kind"));
  if (!kind) throw SchemaError("nodes[]: unknown kind '" +
                               j.at("kind").get<std::string>() + "'");
  n.kind = *kind;
  n.pose = parse_pose(j.at("pose"), "nodes[].pose");
  if (j.contains("sensor") && !j.at("sensor").is_null())
    n.sensor = parse_sensor(j.at("sensor"), "nodes[].sensor");
  n.compute_capacity = j.value("capacity", 1.0e18);
  if (j.contains("modes")) {
    for (const auto& m : j.at("modes")) {
      auto mode = mode_from_string(m.get<std::string>());
      if (!mode)
        throw SchemaError("nodes[].modes: unknown mode '" + m.get<std::string>() + "'");
      n.allowed_modes.insert(*mode);
    }
  } else {
    n.allowed_modes = default_modes(n.kind);
  }
  return n;
}

}  // namespace

ScenarioFile parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config: invalid JSON: ") + e.what());
  }

  require_keys(j, "config", {"version", "seed", "scene", "nodes", "plan"},
               {"frames", "grid", "links", "engagement", "dfs", "detector",
                "nms", "eval", "cost_model", "cv_self_report",
                "backward_results", "output_dir"});
  if (!j.at("version").is_number_integer() ||
      j.at("version").get<int>() != kScenarioSchemaVersion)
    throw SchemaError("config: unsupported version (expected " +
                      std::to_string(kScenarioSchemaVersion) + ")");

  ScenarioFile out;
  ScenarioSpec& spec = out.spec;
  if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
    throw SchemaError("config: 'seed' must be an integer");
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.frames = j.value("frames", 1);
  if (spec.frames < 0) throw SchemaError("config: 'frames' must be >= 0");

  {
    const json& s = j.at("scene");
    require_keys(s, "scene", {"cars", "pedestrians"},
                 {"bounds", "placement_margin", "max_retries"});
    spec.scene_config.num_cars = s.at("cars");
    spec.scene_config.num_pedestrians = s.at("pedestrians");
    if (s.contains("bounds")) {
      const auto& b = s.at("bounds");
      if (b.size() == 2)
        spec.scene_config.bounds = {0.0, 0.0, b[0], b[1]};
      else if (b.size() == 4)
        spec.scene_config.bounds = {b[0], b[1], b[2], b[3]};
      else
        throw SchemaError("scene.bounds: expected [sx, sy] or [minx, miny, sx, sy]");
    }
    spec.scene_config.placement_margin =
        s.value("placement_margin", spec.scene_config.placement_margin);
    spec.scene_config.max_retries =
        s.value("max_retries", spec.scene_config.max_retries);
  }

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    require_keys(g, "grid", {}, {"cell_size"});
    if (g.contains("cell_size")) {
      const auto& c = g.at("cell_size");
      if (c.size() != 3) throw SchemaError("grid.cell_size: expected [dx, dy, dz]");
      spec.grid.cell_dx = c[0];
      spec.grid.cell_dy = c[1];
      spec.grid.cell_dz = c[2];
    }
  }

  for (const auto& jn : j.at("nodes")) spec.graph.nodes.push_back(parse_node(jn));

  if (j.contains("links"))
    for (const auto& jl : j.at("links")) {
      require_keys(jl, "links[]", {"from", "to", "bandwidth"}, {});
      spec.graph.links.push_back(
          {jl.at("from"), jl.at("to"), jl.at("bandwidth").get<std::int64_t>()});
    }

  if (j.contains("engagement"))
    for (const auto& [frame, ids] : j.at("engagement").items()) {
      std::set<int> active;
      for (const auto& id : ids) active.insert(id.get<int>());
      spec.graph.engagement_schedule[std::stoi(frame)] = active;
    }

  {
    const json& p = j.at("plan");
    if (p.is_string()) {
      std::string s = p.get<std::string>();
      if (s == "solve:greedy")
        spec.plan = SolveRequest{"greedy"};
      else if (s == "solve:exhaustive")
        spec.plan = SolveRequest{"exhaustive"};
      else
        throw SchemaError("plan: expected an object, 'solve:greedy', or 'solve:exhaustive'");
    } else {
      require_keys(p, "plan", {"modes", "flows"}, {});
      spec.plan = io::plan_from_json(p.dump());
    }
  }

  PipelineConfig& cfg = spec.pipeline;
  if (j.contains("dfs")) {
    const json& d = j.at("dfs");
    require_keys(d, "dfs", {},
                 {"strategy", "mobile_budget_cells", "infra_budget_cells",
                  "rpf_uniform_ranks"});
    if (d.contains("strategy")) {
      auto s = strategy_from_string(d.at("strategy"));
      if (!s)
        throw SchemaError("dfs.strategy: unknown strategy '" +
                          d.at("strategy").get<std::string>() + "'");
      cfg.strategy = *s;
    }
    cfg.mobile_budget_cells = d.value("mobile_budget_cells", cfg.mobile_budget_cells);
    cfg.infra_budget_cells = d.value("infra_budget_cells", cfg.infra_budget_cells);
    cfg.sift_options.rpf_uniform_ranks =
        d.value("rpf_uniform_ranks", cfg.sift_options.rpf_uniform_ranks);
    if (cfg.mobile_budget_cells < 0 || cfg.infra_budget_cells < 0)
      throw SchemaError("dfs: budgets must be >= 0");
  }

  if (j.contains("detector")) {
    const json& d = j.at("detector");
    require_keys(d, "detector", {},
                 {"min_points", "score_halfpoint", "base_jitter", "yaw_jitter",
                  "clutter_rate", "clutter_enabled"});
    cfg.detector.min_points = d.value("min_points", cfg.detector.min_points);
    cfg.detector.score_halfpoint =
        d.value("score_halfpoint", cfg.detector.score_halfpoint);
    cfg.detector.base_jitter = d.value("base_jitter", cfg.detector.base_jitter);
    cfg.detector.yaw_jitter = d.value("yaw_jitter", cfg.detector.yaw_jitter);
    cfg.detector.clutter_rate = d.value("clutter_rate", cfg.detector.clutter_rate);
    cfg.detector.clutter_enabled =
        d.value("clutter_enabled", cfg.detector.clutter_enabled);
  }

  if (j.contains("nms")) {
    const json& n = j.at("nms");
    require_keys(n, "nms", {}, {"car_radius", "pedestrian_radius"});
    cfg.nms.radius_per_class[ObjectClass::Car] =
        n.value("car_radius", cfg.nms.radius_per_class[ObjectClass::Car]);
    cfg.nms.radius_per_class[ObjectClass::Pedestrian] =
        n.value("pedestrian_radius", cfg.nms.radius_per_class[ObjectClass::Pedestrian]);
  }

  if (j.contains("eval")) {
    const json& e = j.at("eval");
    require_keys(e, "eval", {}, {"iou_car", "iou_pedestrian"});
    cfg.thresholds.iou[ObjectClass::Car] =
        e.value("iou_car", cfg.thresholds.iou[ObjectClass::Car]);
    cfg.thresholds.iou[ObjectClass::Pedestrian] =
        e.value("iou_pedestrian", cfg.thresholds.iou[ObjectClass::Pedestrian]);
  }

  if (j.contains("cost_model")) {
    const json& c = j.at("cost_model");
    require_keys(c, "cost_model", {}, {"r0", "r1", "r2"});
    spec.cost_model.r0 = c.value("r0", spec.cost_model.r0);
    spec.cost_model.r1 = c.value("r1", spec.cost_model.r1);
    spec.cost_model.r2 = c.value("r2", spec.cost_model.r2);
    if (!(spec.cost_model.r0 <= spec.cost_model.r1 &&
          spec.cost_model.r1 <= spec.cost_model.r2))
      throw SchemaError("cost_model: requires r0 <= r1 <= r2");
  }

  cfg.cv_self_report = j.value("cv_self_report", cfg.cv_self_report);
  cfg.backward_results = j.value("backward_results", cfg.backward_results);
  out.output_dir = j.value("output_dir", out.output_dir);

  try {
    spec.graph.validate();
  } catch (const std::exception& e) {
    throw SchemaError(std::string("config: ") + e.what());
  }
  return out;
}

ScenarioFile load_scenario(const std::string& path) {
  return parse_scenario(io::read_text(path));
}

}  // namespace coopsim
