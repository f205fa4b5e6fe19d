#include "coopsim/simulator.hpp"

#include <algorithm>
#include <stdexcept>

#include "coopsim/rng.hpp"
#include "coopsim/topology.hpp"

namespace coopsim {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                          std::uint64_t a = 0, std::uint64_t b = 0) {
  return substream(seed, tag, a, b).next_u64();
}

}  // namespace

SensedFrame sense_frame(const MecGraph& graph, const Scene& scene,
                        const VoxelGridSpec& grid, const std::set<int>& active,
                        int frame_index, std::uint64_t seed) {
  SensedFrame out;
  out.frame_index = frame_index;
  out.scene = scene;
  out.grid = grid;
  out.active = active;

  std::vector<PointCloud> raw_clouds;
  for (const auto& node : graph.nodes) {
    if (!active.count(node.id) || !node.has_sensor()) continue;
    std::uint64_t node_seed =
        derive_seed(seed, "sensor", static_cast<std::uint64_t>(node.id),
                    static_cast<std::uint64_t>(frame_index));
    PointCloud ego = simulate_lidar(*node.sensor, node.pose, scene, node_seed);
    NodeSensing s;
    s.cloud_global = transform_to_grc(ego, node.pose);
    s.raw_points = static_cast<std::int64_t>(s.cloud_global.points.size());
    s.deck = voxelize(s.cloud_global, grid, node.id);
    raw_clouds.push_back(s.cloud_global);
    out.nodes.emplace(node.id, std::move(s));
  }

  PointCloud all = early_fuse(raw_clouds);
  for (const auto& obj : scene.objects)
    out.gt_points[obj.id] = points_on_object(all, obj);
  return out;
}

int select_fusion_node(const MecGraph& graph, const std::set<int>& active) {
  int best = -1, best_tier = -1;
  for (int id : active) {
    const NodeSpec* n = graph.find_node(id);
    if (!n) continue;
    int t = node_tier(n->kind);
    if (t > best_tier || (t == best_tier && (best < 0 || id < best))) {
      best_tier = t;
      best = id;
    }
  }
  return best;
}

int message_complexity(const std::vector<FrameResult>& frames) {
  int max_messages = 0;
  for (const auto& f : frames)
    max_messages = std::max(max_messages, static_cast<int>(f.message_log.size()));
  return max_messages;
}

FrameResult run_frame(const MecGraph& graph, const TopologyPlan& plan,
                      const SensedFrame& sensed, const PipelineConfig& config,
                      std::uint64_t seed, const CostModel& cost) {
  for (const auto& [from, to] : plan.flows) {
    if (!sensed.active.count(from) || !sensed.active.count(to))
      throw std::runtime_error("run_frame: flow " + std::to_string(from) + "->" +
                               std::to_string(to) + " references an inactive node");
  }

  FrameContext ctx = make_frame_context(graph, sensed, config, seed);
  auto violations = check_feasible(plan, graph, ctx, cost);
  if (!violations.empty())
    throw std::runtime_error("run_frame: infeasible plan: " +
                             violations.front().describe());

  FrameResult result;
  result.frame_index = sensed.frame_index;
  result.gt_points = sensed.gt_points;
  const int frame = sensed.frame_index;

  // per-node transmittable products
  struct Product {
    const PointCloud* raw = nullptr;
    FeatureDeck sifted;
    std::vector<Detection> objects;
    ProcessingMode mode = ProcessingMode::FeatureExtraction;
  };
  std::map<int, Product> products;

  for (int id : sensed.active) {
    const NodeSpec* node = graph.find_node(id);
    if (!node) continue;
    auto mode_it = plan.modes.find(id);
    if (mode_it == plan.modes.end())
      throw std::runtime_error("run_frame: no mode assigned to active node " +
                               std::to_string(id));
    Product p;
    p.mode = mode_it->second;
    auto sensing = sensed.nodes.find(id);
    if (sensing != sensed.nodes.end()) {
      switch (p.mode) {
        case ProcessingMode::RawPreservation:
          p.raw = &sensing->second.cloud_global;
          break;
        case ProcessingMode::FeatureExtraction:
          p.sifted = sift(sensing->second.deck, config.strategy,
                          config.budget_for(node->kind), node->pose.x,
                          node->pose.y,
                          derive_seed(seed, "sift", static_cast<std::uint64_t>(id),
                                      static_cast<std::uint64_t>(frame)),
                          config.sift_options);
          break;
        case ProcessingMode::BoundingBox: {
          auto dets = surrogate_detect(
              sensing->second.deck, sensed.scene, config.detector,
              derive_seed(seed, "detect-local", static_cast<std::uint64_t>(id),
                          static_cast<std::uint64_t>(frame)),
              id);
          p.objects = circle_nms(dets, config.nms);
          break;
        }
      }
    } else if (node->kind == NodeKind::CV && config.cv_self_report &&
               p.mode == ProcessingMode::BoundingBox) {
      Detection self;
      self.cls = ObjectClass::Car;
      self.center = {node->pose.x, node->pose.y, node->pose.z};
      self.extent = {4.5, 2.0, 1.6};
      self.yaw = node->pose.yaw;
      self.score = 1.0;
      self.source_node = id;
      p.objects.push_back(self);
    }
    products.emplace(id, std::move(p));
  }

  const int fusion = select_fusion_node(graph, sensed.active);
  result.fusion_node = fusion;

  // route payloads over the plan's flows
  std::vector<const PointCloud*> raw_at_fusion;
  std::vector<FeatureDeck> decks_at_fusion;
  std::vector<Detection> objects_at_fusion;
  auto deliver = [&](int to, const Product& p) {
    if (to != fusion) return;  // non-fusion receivers only pay compute
    switch (p.mode) {
      case ProcessingMode::RawPreservation:
        if (p.raw) raw_at_fusion.push_back(p.raw);
        break;
      case ProcessingMode::FeatureExtraction:
        if (!p.sifted.cells.empty()) decks_at_fusion.push_back(p.sifted);
        break;
      case ProcessingMode::BoundingBox:
        objects_at_fusion.insert(objects_at_fusion.end(), p.objects.begin(),
                                 p.objects.end());
        break;
    }
  };

  for (const auto& [from, to] : plan.flows) {
    const auto& p = products.at(from);
    std::int64_t bytes = link_data_volume(p.mode, ctx.volumes.at(from));
    if (bytes > 0) {
      std::string kind = p.mode == ProcessingMode::RawPreservation ? "raw"
                         : p.mode == ProcessingMode::FeatureExtraction
                             ? "features"
                             : "objects";
      result.message_log.push_back({from, to, bytes, kind});
    }
    deliver(to, p);
  }

  // the fusion node's own products are locally available
  if (fusion >= 0 && products.count(fusion)) deliver(fusion, products.at(fusion));

  std::vector<Detection> final_dets;
  if (fusion >= 0) {
    std::vector<FeatureDeck> decks = std::move(decks_at_fusion);
    if (!raw_at_fusion.empty()) {
      std::vector<PointCloud> clouds;
      clouds.reserve(raw_at_fusion.size());
      for (const auto* c : raw_at_fusion) clouds.push_back(*c);
      decks.push_back(voxelize(early_fuse(clouds), sensed.grid, fusion));
    }
    std::vector<Detection> all;
    if (!decks.empty()) {
      FeatureDeck fused = intermediate_fuse(decks, fusion);
      all = surrogate_detect(fused, sensed.scene, config.detector,
                             derive_seed(seed, "detect",
                                         static_cast<std::uint64_t>(frame)),
                             fusion);
    }
    all.insert(all.end(), objects_at_fusion.begin(), objects_at_fusion.end());
    final_dets = circle_nms(all, config.nms);
  }
  result.final_detections = std::move(final_dets);

  // backward distribution of fused results to mobile subscribers
  if (config.backward_results && fusion >= 0) {
    std::int64_t bytes =
        static_cast<std::int64_t>(result.final_detections.size()) * kBytesPerDetection;
    if (bytes > 0)
      for (int id : sensed.active) {
        const NodeSpec* n = graph.find_node(id);
        if (id != fusion && n && is_mobile(n->kind))
          result.message_log.push_back({fusion, id, bytes, "results"});
      }
  }

  // realized compute cost per node (same accounting the feasibility check uses)
  for (int id : sensed.active) {
    auto mode = plan.modes.at(id);
    double input_bytes = static_cast<double>(ctx.volumes.at(id).raw_bytes);
    for (const auto& [from, to] : plan.flows)
      if (to == id)
        input_bytes += static_cast<double>(
            link_data_volume(products.at(from).mode, ctx.volumes.at(from)));
    result.per_node_cost[id] =
        node_compute_cost(mode, input_bytes / 1.0e6, cost);
  }
  return result;
}

std::string combination_label(const MecGraph& graph, const std::set<int>& active) {
  int infra = 0, vehi = 0;
  for (int id : active) {
    const NodeSpec* n = graph.find_node(id);
    if (!n || !n->has_sensor()) continue;
    if (is_mobile(n->kind))
      ++vehi;
    else
      ++infra;
  }
  return "infra@" + std::to_string(infra) + "/vehi@" + std::to_string(vehi);
}

namespace {

std::vector<SensedFrame> sense_all(const ScenarioSpec& spec,
                                   const VoxelGridSpec& grid) {
  std::vector<SensedFrame> sensed;
  sensed.reserve(spec.frames);
  for (int f = 0; f < spec.frames; ++f) {
    Scene scene = generate_scene(
        spec.scene_config, derive_seed(spec.seed, "scene", static_cast<std::uint64_t>(f)));
    scene.frame_index = f;
    sensed.push_back(sense_frame(spec.graph, scene, grid,
                                 spec.graph.active_nodes(f), f, spec.seed));
  }
  return sensed;
}

VoxelGridSpec resolve_grid(const ScenarioSpec& spec) {
  if (spec.grid.nx > 0 && spec.grid.ny > 0) return spec.grid;
  return grid_for_bounds(spec.scene_config.bounds, spec.grid.cell_dx,
                         spec.grid.cell_dy, spec.grid.cell_dz);
}

TopologyPlan resolve_plan(const ScenarioSpec& spec,
                          const std::vector<SensedFrame>& sensed) {
  if (const auto* plan = std::get_if<TopologyPlan>(&spec.plan)) return *plan;
  const auto& req = std::get<SolveRequest>(spec.plan);
  if (req.solver == "exhaustive")
    return solve_exhaustive(spec.graph, sensed, spec.pipeline, spec.cost_model,
                            spec.seed);
  if (req.solver == "greedy")
    return solve_greedy(spec.graph, sensed, spec.pipeline, spec.cost_model,
                        spec.seed);
  throw std::invalid_argument("unknown solver: " + req.solver);
}

ScenarioResult run_with(const ScenarioSpec& spec,
                        const std::vector<SensedFrame>& sensed,
                        const PipelineConfig& config) {
  ScenarioResult result;
  result.plan = resolve_plan(spec, sensed);

  std::vector<EvalFrame> eval_frames;
  std::map<std::string, std::vector<EvalFrame>> by_label;
  for (const auto& frame : sensed) {
    FrameResult fr =
        run_frame(spec.graph, result.plan, frame, config, spec.seed, spec.cost_model);
    EvalFrame ef{fr.final_detections, frame.scene.objects, fr.gt_points};
    eval_frames.push_back(ef);
    by_label[combination_label(spec.graph, frame.active)].push_back(ef);
    result.frames.push_back(std::move(fr));
  }
  result.report = compute_ap_report(eval_frames, config.thresholds);
  for (const auto& [label, frames] : by_label)
    result.by_combination.push_back(
        {label, compute_ap_report(frames, config.thresholds)});
  return result;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  spec.graph.validate();
  VoxelGridSpec grid = resolve_grid(spec);
  auto sensed = sense_all(spec, grid);
  return run_with(spec, sensed, spec.pipeline);
}

TradeoffCurve sweep_budget(const ScenarioSpec& spec,
                           const std::vector<FilterStrategy>& strategies,
                           const std::vector<std::int64_t>& budgets,
                           std::int64_t k_max) {
  if (budgets.empty())
    throw std::invalid_argument("sweep_budget: empty budget list");
  spec.graph.validate();
  VoxelGridSpec grid = resolve_grid(spec);
  auto sensed = sense_all(spec, grid);  // sensing is strategy/budget independent

  auto run_point = [&](FilterStrategy strategy, std::int64_t budget) {
    PipelineConfig cfg = spec.pipeline;
    cfg.strategy = strategy;
    cfg.mobile_budget_cells = budget;
    cfg.infra_budget_cells = k_max;
    return run_with(spec, sensed, cfg).report.overall_ap;
  };

  std::vector<std::int64_t> sorted_budgets = budgets;
  std::sort(sorted_budgets.rbegin(), sorted_budgets.rend());

  TradeoffCurve curve;
  curve.k_max = k_max;
  for (FilterStrategy strategy : strategies) {
    double ap_at_kmax = run_point(strategy, k_max);
    for (std::int64_t budget : sorted_budgets) {
      TradeoffRow row;
      row.strategy = to_string(strategy);
      row.budget_cells = budget;
      row.budget_bytes = budget * kCellPayloadBytes;
      row.overall_ap = budget == k_max ? ap_at_kmax : run_point(strategy, budget);
      row.bandwidth_saving =
          1.0 - static_cast<double>(budget) / static_cast<double>(k_max);
      row.ap_reduction =
          ap_at_kmax > 0 ? std::max(0.0, 1.0 - row.overall_ap / ap_at_kmax) : 0.0;
      curve.rows.push_back(row);
    }
  }
  return curve;
}

}  // namespace coopsim
