#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "coopsim/dfs.hpp"
#include "coopsim/eval.hpp"
#include "coopsim/fusion.hpp"
#include "coopsim/mec.hpp"

namespace coopsim {

// Knobs shared by every pipeline stage downstream of sensing.
struct PipelineConfig {
  FilterStrategy strategy = FilterStrategy::RandomPriority;
  SiftOptions sift_options;
  std::int64_t mobile_budget_cells = 45000;  // generation-time cap
  std::int64_t infra_budget_cells = 45000;
  DetectorParams detector;
  NmsConfig nms;
  EvalThresholds thresholds;
  bool cv_self_report = false;
  bool backward_results = true;  // log fused results back to mobile nodes

  std::int64_t budget_for(NodeKind kind) const {
    return is_mobile(kind) ? mobile_budget_cells : infra_budget_cells;
  }
};

// Mode-independent sensing products of one node for one frame.
struct NodeSensing {
  PointCloud cloud_global;
  FeatureDeck deck;  // full (uncapped) voxelization
  std::int64_t raw_points = 0;
};

struct SensedFrame {
  int frame_index = 0;
  Scene scene;
  VoxelGridSpec grid;
  std::set<int> active;
  std::map<int, NodeSensing> nodes;  // sensing nodes only
  std::map<int, int> gt_points;      // per-object MP counts (union of raw clouds)
};

// Simulates every active sensor for one frame. Per-sensor RNG streams are
// keyed (seed, node id, frame index) so frames can be sensed in parallel.
SensedFrame sense_frame(const MecGraph& graph, const Scene& scene,
                        const VoxelGridSpec& grid, const std::set<int>& active,
                        int frame_index, std::uint64_t seed);

struct Message {
  int from = 0, to = 0;
  std::int64_t bytes = 0;
  std::string kind;  // raw | features | objects | results
};

struct FrameResult {
  int frame_index = 0;
  std::vector<Detection> final_detections;
  std::vector<Message> message_log;
  std::map<int, double> per_node_cost;
  std::map<int, int> gt_points;
  int fusion_node = -1;
};

// Executes one frame under a plan: sense -> transform -> voxelize -> sift ->
// route -> fuse -> detect -> NMS, with message accounting. Throws on an
// infeasible plan or a flow touching an inactive node.
FrameResult run_frame(const MecGraph& graph, const TopologyPlan& plan,
                      const SensedFrame& sensed, const PipelineConfig& config,
                      std::uint64_t seed, const CostModel& cost = {});

// Selects the fusion site: highest tier among active nodes, lowest id tie-break.
int select_fusion_node(const MecGraph& graph, const std::set<int>& active);

// Maximum message count over frames; the O(N) check compares this
// against 2 * (N_active - 1) for forward-backward topologies.
int message_complexity(const std::vector<FrameResult>& frames);

struct SolveRequest {
  std::string solver;  // "greedy" | "exhaustive"
};
using PlanSource = std::variant<TopologyPlan, SolveRequest>;

struct ScenarioSpec {
  MecGraph graph;
  SceneConfig scene_config;
  VoxelGridSpec grid;  // default-constructed -> derived from scene bounds
  int frames = 1;
  std::uint64_t seed = 0;
  PipelineConfig pipeline;
  PlanSource plan = TopologyPlan{};
  CostModel cost_model;
};

struct CombinationResult {
  std::string label;  // e.g. "infra@2/vehi@3"
  ApReport report;
};

struct ScenarioResult {
  std::vector<FrameResult> frames;
  ApReport report;
  std::vector<CombinationResult> by_combination;
  TopologyPlan plan;  // the plan actually executed (solved or given)
};

ScenarioResult run_scenario(const ScenarioSpec& spec);

// Engagement-combination label for a frame's active set.
std::string combination_label(const MecGraph& graph, const std::set<int>& active);

// Bandwidth sweep: for each (strategy, budget) runs the scenario with the
// mobile budget set to `budget` and the infrastructure budget fixed at
// k_max, and reports AP alongside saving/reduction fractions.
TradeoffCurve sweep_budget(const ScenarioSpec& spec,
                           const std::vector<FilterStrategy>& strategies,
                           const std::vector<std::int64_t>& budgets,
                           std::int64_t k_max = 15000);

}  // namespace coopsim
