#include "coopsim/topology.hpp"

#include <algorithm>
#include <stdexcept>

#include "coopsim/rng.hpp"

namespace coopsim {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag,
                          std::uint64_t a = 0, std::uint64_t b = 0) {
  return substream(seed, tag, a, b).next_u64();
}

}  // namespace

FrameContext make_frame_context(const MecGraph& graph, const SensedFrame& sensed,
                                const PipelineConfig& config, std::uint64_t seed) {
  FrameContext ctx;
  ctx.active = sensed.active;
  for (int id : sensed.active) {
    const NodeSpec* node = graph.find_node(id);
    if (!node) throw std::runtime_error("make_frame_context: unknown active node");
    FrameContext::NodeVolumes v;
    auto it = sensed.nodes.find(id);
    if (it != sensed.nodes.end()) {
      const auto& s = it->second;
      v.raw_bytes = s.raw_points * kBytesPerRawPoint;
      FeatureDeck sifted =
          sift(s.deck, config.strategy, config.budget_for(node->kind),
               node->pose.x, node->pose.y,
               derive_seed(seed, "sift", static_cast<std::uint64_t>(id),
                           static_cast<std::uint64_t>(sensed.frame_index)),
               config.sift_options);
      v.feature_bytes = sifted.payload_bytes();
      auto dets = surrogate_detect(
          s.deck, sensed.scene, config.detector,
          derive_seed(seed, "detect-local", static_cast<std::uint64_t>(id),
                      static_cast<std::uint64_t>(sensed.frame_index)),
          id);
      v.object_bytes =
          static_cast<std::int64_t>(circle_nms(dets, config.nms).size()) *
          kBytesPerDetection;
    } else if (node->kind == NodeKind::CV && config.cv_self_report) {
      v.object_bytes = kBytesPerDetection;
    }
    ctx.volumes.emplace(id, v);
  }
  return ctx;
}

double node_compute_cost(ProcessingMode mode, double input_megabytes,
                         const CostModel& cost) {
  if (input_megabytes < 0)
    throw std::invalid_argument("node_compute_cost: negative input volume");
  return cost.rate(mode) * input_megabytes;
}

std::int64_t link_data_volume(ProcessingMode mode,
                              const FrameContext::NodeVolumes& sender) {
  switch (mode) {
    case ProcessingMode::RawPreservation: return sender.raw_bytes;
    case ProcessingMode::FeatureExtraction: return sender.feature_bytes;
    case ProcessingMode::BoundingBox: return sender.object_bytes;
  }
  return 0;
}

std::string Violation::describe() const {
  switch (kind[0]) {
    case 'n':
      return "node " + std::to_string(node) + " compute over capacity by " +
             std::to_string(deficit) + " units";
    case 'l':
      return "link " + std::to_string(from) + "->" + std::to_string(to) +
             " over bandwidth by " + std::to_string(deficit) + " bytes";
    case 'm':
      return "node " + std::to_string(node) + " assigned a disallowed mode";
    default:
      return "flow " + std::to_string(from) + "->" + std::to_string(to) +
             " is not a declared link";
  }
}

std::vector<Violation> check_feasible(const TopologyPlan& plan,
                                      const MecGraph& graph,
                                      const FrameContext& frame,
                                      const CostModel& cost) {
  std::vector<Violation> out;

  std::map<std::pair<int, int>, std::int64_t> link_bw;
  for (const auto& l : graph.links)
    link_bw[{l.from, l.to}] = l.bandwidth_bytes_per_frame;

  // flows must be declared links; volume per active flow within bandwidth
  std::map<int, std::int64_t> incoming;  // receiver -> bytes
  for (const auto& [from, to] : plan.flows) {
    if (!frame.active.count(from) || !frame.active.count(to)) continue;
    auto bw = link_bw.find({from, to});
    if (bw == link_bw.end()) {
      out.push_back({"flow", -1, from, to, 0.0});
      continue;
    }
    auto vol_it = frame.volumes.find(from);
    auto mode_it = plan.modes.find(from);
    if (vol_it == frame.volumes.end() || mode_it == plan.modes.end()) continue;
    std::int64_t vol = link_data_volume(mode_it->second, vol_it->second);
    incoming[to] += vol;
    if (vol > bw->second)
      out.push_back({"link_bandwidth", -1, from, to,
                     static_cast<double>(vol - bw->second)});
  }

  for (int id : frame.active) {
    const NodeSpec* node = graph.find_node(id);
    auto mode_it = plan.modes.find(id);
    if (!node || mode_it == plan.modes.end()) {
      out.push_back({"mode", id, -1, -1, 0.0});
      continue;
    }
    if (!node->allowed_modes.count(mode_it->second)) {
      out.push_back({"mode", id, -1, -1, 0.0});
      continue;
    }
    double input_bytes =
        static_cast<double>(frame.volumes.at(id).raw_bytes + incoming[id]);
    double c = node_compute_cost(mode_it->second, input_bytes / 1.0e6, cost);
    if (c > node->compute_capacity)
      out.push_back({"node_compute", id, -1, -1, c - node->compute_capacity});
  }
  return out;
}

double evaluate_objective(const TopologyPlan& plan, const MecGraph& graph,
                          const std::vector<SensedFrame>& frames,
                          const PipelineConfig& config, const CostModel& cost,
                          std::uint64_t seed) {
  if (frames.empty())
    throw std::invalid_argument("evaluate_objective: no frames");
  double sum = 0.0;
  for (const auto& frame : frames) {
    FrameResult fr = run_frame(graph, plan, frame, config, seed, cost);
    EvalFrame ef{fr.final_detections, frame.scene.objects, fr.gt_points};
    sum += compute_ap_report({ef}, config.thresholds).overall_ap;
  }
  return sum / static_cast<double>(frames.size());
}

namespace {

struct PlanEncoding {
  std::vector<int> modes;
  std::vector<std::pair<int, int>> flows;

  bool operator<(const PlanEncoding& o) const {
    if (flows.size() != o.flows.size()) return flows.size() < o.flows.size();
    if (modes != o.modes) return modes < o.modes;
    return flows < o.flows;
  }
};

PlanEncoding encode(const TopologyPlan& plan) {
  PlanEncoding e;
  for (const auto& [id, mode] : plan.modes) e.modes.push_back(static_cast<int>(mode));
  e.flows.assign(plan.flows.begin(), plan.flows.end());
  return e;
}

bool feasible_everywhere(const TopologyPlan& plan, const MecGraph& graph,
                         const std::vector<FrameContext>& contexts,
                         const CostModel& cost) {
  for (const auto& ctx : contexts)
    if (!check_feasible(plan, graph, ctx, cost).empty()) return false;
  return true;
}

std::vector<FrameContext> build_contexts(const MecGraph& graph,
                                         const std::vector<SensedFrame>& frames,
                                         const PipelineConfig& config,
                                         std::uint64_t seed) {
  std::vector<FrameContext> out;
  out.reserve(frames.size());
  for (const auto& f : frames)
    out.push_back(make_frame_context(graph, f, config, seed));
  return out;
}

// normalized resource footprint; used by the greedy move scoring
double resource_usage(const TopologyPlan& plan, const MecGraph& graph,
                      const std::vector<FrameContext>& contexts,
                      const CostModel& cost) {
  double usage = 0.0;
  for (const auto& ctx : contexts) {
    std::map<int, std::int64_t> incoming;
    for (const auto& [from, to] : plan.flows) {
      if (!ctx.active.count(from) || !ctx.active.count(to)) continue;
      auto mode_it = plan.modes.find(from);
      if (mode_it == plan.modes.end()) continue;
      std::int64_t vol = link_data_volume(mode_it->second, ctx.volumes.at(from));
      incoming[to] += vol;
      for (const auto& l : graph.links)
        if (l.from == from && l.to == to && l.bandwidth_bytes_per_frame > 0)
          usage += static_cast<double>(vol) / static_cast<double>(l.bandwidth_bytes_per_frame);
    }
    for (int id : ctx.active) {
      const NodeSpec* node = graph.find_node(id);
      auto mode_it = plan.modes.find(id);
      if (!node || mode_it == plan.modes.end() || node->compute_capacity <= 0)
        continue;
      double input_bytes =
          static_cast<double>(ctx.volumes.at(id).raw_bytes + incoming[id]);
      usage += node_compute_cost(mode_it->second, input_bytes / 1.0e6, cost) /
               node->compute_capacity;
    }
  }
  return usage;
}

}  // namespace

TopologyPlan solve_exhaustive(const MecGraph& graph,
                              const std::vector<SensedFrame>& frames,
                              const PipelineConfig& config, const CostModel& cost,
                              std::uint64_t seed, SolveStats* stats) {
  graph.validate();
  std::vector<const NodeSpec*> nodes;
  for (const auto& n : graph.nodes) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(),
            [](const NodeSpec* a, const NodeSpec* b) { return a->id < b->id; });

  double space = 1.0;
  for (const auto* n : nodes) space *= static_cast<double>(n->allowed_modes.size());
  space *= std::pow(2.0, static_cast<double>(graph.links.size()));
  if (space > static_cast<double>(kExhaustiveCap))
    throw std::runtime_error("solve_exhaustive: search space too large");

  auto contexts = build_contexts(graph, frames, config, seed);

  std::vector<std::vector<ProcessingMode>> mode_choices;
  for (const auto* n : nodes)
    mode_choices.emplace_back(n->allowed_modes.begin(), n->allowed_modes.end());

  SolveStats local;
  bool found = false;
  TopologyPlan best;
  double best_j = 0.0;
  PlanEncoding best_enc;

  std::vector<std::size_t> odo(nodes.size(), 0);
  const std::size_t n_links = graph.links.size();
  bool done = nodes.empty() && n_links == 0;
  while (true) {
    TopologyPlan plan;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      plan.modes[nodes[i]->id] = mode_choices[i][odo[i]];
    for (std::uint64_t mask = 0; mask < (1ULL << n_links); ++mask) {
      plan.flows.clear();
      for (std::size_t li = 0; li < n_links; ++li)
        if (mask & (1ULL << li))
          plan.flows.insert({graph.links[li].from, graph.links[li].to});
      ++local.plans_considered;
      if (!feasible_everywhere(plan, graph, contexts, cost)) continue;
      ++local.plans_evaluated;
      double j = evaluate_objective(plan, graph, frames, config, cost, seed);
      PlanEncoding enc = encode(plan);
      if (!found || j > best_j || (j == best_j && enc < best_enc)) {
        found = true;
        best = plan;
        best_j = j;
        best_enc = enc;
      }
    }
    // advance the mode odometer
    std::size_t i = 0;
    for (; i < nodes.size(); ++i) {
      if (++odo[i] < mode_choices[i].size()) break;
      odo[i] = 0;
    }
    if (i == nodes.size()) break;
    if (done) break;
  }

  if (!found) throw std::runtime_error("solve_exhaustive: no feasible plan");
  local.best_objective = best_j;
  if (stats) *stats = local;
  return best;
}

TopologyPlan solve_greedy(const MecGraph& graph,
                          const std::vector<SensedFrame>& frames,
                          const PipelineConfig& config, const CostModel& cost,
                          std::uint64_t seed, SolveStats* stats) {
  graph.validate();
  auto contexts = build_contexts(graph, frames, config, seed);

  TopologyPlan plan;
  for (const auto& n : graph.nodes)
    plan.modes[n.id] = *n.allowed_modes.begin();  // cheapest: r0 <= r1 <= r2
  if (!feasible_everywhere(plan, graph, contexts, cost))
    throw std::runtime_error("solve_greedy: no feasible plan");

  SolveStats local;
  double current_j = evaluate_objective(plan, graph, frames, config, cost, seed);
  double current_usage = resource_usage(plan, graph, contexts, cost);
  ++local.plans_evaluated;

  bool improved = true;
  while (improved) {
    improved = false;
    TopologyPlan best_move;
    double best_score = 0.0, best_j = current_j, best_usage = current_usage;

    auto consider = [&](const TopologyPlan& candidate) {
      ++local.plans_considered;
      if (!feasible_everywhere(candidate, graph, contexts, cost)) return;
      ++local.plans_evaluated;
      double j = evaluate_objective(candidate, graph, frames, config, cost, seed);
      if (j <= current_j + 1e-12) return;
      double usage = resource_usage(candidate, graph, contexts, cost);
      double score = (j - current_j) / (std::max(0.0, usage - current_usage) + 1e-9);
      if (score > best_score) {
        best_score = score;
        best_move = candidate;
        best_j = j;
        best_usage = usage;
      }
    };

    for (const auto& n : graph.nodes)
      for (ProcessingMode m : n.allowed_modes) {
        if (plan.modes.at(n.id) == m) continue;
        TopologyPlan candidate = plan;
        candidate.modes[n.id] = m;
        consider(candidate);
      }
    for (const auto& l : graph.links) {
      if (plan.flows.count({l.from, l.to})) continue;
      TopologyPlan candidate = plan;
      candidate.flows.insert({l.from, l.to});
      consider(candidate);
    }

    if (best_score > 0.0) {
      plan = best_move;
      current_j = best_j;
      current_usage = best_usage;
      improved = true;
    }
  }

  local.best_objective = current_j;
  if (stats) *stats = local;
  return plan;
}

}  // namespace coopsim
