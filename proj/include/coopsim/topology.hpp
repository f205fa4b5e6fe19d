#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coopsim/simulator.hpp"

namespace coopsim {

// Per-node realized output volumes for one frame, the inputs to the
// feasibility constraints.
struct FrameContext {
  struct NodeVolumes {
    std::int64_t raw_bytes = 0;      // 12 B per sensed point
    std::int64_t feature_bytes = 0;  // 256 B per sifted cell
    std::int64_t object_bytes = 0;   // 64 B per local detection
  };
  std::map<int, NodeVolumes> volumes;
  std::set<int> active;
};

// Builds the context from sensed data; sifting and local detection counts
// follow the pipeline config, independent of any plan.
FrameContext make_frame_context(const MecGraph& graph, const SensedFrame& sensed,
                                const PipelineConfig& config, std::uint64_t seed);

double node_compute_cost(ProcessingMode mode, double input_megabytes,
                         const CostModel& cost);

// Bytes node `id` puts on a link when transmitting under `mode`.
std::int64_t link_data_volume(ProcessingMode mode,
                              const FrameContext::NodeVolumes& sender);

struct Violation {
  std::string kind;  // "node_compute" | "link_bandwidth" | "mode" | "flow"
  int node = -1;
  int from = -1, to = -1;
  double deficit = 0.0;
  std::string describe() const;
};

// Empty result iff every node compute constraint and every active-flow
// bandwidth constraint holds for this frame.
std::vector<Violation> check_feasible(const TopologyPlan& plan,
                                      const MecGraph& graph,
                                      const FrameContext& frame,
                                      const CostModel& cost);

// Mean overall AP of the pipeline run under `plan` across the sensed
// frames. Throws std::runtime_error naming the first violation when the
// plan is infeasible on any frame.
double evaluate_objective(const TopologyPlan& plan, const MecGraph& graph,
                          const std::vector<SensedFrame>& frames,
                          const PipelineConfig& config, const CostModel& cost,
                          std::uint64_t seed);

struct SolveStats {
  std::int64_t plans_considered = 0;
  std::int64_t plans_evaluated = 0;  // feasible ones
  double best_objective = 0.0;
};

inline constexpr std::int64_t kExhaustiveCap = 1000000;

// Full enumeration over mode assignments x link subsets; ties break by
// fewer flows then lexicographic plan encoding. Throws when the search
// space exceeds kExhaustiveCap or no candidate is feasible.
TopologyPlan solve_exhaustive(const MecGraph& graph,
                              const std::vector<SensedFrame>& frames,
                              const PipelineConfig& config, const CostModel& cost,
                              std::uint64_t seed, SolveStats* stats = nullptr);

// Hill climb from the cheapest no-flow plan: repeatedly applies the single
// mode-upgrade or flow-activation with the best objective gain per unit of
// scarcest-resource consumption.
TopologyPlan solve_greedy(const MecGraph& graph,
                          const std::vector<SensedFrame>& frames,
                          const PipelineConfig& config, const CostModel& cost,
                          std::uint64_t seed, SolveStats* stats = nullptr);

}  // namespace coopsim
