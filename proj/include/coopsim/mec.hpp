#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coopsim/lidar.hpp"

namespace coopsim {

inline constexpr int kBytesPerRawPoint = 12;   // 3 x float32
inline constexpr int kBytesPerDetection = 64;  // serialized object record

enum class ProcessingMode : int {
  RawPreservation = 0,
  FeatureExtraction = 1,
  BoundingBox = 2,
};

std::string to_string(ProcessingMode m);
std::optional<ProcessingMode> mode_from_string(const std::string& name);

enum class NodeKind {
  CPV,                       // cooperative perception vehicle (feature sharing)
  CV,                        // connected vehicle, no sensor
  CAV,                       // connected automated vehicle (object sharing)
  EdgePerception,            // roadside perception unit
  CentralPerceptionInfra,    // edge fusion site
  DeepPerceptionCloud,       // cloud fusion site
};

std::string to_string(NodeKind k);
std::optional<NodeKind> kind_from_string(const std::string& name);

bool is_mobile(NodeKind k);
// fusion-site preference: cloud > central infra > edge > mobile
int node_tier(NodeKind k);
std::set<ProcessingMode> default_modes(NodeKind k);

struct CostModel {
  // compute-units per megabyte of input, per processing mode
  double r0 = 1.0, r1 = 4.0, r2 = 10.0;
  // output/input byte ratios used for rough sizing; actual link volumes
  // come from the realized payloads
  double feature_ratio = 0.1;
  double objects_ratio = 0.01;

  double rate(ProcessingMode m) const {
    switch (m) {
      case ProcessingMode::RawPreservation: return r0;
      case ProcessingMode::FeatureExtraction: return r1;
      case ProcessingMode::BoundingBox: return r2;
    }
    return r0;
  }
};

struct NodeSpec {
  int id = 0;
  NodeKind kind = NodeKind::CPV;
  Pose pose;
  std::optional<SensorSpec> sensor;
  double compute_capacity = 0.0;  // compute-units per frame
  std::set<ProcessingMode> allowed_modes;

  bool has_sensor() const { return sensor.has_value(); }
};

struct LinkSpec {
  int from = 0, to = 0;
  std::int64_t bandwidth_bytes_per_frame = 0;
};

struct MecGraph {
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  // frame index -> active node ids; frames not listed activate every node
  std::map<int, std::set<int>> engagement_schedule;

  const NodeSpec* find_node(int id) const;
  std::set<int> active_nodes(int frame_index) const;
  void validate() const;  // throws on dangling links, bad schedules, etc.
};

struct TopologyPlan {
  std::map<int, ProcessingMode> modes;    // node id -> x_i
  std::set<std::pair<int, int>> flows;    // y_ij = 1

  bool operator==(const TopologyPlan& o) const = default;
};

}  // namespace coopsim
