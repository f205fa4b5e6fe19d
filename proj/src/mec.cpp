#include "coopsim/mec.hpp"

#include <stdexcept>

namespace coopsim {

std::string to_string(ProcessingMode m) {
  switch (m) {
    case ProcessingMode::RawPreservation: return "raw_preservation";
    case ProcessingMode::FeatureExtraction: return "feature_extraction";
    case ProcessingMode::BoundingBox: return "bounding_box";
  }
  return "?";
}

std::optional<ProcessingMode> mode_from_string(const std::string& name) {
  if (name == "raw_preservation") return ProcessingMode::RawPreservation;
  if (name == "feature_extraction") return ProcessingMode::FeatureExtraction;
  if (name == "bounding_box") return ProcessingMode::BoundingBox;
  return std::nullopt;
}

std::string to_string(NodeKind k) {
  switch (k) {
    case NodeKind::CPV: return "cpv";
    case NodeKind::CV: return "cv";
    case NodeKind::CAV: return "cav";
    case NodeKind::EdgePerception: return "edge_perception";
    case NodeKind::CentralPerceptionInfra: return "central_perception_infra";
    case NodeKind::DeepPerceptionCloud: return "deep_perception_cloud";
  }
  return "?";
}

std::optional<NodeKind> kind_from_string(const std::string& name) {
  if (name == "cpv") return NodeKind::CPV;
  if (name == "cv") return NodeKind::CV;
  if (name == "cav") return NodeKind::CAV;
  if (name == "edge_perception") return NodeKind::EdgePerception;
  if (name == "central_perception_infra") return NodeKind::CentralPerceptionInfra;
  if (name == "deep_perception_cloud") return NodeKind::DeepPerceptionCloud;
  return std::nullopt;
}

bool is_mobile(NodeKind k) {
  return k == NodeKind::CPV || k == NodeKind::CV || k == NodeKind::CAV;
}

int node_tier(NodeKind k) {
  switch (k) {
    case NodeKind::DeepPerceptionCloud: return 3;
    case NodeKind::CentralPerceptionInfra: return 2;
    case NodeKind::EdgePerception: return 1;
    default: return 0;
  }
}

std::set<ProcessingMode> default_modes(NodeKind k) {
  switch (k) {
    case NodeKind::CPV: return {ProcessingMode::FeatureExtraction};
    case NodeKind::CV: return {ProcessingMode::BoundingBox};
    case NodeKind::CAV: return {ProcessingMode::BoundingBox};
    case NodeKind::EdgePerception:
      return {ProcessingMode::RawPreservation, ProcessingMode::FeatureExtraction};
    case NodeKind::CentralPerceptionInfra:
    case NodeKind::DeepPerceptionCloud:
      return {ProcessingMode::RawPreservation, ProcessingMode::FeatureExtraction,
              ProcessingMode::BoundingBox};
  }
  return {};
}

const NodeSpec* MecGraph::find_node(int id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

std::set<int> MecGraph::active_nodes(int frame_index) const {
  auto it = engagement_schedule.find(frame_index);
  if (it != engagement_schedule.end()) return it->second;
  std::set<int> all;
  for (const auto& n : nodes) all.insert(n.id);
  return all;
}

void MecGraph::validate() const {
  std::set<int> ids;
  for (const auto& n : nodes) {
    if (!ids.insert(n.id).second)
      throw std::invalid_argument("MecGraph: duplicate node id " + std::to_string(n.id));
    if (n.kind == NodeKind::CV && n.has_sensor())
      throw std::invalid_argument("MecGraph: CV node " + std::to_string(n.id) +
                                  " cannot carry a sensor");
    if (n.compute_capacity < 0)
      throw std::invalid_argument("MecGraph: negative capacity on node " +
                                  std::to_string(n.id));
    if (n.allowed_modes.empty())
      throw std::invalid_argument("MecGraph: node " + std::to_string(n.id) +
                                  " has no allowed modes");
  }
  for (const auto& l : links) {
    if (l.from == l.to)
      throw std::invalid_argument("MecGraph: self-link on node " + std::to_string(l.from));
    if (!ids.count(l.from) || !ids.count(l.to))
      throw std::invalid_argument("MecGraph: link references unknown node");
    if (l.bandwidth_bytes_per_frame < 0)
      throw std::invalid_argument("MecGraph: negative bandwidth");
  }
  for (const auto& [frame, active] : engagement_schedule)
    for (int id : active)
      if (!ids.count(id))
        throw std::invalid_argument("MecGraph: engagement references unknown node " +
                                    std::to_string(id));
}

}  // namespace coopsim
