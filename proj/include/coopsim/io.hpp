#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "coopsim/eval.hpp"
#include "coopsim/simulator.hpp"

namespace coopsim::io {

// flat little-endian float32 (x, y, z) triples
void write_cloud_binary(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud read_cloud_binary(const std::filesystem::path& path, Frame frame);

// compact deck format: grid header + sorted (ix, iy, count) triples
std::vector<std::byte> serialize_deck(const FeatureDeck& deck);
FeatureDeck deserialize_deck(const std::vector<std::byte>& data);

// JSON-lines detection records
std::string detections_to_jsonl(const std::vector<Detection>& dets);
std::vector<Detection> detections_from_jsonl(const std::string& text);

std::string messages_to_csv(const std::vector<FrameResult>& frames);
std::string ap_report_to_json(const ApReport& report);
std::string tradeoff_to_csv(const TradeoffCurve& curve);
std::string combinations_to_csv(const std::vector<CombinationResult>& rows);

std::string plan_to_json(const TopologyPlan& plan);
TopologyPlan plan_from_json(const std::string& text);

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace coopsim::io
