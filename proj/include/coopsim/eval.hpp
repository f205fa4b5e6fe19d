#pragma once

#include <map>
#include <string>
#include <vector>

#include "coopsim/fusion.hpp"

namespace coopsim {

struct EvalThresholds {
  std::map<ObjectClass, double> iou = {{ObjectClass::Car, 0.7},
                                       {ObjectClass::Pedestrian, 0.25}};
};

// BEV IoU of two yaw-oriented ground-plane rectangles.
double bev_iou(const OrientedRect& a, const OrientedRect& b);

struct MatchResult {
  int detection_index = -1;
  int gt_id = -1;  // -1: unmatched (false positive)
  double iou = 0.0;
};

// Greedy matching in descending score order; a detection takes the
// highest-IoU unmatched same-class ground truth with IoU >= threshold.
std::vector<MatchResult> match_and_score(const std::vector<Detection>& dets,
                                         const std::vector<GroundTruthObject>& gts,
                                         const EvalThresholds& thresholds);

// All-point interpolated AP over (score, is_tp) pairs sorted by descending
// score, as a percent. num_gt = 0: 100 with no detections, else 0.
double average_precision(const std::vector<std::pair<double, bool>>& ranked,
                         int num_gt);

// One evaluated frame: final detections, ground truth, and per-object point
// counts from the union of raw sensed clouds (used for MP bucketing).
struct EvalFrame {
  std::vector<Detection> detections;
  std::vector<GroundTruthObject> gts;
  std::map<int, int> gt_points;
};

inline constexpr int kMpBuckets[3] = {10, 5, 1};

struct ApReport {
  double overall_ap = 0.0;  // percent, GT-weighted mean of per-class AP at MP>=1
  // per class name -> "mp>=N" -> AP percent
  std::map<std::string, std::map<std::string, double>> per_class_ap;
  std::map<std::string, std::map<std::string, double>> per_class_ar;
};

// Pools frames, matches per frame, and scores per class and MP bucket.
// Buckets are nested GT populations; detections matched to an
// out-of-bucket ground truth are ignored rather than counted as FP.
ApReport compute_ap_report(const std::vector<EvalFrame>& frames,
                           const EvalThresholds& thresholds);

struct TradeoffRow {
  std::string strategy;
  std::int64_t budget_cells = 0;
  std::int64_t budget_bytes = 0;
  double overall_ap = 0.0;
  double bandwidth_saving = 0.0;
  double ap_reduction = 0.0;
};

struct TradeoffCurve {
  std::int64_t k_max = 15000;
  std::vector<TradeoffRow> rows;  // sorted by budget descending per strategy
};

}  // namespace coopsim
