#include "coopsim/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace coopsim {

double bev_iou(const OrientedRect& a, const OrientedRect& b) {
  if (a.area() <= 0 || b.area() <= 0)
    throw std::invalid_argument("bev_iou: degenerate box");
  double inter = convex_intersection_area(a.corners(), b.corners());
  double uni = a.area() + b.area() - inter;
  return inter / uni;
}

std::vector<MatchResult> match_and_score(const std::vector<Detection>& dets,
                                         const std::vector<GroundTruthObject>& gts,
                                         const EvalThresholds& thresholds) {
  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return std::tie(dets[a].center.x, dets[a].center.y) <
           std::tie(dets[b].center.x, dets[b].center.y);
  });

  std::vector<bool> gt_taken(gts.size(), false);
  std::vector<MatchResult> out(dets.size());
  for (std::size_t oi : order) {
    const auto& d = dets[oi];
    auto thr_it = thresholds.iou.find(d.cls);
    double thr = thr_it != thresholds.iou.end() ? thr_it->second : 0.5;
    MatchResult r;
    r.detection_index = static_cast<int>(oi);
    double best = -1.0;
    std::size_t best_gi = gts.size();
    for (std::size_t gi = 0; gi < gts.size(); ++gi) {
      if (gt_taken[gi] || gts[gi].cls != d.cls) continue;
      double iou = bev_iou(d.footprint(), gts[gi].footprint());
      if (iou >= thr && iou > best) {
        best = iou;
        best_gi = gi;
      }
    }
    if (best_gi < gts.size()) {
      gt_taken[best_gi] = true;
      r.gt_id = gts[best_gi].id;
      r.iou = best;
    }
    out[oi] = r;
  }
  return out;
}

double average_precision(const std::vector<std::pair<double, bool>>& ranked,
                         int num_gt) {
  if (num_gt <= 0) return ranked.empty() ? 100.0 : 0.0;
  struct Pt {
    double recall, precision;
  };
  std::vector<Pt> curve;
  int tp = 0, fp = 0;
  for (const auto& [score, is_tp] : ranked) {
    (void)score;
    is_tp ? ++tp : ++fp;
    curve.push_back({static_cast<double>(tp) / num_gt,
                     static_cast<double>(tp) / (tp + fp)});
  }
  // monotone precision envelope, then area under PR
  for (int i = static_cast<int>(curve.size()) - 2; i >= 0; --i)
    curve[i].precision = std::max(curve[i].precision, curve[i + 1].precision);
  double ap = 0.0, prev_recall = 0.0;
  for (const auto& pt : curve) {
    ap += (pt.recall - prev_recall) * pt.precision;
    prev_recall = pt.recall;
  }
  return 100.0 * ap;
}

namespace {

struct ClassBucketStats {
  std::vector<std::pair<double, bool>> ranked;  // non-ignored dets
  int num_gt = 0;
};

}  // namespace

ApReport compute_ap_report(const std::vector<EvalFrame>& frames,
                           const EvalThresholds& thresholds) {
  const ObjectClass classes[2] = {ObjectClass::Car, ObjectClass::Pedestrian};
  // (class, bucket) -> pooled stats
  std::map<std::pair<ObjectClass, int>, ClassBucketStats> stats;

  for (const auto& frame : frames) {
    auto matches = match_and_score(frame.detections, frame.gts, thresholds);
    std::map<int, const GroundTruthObject*> gt_by_id;
    for (const auto& g : frame.gts) gt_by_id[g.id] = &g;

    auto points_of = [&](int gt_id) {
      auto it = frame.gt_points.find(gt_id);
      return it != frame.gt_points.end() ? it->second : 0;
    };

    for (int mp : kMpBuckets) {
      for (const auto& g : frame.gts)
        if (points_of(g.id) >= mp)
          ++stats[{g.cls, mp}].num_gt;
      for (std::size_t di = 0; di < frame.detections.size(); ++di) {
        const auto& d = frame.detections[di];
        const auto& m = matches[di];
        if (m.gt_id >= 0 && points_of(m.gt_id) < mp)
          continue;  // matched an out-of-bucket GT: ignored
        stats[{d.cls, mp}].ranked.push_back({d.score, m.gt_id >= 0});
      }
    }
  }

  ApReport report;
  for (ObjectClass cls : classes) {
    for (int mp : kMpBuckets) {
      auto& s = stats[{cls, mp}];
      std::stable_sort(s.ranked.begin(), s.ranked.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      double ap = average_precision(s.ranked, s.num_gt);
      int tp = 0;
      for (const auto& [score, is_tp] : s.ranked)
        if (is_tp) ++tp;
      double ar = s.num_gt > 0 ? 100.0 * tp / s.num_gt
                               : (s.ranked.empty() ? 100.0 : 0.0);
      std::string bucket = "mp>=" + std::to_string(mp);
      report.per_class_ap[to_string(cls)][bucket] = ap;
      report.per_class_ar[to_string(cls)][bucket] = ar;
    }
  }

  // GT-weighted mean of per-class AP at the MP>=1 population
  double weighted = 0.0;
  int total_gt = 0;
  bool any_det = false;
  for (ObjectClass cls : classes) {
    auto& s = stats[{cls, 1}];
    weighted += s.num_gt * report.per_class_ap[to_string(cls)]["mp>=1"];
    total_gt += s.num_gt;
    any_det = any_det || !s.ranked.empty();
  }
  report.overall_ap =
      total_gt > 0 ? weighted / total_gt : (any_det ? 0.0 : 100.0);
  return report;
}

}  // namespace coopsim
