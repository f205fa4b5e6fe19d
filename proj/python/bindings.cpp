#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "coopsim/config.hpp"
#include "coopsim/dfs.hpp"
#include "coopsim/eval.hpp"
#include "coopsim/fusion.hpp"
#include "coopsim/io.hpp"
#include "coopsim/simulator.hpp"
#include "coopsim/topology.hpp"

namespace py = pybind11;
using namespace coopsim;

PYBIND11_MODULE(_coopsim, m) {
  m.doc() = "cooperative perception simulator core";

  py::register_exception<SchemaError>(m, "SchemaError");

  py::enum_<ObjectClass>(m, "ObjectClass")
      .value("Car", ObjectClass::Car)
      .value("Pedestrian", ObjectClass::Pedestrian);
  py::enum_<Frame>(m, "Frame")
      .value("Ego", Frame::Ego)
      .value("Global", Frame::Global);
  py::enum_<FilterStrategy>(m, "FilterStrategy")
      .value("TopKNearest", FilterStrategy::TopKNearest)
      .value("TopKFarthest", FilterStrategy::TopKFarthest)
      .value("RandomVoxel", FilterStrategy::RandomVoxel)
      .value("RandomPriority", FilterStrategy::RandomPriority);
  py::enum_<ProcessingMode>(m, "ProcessingMode")
      .value("RawPreservation", ProcessingMode::RawPreservation)
      .value("FeatureExtraction", ProcessingMode::FeatureExtraction)
      .value("BoundingBox", ProcessingMode::BoundingBox);
  py::enum_<NodeKind>(m, "NodeKind")
      .value("CPV", NodeKind::CPV)
      .value("CV", NodeKind::CV)
      .value("CAV", NodeKind::CAV)
      .value("EdgePerception", NodeKind::EdgePerception)
      .value("CentralPerceptionInfra", NodeKind::CentralPerceptionInfra)
      .value("DeepPerceptionCloud", NodeKind::DeepPerceptionCloud);

  py::class_<Vec3>(m, "Vec3")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"),
           py::arg("z"))
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z)
      .def("norm", &Vec3::norm)
      .def("__repr__", [](const Vec3& v) {
        return "Vec3(" + std::to_string(v.x) + ", " + std::to_string(v.y) +
               ", " + std::to_string(v.z) + ")";
      });

  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init<double, double, double, double, double, double>(),
           py::arg("x") = 0, py::arg("y") = 0, py::arg("z") = 0,
           py::arg("roll") = 0, py::arg("pitch") = 0, py::arg("yaw") = 0)
      .def_readwrite("x", &Pose::x)
      .def_readwrite("y", &Pose::y)
      .def_readwrite("z", &Pose::z)
      .def_readwrite("roll", &Pose::roll)
      .def_readwrite("pitch", &Pose::pitch)
      .def_readwrite("yaw", &Pose::yaw)
      .def("normalized", &Pose::normalized);

  py::class_<OrientedRect>(m, "OrientedRect")
      .def(py::init<>())
      .def(py::init<double, double, double, double, double>(), py::arg("cx"),
           py::arg("cy"), py::arg("half_l"), py::arg("half_w"),
           py::arg("yaw") = 0)
      .def_readwrite("cx", &OrientedRect::cx)
      .def_readwrite("cy", &OrientedRect::cy)
      .def_readwrite("half_l", &OrientedRect::half_l)
      .def_readwrite("half_w", &OrientedRect::half_w)
      .def_readwrite("yaw", &OrientedRect::yaw)
      .def("contains", &OrientedRect::contains, py::arg("px"), py::arg("py"),
           py::arg("margin") = 0.0)
      .def("area", &OrientedRect::area);

  py::class_<GroundTruthObject>(m, "GroundTruthObject")
      .def(py::init<>())
      .def_readwrite("id", &GroundTruthObject::id)
      .def_readwrite("cls", &GroundTruthObject::cls)
      .def_readwrite("pose", &GroundTruthObject::pose)
      .def_readwrite("extent", &GroundTruthObject::extent)
      .def("footprint", &GroundTruthObject::footprint);

  py::class_<SceneBounds>(m, "SceneBounds")
      .def(py::init<>())
      .def(py::init<double, double, double, double>(), py::arg("min_x"),
           py::arg("min_y"), py::arg("size_x"), py::arg("size_y"))
      .def_readwrite("min_x", &SceneBounds::min_x)
      .def_readwrite("min_y", &SceneBounds::min_y)
      .def_readwrite("size_x", &SceneBounds::size_x)
      .def_readwrite("size_y", &SceneBounds::size_y);

  py::class_<Scene>(m, "Scene")
      .def(py::init<>())
      .def_readwrite("objects", &Scene::objects)
      .def_readwrite("bounds", &Scene::bounds)
      .def_readwrite("frame_index", &Scene::frame_index);

  py::class_<SceneConfig>(m, "SceneConfig")
      .def(py::init<>())
      .def_readwrite("num_cars", &SceneConfig::num_cars)
      .def_readwrite("num_pedestrians", &SceneConfig::num_pedestrians)
      .def_readwrite("bounds", &SceneConfig::bounds)
      .def_readwrite("car_extent", &SceneConfig::car_extent)
      .def_readwrite("pedestrian_extent", &SceneConfig::pedestrian_extent)
      .def_readwrite("placement_margin", &SceneConfig::placement_margin)
      .def_readwrite("max_retries", &SceneConfig::max_retries);

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init<>())
      .def_readwrite("points", &PointCloud::points)
      .def_readwrite("frame", &PointCloud::frame)
      .def("__len__", [](const PointCloud& c) { return c.points.size(); });

  py::class_<SensorSpec>(m, "SensorSpec")
      .def(py::init<>())
      .def_readwrite("channels", &SensorSpec::channels)
      .def_readwrite("mount_height", &SensorSpec::mount_height)
      .def_readwrite("range", &SensorSpec::range)
      .def_readwrite("rotation_hz", &SensorSpec::rotation_hz)
      .def_readwrite("upper_fov", &SensorSpec::upper_fov)
      .def_readwrite("lower_fov", &SensorSpec::lower_fov)
      .def_readwrite("noise_std", &SensorSpec::noise_std)
      .def_readwrite("dropoff_rate", &SensorSpec::dropoff_rate)
      .def_readwrite("dropoff_intensity", &SensorSpec::dropoff_intensity)
      .def_readwrite("horizontal_resolution", &SensorSpec::horizontal_resolution);
  m.def("vehicle_sensor", &vehicle_sensor);
  m.def("infrastructure_sensor", &infrastructure_sensor);

  py::class_<VoxelGridSpec>(m, "VoxelGridSpec")
      .def(py::init<>())
      .def_readwrite("origin_x", &VoxelGridSpec::origin_x)
      .def_readwrite("origin_y", &VoxelGridSpec::origin_y)
      .def_readwrite("cell_dx", &VoxelGridSpec::cell_dx)
      .def_readwrite("cell_dy", &VoxelGridSpec::cell_dy)
      .def_readwrite("cell_dz", &VoxelGridSpec::cell_dz)
      .def_readwrite("nx", &VoxelGridSpec::nx)
      .def_readwrite("ny", &VoxelGridSpec::ny)
      .def("center_x", &VoxelGridSpec::center_x)
      .def("center_y", &VoxelGridSpec::center_y)
      .def("__eq__", [](const VoxelGridSpec& a, const VoxelGridSpec& b) {
        return a == b;
      });

  py::class_<FeatureCell>(m, "FeatureCell")
      .def(py::init<>())
      .def_readwrite("ix", &FeatureCell::ix)
      .def_readwrite("iy", &FeatureCell::iy)
      .def_readwrite("point_count", &FeatureCell::point_count)
      .def_readwrite("source_node", &FeatureCell::source_node);

  py::class_<FeatureDeck>(m, "FeatureDeck")
      .def(py::init<>())
      .def_readwrite("grid", &FeatureDeck::grid)
      .def_readwrite("cells", &FeatureDeck::cells)
      .def_readwrite("owner", &FeatureDeck::owner)
      .def("payload_bytes", &FeatureDeck::payload_bytes)
      .def("__len__", &FeatureDeck::size);

  py::class_<Detection>(m, "Detection")
      .def(py::init<>())
      .def_readwrite("cls", &Detection::cls)
      .def_readwrite("center", &Detection::center)
      .def_readwrite("extent", &Detection::extent)
      .def_readwrite("yaw", &Detection::yaw)
      .def_readwrite("score", &Detection::score)
      .def_readwrite("source_node", &Detection::source_node)
      .def("footprint", &Detection::footprint);

  py::class_<NmsConfig>(m, "NmsConfig")
      .def(py::init<>())
      .def_readwrite("radius_per_class", &NmsConfig::radius_per_class);

  py::class_<DetectorParams>(m, "DetectorParams")
      .def(py::init<>())
      .def_readwrite("min_points", &DetectorParams::min_points)
      .def_readwrite("score_halfpoint", &DetectorParams::score_halfpoint)
      .def_readwrite("base_jitter", &DetectorParams::base_jitter)
      .def_readwrite("yaw_jitter", &DetectorParams::yaw_jitter)
      .def_readwrite("clutter_rate", &DetectorParams::clutter_rate)
      .def_readwrite("clutter_enabled", &DetectorParams::clutter_enabled);

  py::class_<EvalThresholds>(m, "EvalThresholds")
      .def(py::init<>())
      .def_readwrite("iou", &EvalThresholds::iou);

  py::class_<MatchResult>(m, "MatchResult")
      .def_readonly("detection_index", &MatchResult::detection_index)
      .def_readonly("gt_id", &MatchResult::gt_id)
      .def_readonly("iou", &MatchResult::iou);

  py::class_<EvalFrame>(m, "EvalFrame")
      .def(py::init<>())
      .def_readwrite("detections", &EvalFrame::detections)
      .def_readwrite("gts", &EvalFrame::gts)
      .def_readwrite("gt_points", &EvalFrame::gt_points);

  py::class_<ApReport>(m, "ApReport")
      .def(py::init<>())
      .def_readwrite("overall_ap", &ApReport::overall_ap)
      .def_readwrite("per_class_ap", &ApReport::per_class_ap)
      .def_readwrite("per_class_ar", &ApReport::per_class_ar);

  py::class_<TradeoffRow>(m, "TradeoffRow")
      .def_readonly("strategy", &TradeoffRow::strategy)
      .def_readonly("budget_cells", &TradeoffRow::budget_cells)
      .def_readonly("budget_bytes", &TradeoffRow::budget_bytes)
      .def_readonly("overall_ap", &TradeoffRow::overall_ap)
      .def_readonly("bandwidth_saving", &TradeoffRow::bandwidth_saving)
      .def_readonly("ap_reduction", &TradeoffRow::ap_reduction);

  py::class_<TradeoffCurve>(m, "TradeoffCurve")
      .def_readonly("k_max", &TradeoffCurve::k_max)
      .def_readonly("rows", &TradeoffCurve::rows);

  py::class_<CostModel>(m, "CostModel")
      .def(py::init<>())
      .def_readwrite("r0", &CostModel::r0)
      .def_readwrite("r1", &CostModel::r1)
      .def_readwrite("r2", &CostModel::r2)
      .def("rate", &CostModel::rate);

  py::class_<NodeSpec>(m, "NodeSpec")
      .def(py::init<>())
      .def_readwrite("id", &NodeSpec::id)
      .def_readwrite("kind", &NodeSpec::kind)
      .def_readwrite("pose", &NodeSpec::pose)
      .def_readwrite("sensor", &NodeSpec::sensor)
      .def_readwrite("compute_capacity", &NodeSpec::compute_capacity)
      .def_readwrite("allowed_modes", &NodeSpec::allowed_modes)
      .def("has_sensor", &NodeSpec::has_sensor);

  py::class_<LinkSpec>(m, "LinkSpec")
      .def(py::init<>())
      .def(py::init<int, int, std::int64_t>(), py::arg("from_node"),
           py::arg("to_node"), py::arg("bandwidth_bytes_per_frame"))
      .def_readwrite("from_node", &LinkSpec::from)
      .def_readwrite("to_node", &LinkSpec::to)
      .def_readwrite("bandwidth_bytes_per_frame",
                     &LinkSpec::bandwidth_bytes_per_frame);

  py::class_<MecGraph>(m, "MecGraph")
      .def(py::init<>())
      .def_readwrite("nodes", &MecGraph::nodes)
      .def_readwrite("links", &MecGraph::links)
      .def_readwrite("engagement_schedule", &MecGraph::engagement_schedule)
      .def("active_nodes", &MecGraph::active_nodes)
      .def("validate", &MecGraph::validate);

  py::class_<TopologyPlan>(m, "TopologyPlan")
      .def(py::init<>())
      .def_readwrite("modes", &TopologyPlan::modes)
      .def_readwrite("flows", &TopologyPlan::flows)
      .def("__eq__",
           [](const TopologyPlan& a, const TopologyPlan& b) { return a == b; });

  py::class_<SiftOptions>(m, "SiftOptions")
      .def(py::init<>())
      .def_readwrite("rpf_uniform_ranks", &SiftOptions::rpf_uniform_ranks);

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("strategy", &PipelineConfig::strategy)
      .def_readwrite("sift_options", &PipelineConfig::sift_options)
      .def_readwrite("mobile_budget_cells", &PipelineConfig::mobile_budget_cells)
      .def_readwrite("infra_budget_cells", &PipelineConfig::infra_budget_cells)
      .def_readwrite("detector", &PipelineConfig::detector)
      .def_readwrite("nms", &PipelineConfig::nms)
      .def_readwrite("thresholds", &PipelineConfig::thresholds)
      .def_readwrite("cv_self_report", &PipelineConfig::cv_self_report)
      .def_readwrite("backward_results", &PipelineConfig::backward_results);

  py::class_<NodeSensing>(m, "NodeSensing")
      .def_readonly("cloud_global", &NodeSensing::cloud_global)
      .def_readonly("deck", &NodeSensing::deck)
      .def_readonly("raw_points", &NodeSensing::raw_points);

  py::class_<SensedFrame>(m, "SensedFrame")
      .def_readonly("frame_index", &SensedFrame::frame_index)
      .def_readonly("scene", &SensedFrame::scene)
      .def_readonly("grid", &SensedFrame::grid)
      .def_readonly("active", &SensedFrame::active)
      .def_readonly("nodes", &SensedFrame::nodes)
      .def_readonly("gt_points", &SensedFrame::gt_points);

  py::class_<Message>(m, "Message")
      .def_readonly("from_node", &Message::from)
      .def_readonly("to_node", &Message::to)
      .def_readonly("bytes", &Message::bytes)
      .def_readonly("kind", &Message::kind);

  py::class_<FrameResult>(m, "FrameResult")
      .def_readonly("frame_index", &FrameResult::frame_index)
      .def_readonly("final_detections", &FrameResult::final_detections)
      .def_readonly("message_log", &FrameResult::message_log)
      .def_readonly("per_node_cost", &FrameResult::per_node_cost)
      .def_readonly("gt_points", &FrameResult::gt_points)
      .def_readonly("fusion_node", &FrameResult::fusion_node);

  py::class_<SolveRequest>(m, "SolveRequest")
      .def(py::init<>())
      .def(py::init([](const std::string& solver) {
             return SolveRequest{solver};
           }),
           py::arg("solver"))
      .def_readwrite("solver", &SolveRequest::solver);

  py::class_<ScenarioSpec>(m, "ScenarioSpec")
      .def(py::init<>())
      .def_readwrite("graph", &ScenarioSpec::graph)
      .def_readwrite("scene_config", &ScenarioSpec::scene_config)
      .def_readwrite("grid", &ScenarioSpec::grid)
      .def_readwrite("frames", &ScenarioSpec::frames)
      .def_readwrite("seed", &ScenarioSpec::seed)
      .def_readwrite("pipeline", &ScenarioSpec::pipeline)
      .def_readwrite("plan", &ScenarioSpec::plan)
      .def_readwrite("cost_model", &ScenarioSpec::cost_model);

  py::class_<CombinationResult>(m, "CombinationResult")
      .def_readonly("label", &CombinationResult::label)
      .def_readonly("report", &CombinationResult::report);

  py::class_<ScenarioResult>(m, "ScenarioResult")
      .def_readonly("frames", &ScenarioResult::frames)
      .def_readonly("report", &ScenarioResult::report)
      .def_readonly("by_combination", &ScenarioResult::by_combination)
      .def_readonly("plan", &ScenarioResult::plan);

  py::class_<SolveStats>(m, "SolveStats")
      .def(py::init<>())
      .def_readonly("plans_considered", &SolveStats::plans_considered)
      .def_readonly("plans_evaluated", &SolveStats::plans_evaluated)
      .def_readonly("best_objective", &SolveStats::best_objective);

  py::class_<ScenarioFile>(m, "ScenarioFile")
      .def_readonly("spec", &ScenarioFile::spec)
      .def_readonly("output_dir", &ScenarioFile::output_dir);

  // scene + sensing
  m.def("generate_scene", &generate_scene, py::arg("config"), py::arg("seed"));
  m.def("simulate_lidar", &simulate_lidar, py::arg("sensor"),
        py::arg("sensor_pose"), py::arg("scene"), py::arg("seed"));
  m.def("transform_to_grc", &transform_to_grc, py::arg("cloud"),
        py::arg("ego_pose"));
  m.def("points_on_object", &points_on_object, py::arg("cloud"),
        py::arg("object"), py::arg("margin") = 0.03);

  // features + sifting
  m.def("grid_for_bounds", &grid_for_bounds, py::arg("bounds"),
        py::arg("cell_dx") = 0.23, py::arg("cell_dy") = 0.23,
        py::arg("cell_dz") = 8.0);
  m.def("voxelize", &voxelize, py::arg("cloud"), py::arg("grid"),
        py::arg("owner"));
  m.def("deck_union", &deck_union, py::arg("decks"), py::arg("owner"));
  m.def("budget_to_cells", &budget_to_cells, py::arg("budget_bytes"));
  m.def("manhattan_priority", &manhattan_priority, py::arg("cx"), py::arg("cy"),
        py::arg("sx"), py::arg("sy"));
  m.def("sift", &sift, py::arg("deck"), py::arg("strategy"), py::arg("k"),
        py::arg("sensor_x"), py::arg("sensor_y"), py::arg("seed"),
        py::arg("options") = SiftOptions{});
  m.def("strategy_name",
        [](FilterStrategy s) { return to_string(s); });
  m.def("strategy_from_string", &strategy_from_string, py::arg("name"));

  // fusion + detection
  m.def("early_fuse", &early_fuse, py::arg("clouds"));
  m.def("intermediate_fuse", &intermediate_fuse, py::arg("decks"),
        py::arg("owner"));
  m.def("surrogate_detect", &surrogate_detect, py::arg("fused"),
        py::arg("scene"), py::arg("params"), py::arg("seed"),
        py::arg("source_node") = -1);
  m.def("circle_nms", &circle_nms, py::arg("detections"), py::arg("config"));

  // evaluation
  m.def("bev_iou", &bev_iou, py::arg("a"), py::arg("b"));
  m.def("match_and_score", &match_and_score, py::arg("detections"),
        py::arg("ground_truths"), py::arg("thresholds"));
  m.def("average_precision", &average_precision, py::arg("ranked"),
        py::arg("num_gt"));
  m.def("compute_ap_report", &compute_ap_report, py::arg("frames"),
        py::arg("thresholds"));

  // simulator + topology
  m.def("sense_frame", &sense_frame, py::arg("graph"), py::arg("scene"),
        py::arg("grid"), py::arg("active"), py::arg("frame_index"),
        py::arg("seed"));
  m.def("run_frame", &run_frame, py::arg("graph"), py::arg("plan"),
        py::arg("sensed"), py::arg("config"), py::arg("seed"),
        py::arg("cost") = CostModel{});
  m.def("select_fusion_node", &select_fusion_node, py::arg("graph"),
        py::arg("active"));
  m.def("message_complexity", &message_complexity, py::arg("frames"));
  m.def("combination_label", &combination_label, py::arg("graph"),
        py::arg("active"));
  m.def("run_scenario", &run_scenario, py::arg("spec"));
  m.def("sweep_budget", &sweep_budget, py::arg("spec"), py::arg("strategies"),
        py::arg("budgets"), py::arg("k_max") = 15000);
  m.def(
      "solve_exhaustive",
      [](const MecGraph& graph, const std::vector<SensedFrame>& frames,
         const PipelineConfig& config, const CostModel& cost,
         std::uint64_t seed) {
        SolveStats stats;
        TopologyPlan plan =
            solve_exhaustive(graph, frames, config, cost, seed, &stats);
        return std::make_pair(plan, stats);
      },
      py::arg("graph"), py::arg("frames"), py::arg("config"), py::arg("cost"),
      py::arg("seed"));
  m.def(
      "solve_greedy",
      [](const MecGraph& graph, const std::vector<SensedFrame>& frames,
         const PipelineConfig& config, const CostModel& cost,
         std::uint64_t seed) {
        SolveStats stats;
        TopologyPlan plan =
            solve_greedy(graph, frames, config, cost, seed, &stats);
        return std::make_pair(plan, stats);
      },
      py::arg("graph"), py::arg("frames"), py::arg("config"), py::arg("cost"),
      py::arg("seed"));

  // io + config
  m.def("parse_scenario", &parse_scenario, py::arg("json_text"));
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("ap_report_to_json", &io::ap_report_to_json, py::arg("report"));
  m.def("tradeoff_to_csv", &io::tradeoff_to_csv, py::arg("curve"));
  m.def("plan_to_json", &io::plan_to_json, py::arg("plan"));
  m.def("plan_from_json", &io::plan_from_json, py::arg("text"));
  m.def("scene_to_json", &io::scene_to_json, py::arg("scene"));
  m.def("scene_from_json", &io::scene_from_json, py::arg("text"));
  m.def("detections_to_jsonl", &io::detections_to_jsonl, py::arg("detections"));
  m.def("detections_from_jsonl", &io::detections_from_jsonl, py::arg("text"));

  m.attr("CELL_PAYLOAD_BYTES") = kCellPayloadBytes;
  m.attr("BYTES_PER_RAW_POINT") = kBytesPerRawPoint;
  m.attr("BYTES_PER_DETECTION") = kBytesPerDetection;
  m.attr("SCENARIO_SCHEMA_VERSION") = kScenarioSchemaVersion;
}
