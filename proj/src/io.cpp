#include "coopsim/io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace coopsim::io {

using nlohmann::json;
using nlohmann::ordered_json;

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for read: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_cloud_binary(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path.string());
  for (const auto& p : cloud.points) {
    float v[3] = {static_cast<float>(p.x), static_cast<float>(p.y),
                  static_cast<float>(p.z)};
    out.write(reinterpret_cast<const char*>(v), sizeof(v));
  }
}

PointCloud read_cloud_binary(const std::filesystem::path& path, Frame frame) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for read: " + path.string());
  PointCloud cloud;
  cloud.frame = frame;
  float v[3];
  while (in.read(reinterpret_cast<char*>(v), sizeof(v)))
    cloud.points.push_back({v[0], v[1], v[2]});
  return cloud;
}

namespace {

template <typename T>
void append_raw(std::vector<std::byte>& out, const T& value) {
  const auto* p = reinterpret_cast<const std::byte*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

template <typename T>
T read_raw(const std::vector<std::byte>& data, std::size_t& offset) {
  if (offset + sizeof(T) > data.size())
    throw std::runtime_error("deserialize_deck: truncated input");
  T value;
  std::memcpy(&value, data.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

}  // namespace

std::vector<std::byte> serialize_deck(const FeatureDeck& deck) {
  std::vector<std::byte> out;
  append_raw(out, deck.grid.origin_x);
  append_raw(out, deck.grid.origin_y);
  append_raw(out, deck.grid.cell_dx);
  append_raw(out, deck.grid.cell_dy);
  append_raw(out, deck.grid.cell_dz);
  append_raw(out, static_cast<std::int32_t>(deck.grid.nx));
  append_raw(out, static_cast<std::int32_t>(deck.grid.ny));
  append_raw(out, static_cast<std::int32_t>(deck.owner));
  append_raw(out, static_cast<std::int64_t>(deck.cells.size()));
  for (const auto& c : deck.cells) {
    append_raw(out, static_cast<std::int32_t>(c.ix));
    append_raw(out, static_cast<std::int32_t>(c.iy));
    append_raw(out, static_cast<std::int32_t>(c.point_count));
  }
  return out;
}

FeatureDeck deserialize_deck(const std::vector<std::byte>& data) {
  FeatureDeck deck;
  std::size_t off = 0;
  deck.grid.origin_x = read_raw<double>(data, off);
  deck.grid.origin_y = read_raw<double>(data, off);
  deck.grid.cell_dx = read_raw<double>(data, off);
  deck.grid.cell_dy = read_raw<double>(data, off);
  deck.grid.cell_dz = read_raw<double>(data, off);
  deck.grid.nx = read_raw<std::int32_t>(data, off);
  deck.grid.ny = read_raw<std::int32_t>(data, off);
  deck.owner = read_raw<std::int32_t>(data, off);
  auto n = read_raw<std::int64_t>(data, off);
  deck.cells.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    FeatureCell c;
    c.ix = read_raw<std::int32_t>(data, off);
    c.iy = read_raw<std::int32_t>(data, off);
    c.point_count = read_raw<std::int32_t>(data, off);
    c.source_node = deck.owner;
    deck.cells.push_back(c);
  }
  return deck;
}

namespace {

ordered_json detection_to_json(const Detection& d) {
  return ordered_json{{"class", to_string(d.cls)},
                      {"center", {d.center.x, d.center.y, d.center.z}},
                      {"extent", {d.extent.x, d.extent.y, d.extent.z}},
                      {"yaw", d.yaw},
                      {"score", d.score},
                      {"source_node", d.source_node}};
}

Detection detection_from_json(const json& j) {
  Detection d;
  std::string cls = j.at("class");
  d.cls = cls == "car" ? ObjectClass::Car : ObjectClass::Pedestrian;
  d.center = {j.at("center")[0], j.at("center")[1], j.at("center")[2]};
  d.extent = {j.at("extent")[0], j.at("extent")[1], j.at("extent")[2]};
  d.yaw = j.at("yaw");
  d.score = j.at("score");
  d.source_node = j.at("source_node");
  return d;
}

}  // namespace

std::string detections_to_jsonl(const std::vector<Detection>& dets) {
  std::string out;
  for (const auto& d : dets) {
    out += detection_to_json(d).dump();
    out += '\n';
  }
  return out;
}

std::vector<Detection> detections_from_jsonl(const std::string& text) {
  std::vector<Detection> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(detection_from_json(json::parse(line)));
  }
  return out;
}

std::string messages_to_csv(const std::vector<FrameResult>& frames) {
  std::string out = "frame,from,to,bytes,kind\n";
  for (const auto& f : frames)
    for (const auto& m : f.message_log)
      out += std::to_string(f.frame_index) + "," + std::to_string(m.from) + "," +
             std::to_string(m.to) + "," + std::to_string(m.bytes) + "," + m.kind +
             "\n";
  return out;
}

std::string ap_report_to_json(const ApReport& report) {
  ordered_json j;
  j["overall_ap"] = report.overall_ap;
  j["per_class_ap"] = report.per_class_ap;
  j["per_class_ar"] = report.per_class_ar;
  return j.dump(2) + "\n";
}

std::string tradeoff_to_csv(const TradeoffCurve& curve) {
  std::ostringstream out;
  out << "strategy,budget_cells,budget_bytes,overall_ap,bandwidth_saving,ap_reduction\n";
  for (const auto& r : curve.rows)
    out << r.strategy << "," << r.budget_cells << "," << r.budget_bytes << ","
        << r.overall_ap << "," << r.bandwidth_saving << "," << r.ap_reduction
        << "\n";
  return out.str();
}

std::string combinations_to_csv(const std::vector<CombinationResult>& rows) {
  std::ostringstream out;
  out << "combination,overall_ap";
  for (const char* cls : {"pedestrian", "car"})
    for (int mp : kMpBuckets) out << "," << cls << "_ap_mp" << mp;
  out << "\n";
  for (const auto& row : rows) {
    out << row.label << "," << row.report.overall_ap;
    for (const char* cls : {"pedestrian", "car"})
      for (int mp : kMpBuckets)
        out << "," << row.report.per_class_ap.at(cls).at("mp>=" + std::to_string(mp));
    out << "\n";
  }
  return out.str();
}

std::string plan_to_json(const TopologyPlan& plan) {
  ordered_json j;
  ordered_json modes = ordered_json::object();
  for (const auto& [id, mode] : plan.modes)
    modes[std::to_string(id)] = to_string(mode);
  j["modes"] = modes;
  ordered_json flows = ordered_json::array();
  for (const auto& [from, to] : plan.flows) flows.push_back({from, to});
  j["flows"] = flows;
  return j.dump(2) + "\n";
}

TopologyPlan plan_from_json(const std::string& text) {
  json j = json::parse(text);
  TopologyPlan plan;
  for (const auto& [key, value] : j.at("modes").items()) {
    auto mode = mode_from_string(value.get<std::string>());
    if (!mode) throw std::runtime_error("plan: unknown mode " + value.get<std::string>());
    plan.modes[std::stoi(key)] = *mode;
  }
  for (const auto& f : j.at("flows"))
    plan.flows.insert({f.at(0).get<int>(), f.at(1).get<int>()});
  return plan;
}

std::string scene_to_json(const Scene& scene) {
  ordered_json j;
  j["frame_index"] = scene.frame_index;
  j["bounds"] = {scene.bounds.min_x, scene.bounds.min_y, scene.bounds.size_x,
                 scene.bounds.size_y};
  ordered_json objs = ordered_json::array();
  for (const auto& o : scene.objects)
    objs.push_back(ordered_json{
        {"id", o.id},
        {"class", to_string(o.cls)},
        {"pose", {o.pose.x, o.pose.y, o.pose.z, o.pose.roll, o.pose.pitch, o.pose.yaw}},
        {"extent", {o.extent.x, o.extent.y, o.extent.z}}});
  j["objects"] = objs;
  return j.dump(2) + "\n";
}

Scene scene_from_json(const std::string& text) {
  json j = json::parse(text);
  Scene scene;
  scene.frame_index = j.at("frame_index");
  scene.bounds = {j.at("bounds")[0], j.at("bounds")[1], j.at("bounds")[2],
                  j.at("bounds")[3]};
  for (const auto& jo : j.at("objects")) {
    GroundTruthObject o;
    o.id = jo.at("id");
    o.cls = jo.at("class") == "car" ? ObjectClass::Car : ObjectClass::Pedestrian;
    const auto& p = jo.at("pose");
    o.pose = {p[0], p[1], p[2], p[3], p[4], p[5]};
    o.extent = {jo.at("extent")[0], jo.at("extent")[1], jo.at("extent")[2]};
    scene.objects.push_back(o);
  }
  return scene;
}

}  // namespace coopsim::io
