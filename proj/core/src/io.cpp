// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/io.hpp"

#include "vineskel/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace vineskel {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for " + path.string());
}

namespace {

json parse_json(std::string_view text, const std::string& source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(source, e.byte == 0 ? 0 : e.byte - 1, e.what());
  }
}

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs `fn` and turns schema errors into ParseError for `source`.
template <typename Fn>
auto with_schema(const std::string& source, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw ParseError(source, 0, std::string("schema: ") + e.what());
  } catch (const SchemaError& e) {
    throw ParseError(source, 0, std::string("schema: ") + e.what());
  }
}

json vec3(const Eigen::Vector3d& p) { return json::array({p.x(), p.y(), p.z()}); }

Eigen::Vector3d to_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw SchemaError("expected [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

RigidTransform to_pose(const json& j) {
  if (!j.is_array() || j.size() != 16) throw SchemaError("pose must have 16 numbers");
  std::vector<double> m;
  for (const auto& v : j) m.push_back(v.get<double>());
  return RigidTransform::from_row_major(m);
}

json pose_json(const RigidTransform& t) {
  json out = json::array();
  for (double v : t.to_row_major()) out.push_back(v);
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json fold_json(const FoldReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds) folds.push_back({{"r2", f.r2}, {"rmse", f.rmse}});
  return {{"r2_mean", r.r2_mean}, {"r2_std", r.r2_std}, {"rmse_mean", r.rmse_mean}, {"rmse_std", r.rmse_std},
          {"folds", folds}};
}

json iou_json(const IoUReport& r) {
  json out = {{"iou", r.iou},
              {"intersection_px", r.intersection_px},
              {"union_px", r.union_px},
              {"model_only_px", r.model_only_px},
              {"mask_only_px", r.mask_only_px}};
  if (!r.views.empty()) {
    json views = json::array();
    for (const auto& v : r.views) views.push_back(iou_json(v));
    out["views"] = views;
  }
  return out;
}

std::string_view truth_kind_name(TruthKind k) {
  switch (k) {
    case TruthKind::cordon: return "cordon";
    case TruthKind::cane: return "cane";
    case TruthKind::barb: return "barb";
  }
  return "cane";
}

}  // namespace

std::string skeleton_to_json(const Skeleton& skeleton) {
  json endpoints = json::array();
  for (const auto& p : skeleton.endpoints) endpoints.push_back(vec3(p));
  json segments = json::array();
  for (const auto& s : skeleton.segments)
    segments.push_back({{"a", s.a}, {"b", s.b}, {"radius", s.radius}, {"edge_id", s.edge_id}, {"cluster_id", s.cluster_id}});
  return dump({{"version", kSkeletonVersion}, {"endpoints", endpoints}, {"segments", segments}});
}

Skeleton skeleton_from_json(std::string_view text, const std::string& source) {
  const json j = parse_json(text, source);
  return with_schema(source, [&] {
    if (j.value("version", std::string()) != kSkeletonVersion)
      throw ParseError(source, 0, "unsupported skeleton version");
    Skeleton sk;
    for (const auto& p : j.at("endpoints")) sk.endpoints.push_back(to_vec3(p));
    for (const auto& s : j.at("segments")) {
      Segment seg;
      seg.a = s.at("a").get<std::uint32_t>();
      seg.b = s.at("b").get<std::uint32_t>();
      seg.radius = s.at("radius").get<double>();
      seg.edge_id = s.value("edge_id", -1);
      seg.cluster_id = s.value("cluster_id", 0);
      if (seg.a >= sk.endpoints.size() || seg.b >= sk.endpoints.size())
        throw ParseError(source, 0, "segment references a missing endpoint");
      sk.segments.push_back(seg);
    }
    return sk;
  });
}

Skeleton read_skeleton(const fs::path& path) { return skeleton_from_json(read_text(path), path.string()); }

std::string graph_to_json(const SpatialGraph& graph) {
  json nodes = json::array();
  for (const auto& p : graph.positions()) nodes.push_back(vec3(p));
  json edges = json::array();
  for (const auto& e : graph.edges()) edges.push_back({e.i, e.j});
  return dump({{"nodes", nodes}, {"edges", edges}});
}

std::string topology_to_json(const std::vector<TopologyGraph>& clusters) {
  json out = json::array();
  for (const auto& topo : clusters) {
    json nodes = json::array();
    for (const auto& n : topo.nodes)
      nodes.push_back({{"id", n.id}, {"kind", std::string(kind_name(n.kind))}, {"position", vec3(topo.positions[n.id])}});
    json edges = json::array();
    for (const auto& e : topo.edges) edges.push_back({{"chain", e.chain}, {"length", e.length(topo.positions)}});
    out.push_back({{"nodes", nodes}, {"edges", edges}, {"cycle_rank", topo.cycle_rank()}, {"warnings", topo.warnings}});
  }
  return dump({{"clusters", out}});
}

std::string cameras_to_json(const std::vector<CameraModel>& cams) {
  json out = json::array();
  for (const auto& c : cams)
    out.push_back({{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy}, {"width", c.width}, {"height", c.height},
                   {"pose", pose_json(c.pose)}});
  return dump(out);
}

std::vector<CameraModel> cameras_from_json(std::string_view text, const std::string& source) {
  const json j = parse_json(text, source);
  return with_schema(source, [&] {
    std::vector<CameraModel> cams;
    for (const auto& c : j) {
      CameraModel cam;
      cam.fx = c.at("fx").get<double>();
      cam.fy = c.at("fy").get<double>();
      cam.cx = c.at("cx").get<double>();
      cam.cy = c.at("cy").get<double>();
      cam.width = c.at("width").get<int>();
      cam.height = c.at("height").get<int>();
      cam.pose = to_pose(c.at("pose"));
      cam.validate();
      cams.push_back(cam);
    }
    return cams;
  });
}

std::vector<CameraModel> read_cameras(const fs::path& path) { return cameras_from_json(read_text(path), path.string()); }

std::vector<FrameRecord> read_frame_records(const fs::path& path) {
  const std::string source = path.string();
  const json j = parse_json(read_text(path), source);
  return with_schema(source, [&] {
    std::vector<FrameRecord> out;
    for (const auto& f : j) {
      FrameRecord r;
      r.camera_id = f.at("camera_id").get<std::uint8_t>();
      r.pose = to_pose(f.at("pose"));
      if (f.contains("file")) {
        const fs::path file = f.at("file").get<std::string>();
        r.file = file.is_absolute() ? file : path.parent_path() / file;
      }
      const std::string seq = f.value("sequence", std::string("horizontal"));
      if (seq == "horizontal") r.sequence = Sequence::horizontal;
      else if (seq == "vertical") r.sequence = Sequence::vertical;
      else throw ParseError(source, 0, "unknown sequence '" + seq + "'");
      out.push_back(r);
    }
    return out;
  });
}

std::string poses_to_json(const std::vector<FramePose>& poses) {
  json out = json::array();
  for (const auto& p : poses)
    out.push_back({{"camera_id", p.camera_id}, {"initial_pose", pose_json(p.initial_pose)}, {"refined_pose", pose_json(p.refined_pose)}});
  return dump(out);
}

std::string iou_report_to_json(const IoUReport& report) { return dump(iou_json(report)); }

std::string fold_report_to_json(const FoldReport& report) { return dump(fold_json(report)); }

std::string drop_one_to_json(const std::vector<std::pair<std::string, FoldReport>>& reports) {
  json out = json::object();
  for (const auto& [name, r] : reports) out[name] = fold_json(r);
  return dump(out);
}

std::string linear_model_to_json(const LinearModel& m) {
  json w = json::object(), means = json::object(), stds = json::object();
  for (std::size_t i = 0; i < m.feature_names.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    w[m.feature_names[i]] = m.weights[k];
    means[m.feature_names[i]] = m.feature_means[k];
    stds[m.feature_names[i]] = m.feature_stds[k];
  }
  return dump({{"bias", m.bias}, {"weights", w}, {"feature_means", means}, {"feature_stds", stds}});
}

namespace {

constexpr std::string_view kCsvHeader =
    "vine_id,cane_voxels,cordon_voxels,pole_distance_m,skeleton_length_m,cane_pixels,pruning_weight_kg";

std::string fmt_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

}  // namespace

std::string features_to_csv(const std::vector<VineFeatures>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    if (r.vine_id.find_first_of(",\n\"") != std::string::npos) throw InvalidParameter("vine_id may not contain commas, quotes or newlines");
    out += r.vine_id;
    for (double v : {r.cane_voxels, r.cordon_voxels, r.pole_distance, r.skeleton_length, r.cane_pixels}) out += ',' + fmt_double(v);
    out += ',';
    if (r.pruning_weight) out += fmt_double(*r.pruning_weight);
    out += '\n';
  }
  return out;
}

std::vector<VineFeatures> features_from_csv(std::string_view text, const std::string& source) {
  std::vector<VineFeatures> rows;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    const std::size_t line_start = pos;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kCsvHeader) throw ParseError(source, line_start, "unexpected CSV header");
      header = false;
      continue;
    }
    std::vector<std::string_view> cells;
    std::vector<std::size_t> offsets;
    std::size_t c = 0;
    for (;;) {
      const std::size_t comma = line.find(',', c);
      offsets.push_back(line_start + c);
      cells.push_back(line.substr(c, comma == std::string_view::npos ? std::string_view::npos : comma - c));
      if (comma == std::string_view::npos) break;
      c = comma + 1;
    }
    if (cells.size() != 7) throw ParseError(source, line_start, "expected 7 columns, got " + std::to_string(cells.size()));
    auto number = [&](std::size_t k) {
      double v = 0.0;
      const auto* first = cells[k].data();
      const auto* last = first + cells[k].size();
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) throw ParseError(source, offsets[k], "invalid number '" + std::string(cells[k]) + "'");
      return v;
    };
    VineFeatures f;
    f.vine_id = std::string(cells[0]);
    f.cane_voxels = number(1);
    f.cordon_voxels = number(2);
    f.pole_distance = number(3);
    f.skeleton_length = number(4);
    f.cane_pixels = number(5);
    if (!cells[6].empty()) f.pruning_weight = number(6);
    rows.push_back(std::move(f));
  }
  if (header) throw ParseError(source, 0, "missing CSV header");
  return rows;
}

std::vector<VineFeatures> read_features(const fs::path& path) { return features_from_csv(read_text(path), path.string()); }

VineSpec vine_spec_from_json(std::string_view text, const std::string& source) {
  const json j = parse_json(text, source);
  return with_schema(source, [&] {
    if (!j.is_object()) throw ParseError(source, 0, "spec must be a JSON object");
    VineSpec s;
    const std::set<std::string> known = {"seed", "n_canes", "cane_length_min", "cane_length_max", "curvature", "radius_min",
                                         "radius_max", "cordon_radius", "loop_count", "barb_count", "barb_length_max",
                                         "noise_sigma", "points_per_meter", "cordon_length", "cordon_height", "clearance",
                                         "n_cameras", "camera_distance"};
    for (const auto& [key, value] : j.items())
      if (!known.count(key)) throw ParseError(source, 0, "unknown spec key '" + key + "'");
    s.seed = j.value("seed", s.seed);
    s.n_canes = j.value("n_canes", s.n_canes);
    s.cane_length_min = j.value("cane_length_min", s.cane_length_min);
    s.cane_length_max = j.value("cane_length_max", s.cane_length_max);
    s.curvature = j.value("curvature", s.curvature);
    s.radius_min = j.value("radius_min", s.radius_min);
    s.radius_max = j.value("radius_max", s.radius_max);
    s.cordon_radius = j.value("cordon_radius", s.cordon_radius);
    s.loop_count = j.value("loop_count", s.loop_count);
    s.barb_count = j.value("barb_count", s.barb_count);
    s.barb_length_max = j.value("barb_length_max", s.barb_length_max);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.points_per_meter = j.value("points_per_meter", s.points_per_meter);
    s.cordon_length = j.value("cordon_length", s.cordon_length);
    s.cordon_height = j.value("cordon_height", s.cordon_height);
    s.clearance = j.value("clearance", s.clearance);
    s.n_cameras = j.value("n_cameras", s.n_cameras);
    s.camera_distance = j.value("camera_distance", s.camera_distance);
    s.validate();
    return s;
  });
}

std::string vine_spec_to_json(const VineSpec& s) {
  return dump({{"seed", s.seed},
               {"n_canes", s.n_canes},
               {"cane_length_min", s.cane_length_min},
               {"cane_length_max", s.cane_length_max},
               {"curvature", s.curvature},
               {"radius_min", s.radius_min},
               {"radius_max", s.radius_max},
               {"cordon_radius", s.cordon_radius},
               {"loop_count", s.loop_count},
               {"barb_count", s.barb_count},
               {"barb_length_max", s.barb_length_max},
               {"noise_sigma", s.noise_sigma},
               {"points_per_meter", s.points_per_meter},
               {"cordon_length", s.cordon_length},
               {"cordon_height", s.cordon_height},
               {"clearance", s.clearance},
               {"n_cameras", s.n_cameras},
               {"camera_distance", s.camera_distance}});
}

std::string truth_to_json(const GroundTruth& truth) {
  json lines = json::array();
  for (const auto& pl : truth.polylines) {
    json pts = json::array();
    for (const auto& p : pl.points) pts.push_back(vec3(p));
    lines.push_back({{"kind", std::string(truth_kind_name(pl.kind))},
                     {"points", pts},
                     {"radii", pl.radii},
                     {"parent", pl.parent},
                     {"parent_vertex", pl.parent_vertex}});
  }
  return dump({{"polylines", lines},
               {"component_count", truth.component_count},
               {"cycle_count", truth.cycle_count},
               {"pole_distance", truth.pole_distance}});
}

std::string truth_score_to_json(const TruthScore& s) {
  return dump({{"centerline_rms", s.centerline_rms},
               {"model_to_truth_rms", s.model_to_truth_rms},
               {"truth_to_model_rms", s.truth_to_model_rms},
               {"radius_rel_error_mean", s.radius_rel_error_mean},
               {"radius_rel_error_median", s.radius_rel_error_median},
               {"radius_rel_error_max", s.radius_rel_error_max},
               {"radius_segments", s.radius_segments},
               {"model_components", s.model_components},
               {"model_cycles", s.model_cycles},
               {"truth_components", s.truth_components},
               {"truth_cycles", s.truth_cycles}});
}

std::vector<fs::path> list_mask_files(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) throw Error("mask directory not found: " + dir.string());
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png" || ext == ".pgm") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace vineskel
