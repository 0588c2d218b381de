// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/pipeline.hpp"

#include "parallel.hpp"
#include "vineskel/error.hpp"
#include "vineskel/image_io.hpp"
#include "vineskel/io.hpp"
#include "vineskel/mask.hpp"
#include "vineskel/ply.hpp"

#include <algorithm>
#include <cstdio>

namespace vineskel {

namespace fs = std::filesystem;

void SkeletonizeParams::validate() const {
  if (!(voxel_size > 0.0)) throw InvalidParameter("voxel_size must be positive");
  graph.validate();
  if (!(fit.seg_len > 0.0)) throw InvalidParameter("seg_len must be positive");
  if (fit.batch_limit < 2) throw InvalidParameter("batch_limit must be at least 2");
  if (fit.max_iters < 0) throw InvalidParameter("fit max_iters must be non-negative");
  if (gamma_p_scale < 0.0 || gamma_s_scale < 0.0) throw InvalidParameter("gamma scales must be non-negative");
  if (!(r_prior > 0.0)) throw InvalidParameter("r_prior must be positive");
}

namespace {

struct ClusterOutput {
  TopologyGraph topology;
  Skeleton skeleton;
  std::vector<std::size_t> support;
  std::vector<double> objective;
  std::vector<GraphEdge> smooth_edges;
};

}  // namespace

SkeletonizeResult skeletonize(const PointCloud& cloud, const SkeletonizeParams& params, int threads) {
  params.validate();
  SkeletonizeResult r;
  const DownsampleResult ds = voxel_downsample_mapped(cloud, params.voxel_size);
  r.downsampled = ds.cloud;
  const auto positions = ds.cloud.positions();
  r.local = build_local_graph(positions, params.graph.r_s);
  r.mst = minimum_spanning_forest(r.local);
  if (params.close_cycles) {
    ClosureResult closure = close_mst_cycles(r.mst, r.local, params.graph.delta_l);
    r.closed = std::move(closure.graph);
    r.closure_edges = closure.added.size();
  } else {
    r.closed = r.mst;
  }

  std::vector<Cluster> clusters;
  for (auto& c : connected_clusters(r.closed))
    if (c.size() >= params.min_cluster_nodes) clusters.push_back(std::move(c));
  std::vector<std::int32_t> cluster_of(positions.size(), -1);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (NodeId v : clusters[c]) cluster_of[v] = static_cast<std::int32_t>(c);
  std::vector<std::vector<Eigen::Vector3d>> cluster_points(clusters.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::int32_t c = cluster_of[ds.source_to_voxel[i]];
    if (c >= 0) cluster_points[static_cast<std::size_t>(c)].push_back(cloud.points[i].position);
  }

  std::vector<ClusterOutput> outputs(clusters.size());
  detail::parallel_for(clusters.size(), threads, [&](std::size_t c) {
    ClusterOutput& out = outputs[c];
    const NodeId root = select_root(r.closed, clusters[c], params.root);
    const DirectedGraph smooth = remove_barbs(orient_from_root(r.closed, root), params.graph.delta_b);
    out.smooth_edges = smooth.undirected().edges();
    out.topology = extract_topology(smooth);
    const auto& pts = cluster_points[c];
    const auto assoc = associate_points(pts, out.topology);
    LineFit fit = fit_lines(out.topology, pts, assoc, params.fit);
    out.objective = fit.objective;
    out.support.assign(fit.skeleton.segments.size(), 0);
    std::size_t associated = 0;
    for (std::int32_t s : fit.point_segment)
      if (s >= 0) {
        ++out.support[static_cast<std::size_t>(s)];
        ++associated;
      }
    if (fit.skeleton.empty()) return;
    const RadiusSystem sys = RadiusSystem::scaled(associated, fit.skeleton.segments.size(), params.gamma_p_scale,
                                                  params.gamma_s_scale, params.r_prior);
    out.skeleton = estimate_radii(fit.skeleton, fit.point_segment, fit.point_distance, sys);
    for (auto& s : out.skeleton.segments) s.cluster_id = static_cast<std::int32_t>(c);
  });

  std::vector<GraphEdge> smooth_edges;
  for (auto& out : outputs) {
    r.skeleton.append(out.skeleton);
    r.segment_support.insert(r.segment_support.end(), out.support.begin(), out.support.end());
    r.objective_history.push_back(std::move(out.objective));
    r.topologies.push_back(std::move(out.topology));
    smooth_edges.insert(smooth_edges.end(), out.smooth_edges.begin(), out.smooth_edges.end());
  }
  r.smooth = SpatialGraph(positions, std::move(smooth_edges));
  return r;
}

void PipelineConfig::validate() const {
  if (cloud.empty() && frames.empty()) throw InvalidParameter("either input.cloud or input.frames is required");
  if (cams.empty() != masks.empty()) throw InvalidParameter("input.cams and input.masks must be given together");
  if (pole_distance < 0.0) throw InvalidParameter("pole_distance must be non-negative");
  if (icp.max_iters <= 0 || !(icp.tol >= 0.0) || !(icp.max_correspondence > 0.0)) throw InvalidParameter("invalid ICP parameters");
  if (!(overlap_radius > 0.0) || !(distance_margin >= 0.0)) throw InvalidParameter("invalid far-point parameters");
  if (dilation_radius < 0) throw InvalidParameter("dilation_radius must be non-negative");
  if (skeleton_labels.empty()) throw InvalidParameter("skeleton labels may not be empty");
  if (!(feature_voxel_size > 0.0)) throw InvalidParameter("feature voxel size must be positive");
  if (threads < 1) throw InvalidParameter("threads must be at least 1");
  skeleton.validate();
}

PointCloud select_vine_points(const PointCloud& cloud, const std::vector<Label>& labels) {
  const bool labelled = std::any_of(cloud.points.begin(), cloud.points.end(), [](const Point& p) { return p.label.has_value(); });
  if (!labelled) return cloud;
  PointCloud out;
  for (const auto& p : cloud.points)
    if (p.label && std::find(labels.begin(), labels.end(), *p.label) != labels.end()) out.points.push_back(p);
  return out;
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string view_name(std::size_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "view_%03zu.png", v);
  return buf;
}

}  // namespace

PipelineArtifacts run_pipeline(const PipelineConfig& config) {
  stage("config", [&] { config.validate(); });
  PipelineArtifacts art;
  const fs::path& out = config.out_dir;
  stage("output", [&] { fs::create_directories(out); });
  auto emit = [&](const fs::path& name, const std::string& text) {
    write_text(out / name, text);
    art.written.push_back(out / name);
  };

  const PointCloud cloud = stage("load", [&] {
    if (config.frames.empty()) return read_ply(config.cloud);
    std::vector<Frame> frames;
    for (const auto& rec : read_frame_records(config.frames)) {
      Frame f;
      f.cloud = read_ply(rec.file);
      f.pose.camera_id = rec.camera_id;
      f.pose.initial_pose = rec.pose;
      f.sequence = rec.sequence;
      frames.push_back(std::move(f));
    }
    RegistrationResult reg = register_scan(frames, config.icp, config.threads);
    PointCloud merged = config.discard_far ? discard_far_points(reg.combined, config.overlap_radius, config.distance_margin)
                                           : std::move(reg.combined);
    write_ply(out / "registered.ply", merged);
    art.written.push_back(out / "registered.ply");
    emit("poses.json", poses_to_json(reg.poses));
    return merged;
  });

  std::vector<CameraModel> cams;
  std::vector<Mask> masks, eval_masks;
  stage("masks", [&] {
    if (config.cams.empty()) return;
    cams = read_cameras(config.cams);
    const auto files = list_mask_files(config.masks);
    if (files.size() != cams.size())
      throw ShapeError(std::to_string(files.size()) + " masks for " + std::to_string(cams.size()) + " cameras");
    for (const auto& f : files) masks.push_back(read_mask(f));
    eval_masks = masks;
    if (config.refine_masks) {
      for (std::size_t v = 0; v < masks.size(); ++v) {
        eval_masks[v] = refine_cane_mask(masks[v], config.dilation_radius);
        write_mask_png(out / "masks_refined" / files[v].filename().replace_extension(".png"), eval_masks[v]);
        art.written.push_back(out / "masks_refined" / files[v].filename().replace_extension(".png"));
      }
    }
  });

  art.skeleton = stage("skeletonize", [&] {
    SkeletonizeResult r = skeletonize(select_vine_points(cloud, config.skeleton_labels), config.skeleton, config.threads);
    emit("graph_local.json", graph_to_json(r.local));
    emit("graph_mst.json", graph_to_json(r.mst));
    emit("graph_closed.json", graph_to_json(r.closed));
    emit("graph_smooth.json", graph_to_json(r.smooth));
    emit("topology.json", topology_to_json(r.topologies));
    emit("skeleton.json", skeleton_to_json(r.skeleton));
    return r;
  });

  stage("eval", [&] {
    if (cams.empty()) return;
    art.iou = reprojection_iou(art.skeleton.skeleton, cams, eval_masks, config.threads);
    emit("iou.json", iou_report_to_json(art.iou));
    if (config.overlays)
      for (std::size_t v = 0; v < cams.size(); ++v) {
        write_overlay_png(out / "overlays" / view_name(v), project_skeleton(art.skeleton.skeleton, cams[v]), eval_masks[v]);
        art.written.push_back(out / "overlays" / view_name(v));
      }
  });

  stage("features", [&] {
    art.features = extract_features(cloud.filter_labels({Label::cane}), cloud.filter_labels({Label::cordon}),
                                    art.skeleton.skeleton, masks, config.pole_distance, config.feature_voxel_size);
    art.features.vine_id = config.vine_id;
    art.features.pruning_weight = config.pruning_weight;
    emit("features.csv", features_to_csv({art.features}));
  });
  return art;
}

}  // namespace vineskel
