// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/config.hpp"
#include "vineskel/error.hpp"
#include "vineskel/image_io.hpp"
#include "vineskel/io.hpp"
#include "vineskel/mask.hpp"
#include "vineskel/pipeline.hpp"
#include "vineskel/ply.hpp"
#include "vineskel/synth.hpp"
#include "vineskel/vigor.hpp"

#include <CLI11.hpp>

#include <fnmatch.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace vineskel;

namespace {

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text(out, text);
}

// A directory, or a file-name pattern such as masks/*.png.
std::vector<fs::path> expand_glob(const std::string& spec, const std::string& what) {
  const fs::path p(spec);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  const std::string pattern = p.filename().string();
  std::vector<fs::path> out;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && fnmatch(pattern.c_str(), e.path().filename().c_str(), 0) == 0) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  if (out.empty()) throw Error("no " + what + " match " + spec);
  return out;
}

std::vector<fs::path> expand_masks(const std::string& spec) {
  if (fs::is_directory(spec)) return list_mask_files(spec);
  return expand_glob(spec, "masks");
}

std::string pr_json(const PrecisionRecall& pr) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "{\n  \"precision\": %.17g,\n  \"recall\": %.17g,\n  \"f1\": %.17g\n}\n", pr.precision,
                pr.recall, pr.f1);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vineskel: grapevine skeletonization and vigor estimation"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads")->envname("VINESKEL_THREADS")->check(CLI::PositiveNumber);

  // register
  auto* reg = app.add_subcommand("register", "align stereo frames into one cloud");
  std::string reg_frames, reg_out, reg_poses;
  IcpParams icp;
  bool reg_keep_far = false;
  double overlap_radius = 0.02, distance_margin = 0.25;
  std::string reg_pose_list;
  reg->add_option("--frames", reg_frames, "frame list JSON, or a PLY glob when --poses is given")->required();
  reg->add_option("--poses", reg_pose_list, "initial poses JSON, one entry per frame in file-name order");
  reg->add_option("--out", reg_out, "combined cloud (PLY)")->required();
  reg->add_option("--poses-out", reg_poses, "refined poses JSON");
  reg->add_option("--max-iters", icp.max_iters);
  reg->add_option("--tol", icp.tol);
  reg->add_option("--max-correspondence", icp.max_correspondence);
  reg->add_flag("--keep-far", reg_keep_far, "skip far-point removal");
  reg->add_option("--overlap-radius", overlap_radius);
  reg->add_option("--distance-margin", distance_margin);

  // refine-mask
  auto* refine = app.add_subcommand("refine-mask", "thin, dilate and intersect a cane mask");
  std::string refine_in, refine_out;
  int refine_radius = 3;
  refine->add_option("--in", refine_in)->required();
  refine->add_option("--out", refine_out)->required();
  refine->add_option("--radius", refine_radius, "dilation radius (px)")->check(CLI::NonNegativeNumber);

  // mask-score
  auto* score = app.add_subcommand("mask-score", "precision / recall of a mask against truth");
  std::string score_pred, score_truth, score_out;
  score->add_option("--pred", score_pred)->required();
  score->add_option("--truth", score_truth)->required();
  score->add_option("--out", score_out);

  // skeletonize
  auto* skel = app.add_subcommand("skeletonize", "skeleton from a point cloud");
  std::string skel_cloud, skel_out, skel_config, skel_root;
  std::vector<std::string> dumps;
  bool skel_no_close = false;
  skel->add_option("--cloud", skel_cloud)->required();
  skel->add_option("--out", skel_out, "output directory")->required();
  skel->add_option("--config", skel_config, "TOML config ([skeleton] table is used)");
  skel->add_option("--dump-graph", dumps, "also write graph_<stage>.json")
      ->check(CLI::IsMember({"local", "mst", "closed", "smooth"}));
  skel->add_option("--root-strategy", skel_root, "min-z | max-degree | index:<n>");
  skel->add_flag("--no-close", skel_no_close, "disable MST cycle closure");

  // eval
  auto* ev = app.add_subcommand("eval", "reprojection IoU of a skeleton against masks");
  std::string ev_skel, ev_cams, ev_masks, ev_out, ev_overlay;
  bool ev_refined = false;
  int ev_radius = 3;
  ev->add_option("--skeleton", ev_skel)->required();
  ev->add_option("--cams", ev_cams)->required();
  ev->add_option("--masks", ev_masks, "directory or file pattern, one per camera in name order")->required();
  ev->add_option("--out", ev_out);
  ev->add_option("--overlay", ev_overlay, "directory for colour overlays");
  ev->add_flag("--refined", ev_refined, "score against refined masks");
  ev->add_option("--dilation-radius", ev_radius)->check(CLI::NonNegativeNumber);

  // vigor
  auto* vig = app.add_subcommand("vigor", "pruning-weight regression");
  vig->require_subcommand(1);
  std::string vig_features, vig_out, vig_r2 = "test";
  std::uint64_t vig_seed = 0;
  std::size_t vig_folds = 100;
  double vig_train = 0.7;
  std::vector<CLI::App*> vig_cmds;
  for (const char* name : {"fit", "eval", "drop-one"}) {
    auto* c = vig->add_subcommand(name);
    c->add_option("--features", vig_features, "features CSV")->required();
    c->add_option("--out", vig_out);
    c->add_option("--seed", vig_seed);
    c->add_option("--folds", vig_folds)->check(CLI::PositiveNumber);
    c->add_option("--train-frac", vig_train);
    c->add_option("--r2-reference", vig_r2, "test | train")->check(CLI::IsMember({"test", "train"}));
    vig_cmds.push_back(c);
  }

  // synth
  auto* syn = app.add_subcommand("synth", "generate a synthetic vine");
  std::string syn_spec, syn_out;
  std::optional<std::uint64_t> syn_seed;
  syn->add_option("--spec", syn_spec, "VineSpec JSON (defaults when omitted)");
  syn->add_option("--out", syn_out)->required();
  syn->add_option("--seed", syn_seed, "override the spec seed");

  // run
  auto* run = app.add_subcommand("run", "end-to-end pipeline");
  std::string run_config, run_out;
  bool run_overlay = false, run_refined = false;
  run->add_option("--config", run_config)->required();
  run->add_option("--out", run_out, "override output.dir");
  run->add_flag("--overlay", run_overlay);
  run->add_flag("--refined", run_refined);

  // config
  auto* cfg = app.add_subcommand("config", "configuration helpers");
  bool cfg_defaults = false;
  cfg->add_flag("--defaults", cfg_defaults, "print every key with its default")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (reg->parsed()) {
      std::vector<FrameRecord> records;
      if (reg_pose_list.empty()) {
        records = read_frame_records(reg_frames);
      } else {
        records = read_frame_records(reg_pose_list);
        const auto files = expand_glob(reg_frames, "frames");
        if (files.size() != records.size())
          throw ShapeError(std::to_string(files.size()) + " frame files but " + std::to_string(records.size()) +
                           " poses");
        for (std::size_t i = 0; i < files.size(); ++i) records[i].file = files[i];
      }
      std::vector<Frame> frames;
      for (const auto& rec : records) {
        if (rec.file.empty()) throw Error("frame without a file; pass --poses with a PLY glob");
        Frame f;
        f.cloud = read_ply(rec.file);
        f.pose.camera_id = rec.camera_id;
        f.pose.initial_pose = rec.pose;
        f.sequence = rec.sequence;
        frames.push_back(std::move(f));
      }
      RegistrationResult r = register_scan(frames, icp, threads);
      const PointCloud out = reg_keep_far ? r.combined : discard_far_points(r.combined, overlap_radius, distance_margin);
      write_ply(reg_out, out);
      if (!reg_poses.empty()) write_text(reg_poses, poses_to_json(r.poses));
    } else if (refine->parsed()) {
      write_mask_png(refine_out, refine_cane_mask(read_mask(refine_in), refine_radius));
    } else if (score->parsed()) {
      emit(score_out, pr_json(precision_recall(read_mask(score_pred), read_mask(score_truth))));
    } else if (skel->parsed()) {
      SkeletonizeParams params;
      if (!skel_config.empty()) params = load_config(skel_config).skeleton;
      if (!skel_root.empty()) params.root = parse_root_strategy(skel_root);
      if (skel_no_close) params.close_cycles = false;
      PipelineConfig defaults;
      const PointCloud cloud = select_vine_points(read_ply(skel_cloud), defaults.skeleton_labels);
      const SkeletonizeResult r = skeletonize(cloud, params, threads);
      const fs::path out(skel_out);
      write_text(out / "skeleton.json", skeleton_to_json(r.skeleton));
      write_text(out / "topology.json", topology_to_json(r.topologies));
      const std::map<std::string, const SpatialGraph*> graphs = {
          {"local", &r.local}, {"mst", &r.mst}, {"closed", &r.closed}, {"smooth", &r.smooth}};
      for (const auto& d : dumps) write_text(out / ("graph_" + d + ".json"), graph_to_json(*graphs.at(d)));
    } else if (ev->parsed()) {
      const Skeleton sk = read_skeleton(ev_skel);
      const auto cams = read_cameras(ev_cams);
      std::vector<Mask> masks;
      for (const auto& f : expand_masks(ev_masks)) {
        Mask m = read_mask(f);
        masks.push_back(ev_refined ? refine_cane_mask(m, ev_radius) : std::move(m));
      }
      const IoUReport rep = reprojection_iou(sk, cams, masks, threads);
      emit(ev_out, iou_report_to_json(rep));
      if (!ev_overlay.empty())
        for (std::size_t v = 0; v < cams.size(); ++v) {
          char name[32];
          std::snprintf(name, sizeof name, "view_%03zu.png", v);
          write_overlay_png(fs::path(ev_overlay) / name, project_skeleton(sk, cams[v]), masks[v]);
        }
    } else if (vig->parsed()) {
      const auto rows = read_features(vig_features);
      FoldOptions opt;
      opt.n_folds = vig_folds;
      opt.train_frac = vig_train;
      opt.seed = vig_seed;
      opt.r2_reference = vig_r2 == "train" ? R2Reference::train_mean : R2Reference::test_mean;
      opt.threads = threads;
      if (vig_cmds[0]->parsed()) emit(vig_out, linear_model_to_json(fit_model(rows)));
      else if (vig_cmds[1]->parsed()) emit(vig_out, fold_report_to_json(evaluate_folds(rows, opt)));
      else emit(vig_out, drop_one_to_json(drop_one_analysis(rows, opt)));
    } else if (syn->parsed()) {
      VineSpec spec;
      if (!syn_spec.empty()) spec = vine_spec_from_json(read_text(syn_spec), syn_spec);
      if (syn_seed) spec.seed = *syn_seed;
      const SyntheticVine vine = generate_vine(spec);
      const fs::path out(syn_out);
      fs::create_directories(out / "masks");
      write_ply(out / "cloud.ply", vine.cloud);
      write_text(out / "truth.json", truth_to_json(vine.truth));
      write_text(out / "cams.json", cameras_to_json(vine.cameras));
      write_text(out / "spec.json", vine_spec_to_json(spec));
      for (std::size_t v = 0; v < vine.masks.size(); ++v) {
        char name[32];
        std::snprintf(name, sizeof name, "cam_%03zu.png", v);
        write_mask_png(out / "masks" / name, vine.masks[v]);
      }
      char pole[64];
      std::snprintf(pole, sizeof pole, "%.17g", vine.truth.pole_distance);
      write_text(out / "vine.toml", "[input]\ncloud = \"cloud.ply\"\ncams = \"cams.json\"\nmasks = \"masks\"\nvine_id = \"synth-" +
                                        std::to_string(spec.seed) + "\"\npole_distance = " + pole + "\n\n[output]\ndir = \"out\"\n");
    } else if (run->parsed()) {
      PipelineConfig config = load_config(run_config);
      if (!run_out.empty()) config.out_dir = run_out;
      if (run_overlay) config.overlays = true;
      if (run_refined) config.refine_masks = true;
      if (app.get_option("--threads")->count() > 0 || std::getenv("VINESKEL_THREADS")) config.threads = threads;
      const PipelineArtifacts art = run_pipeline(config);
      std::cerr << "segments: " << art.skeleton.skeleton.segments.size() << "  iou: " << art.iou.iou << "\n";
    } else if (cfg->parsed()) {
      std::cout << default_config_toml();
    }
  } catch (const std::exception& e) {
    std::cerr << "vineskel: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
