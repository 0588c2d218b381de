// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/config.hpp"

#include "vineskel/error.hpp"
#include "vineskel/io.hpp"

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace vineskel {

namespace fs = std::filesystem;

RootSelection parse_root_strategy(std::string_view text) {
  RootSelection sel;
  if (text == "min-z") {
    sel.strategy = RootStrategy::min_z;
  } else if (text == "max-degree") {
    sel.strategy = RootStrategy::max_degree;
  } else if (text.starts_with("index:")) {
    const std::string_view num = text.substr(6);
    NodeId v = 0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec != std::errc() || ptr != num.data() + num.size() || num.empty())
      throw InvalidParameter("invalid root index '" + std::string(num) + "'");
    sel.strategy = RootStrategy::index;
    sel.index = v;
  } else {
    throw InvalidParameter("unknown root strategy '" + std::string(text) + "' (min-z, max-degree, index:<n>)");
  }
  return sel;
}

std::string root_strategy_name(const RootSelection& root) {
  switch (root.strategy) {
    case RootStrategy::min_z: return "min-z";
    case RootStrategy::max_degree: return "max-degree";
    case RootStrategy::index: return "index:" + std::to_string(root.index);
  }
  return "min-z";
}

namespace {

Label parse_label(std::string_view name) {
  for (int l = 0; l < kLabelCount; ++l)
    if (label_name(static_cast<Label>(l)) == name) return static_cast<Label>(l);
  throw InvalidParameter("unknown label '" + std::string(name) + "'");
}

// Byte offset of a (1-based) line/column position.
std::size_t offset_of(std::string_view text, std::size_t line, std::size_t column) {
  std::size_t pos = 0;
  for (std::size_t l = 1; l < line && pos < text.size(); ++l) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) return text.size();
    pos = nl + 1;
  }
  return std::min(text.size(), pos + (column > 0 ? column - 1 : 0));
}

class Reader {
 public:
  Reader(const toml::table& root, std::string_view text, std::string source)
      : root_(root), text_(text), source_(std::move(source)) {}

  const toml::table* table(const std::string& name, const std::set<std::string>& keys) {
    const toml::node* node = root_.get(name);
    if (!node) return nullptr;
    const toml::table* t = node->as_table();
    if (!t) fail(*node, "'" + name + "' must be a table");
    for (const auto& [key, value] : *t)
      if (!keys.count(std::string(key.str()))) fail(value, "unknown key '" + name + "." + std::string(key.str()) + "'");
    return t;
  }

  void check_tables(const std::set<std::string>& names) {
    for (const auto& [key, value] : root_)
      if (!names.count(std::string(key.str()))) fail(value, "unknown table '" + std::string(key.str()) + "'");
  }

  void get(const toml::table* t, const char* key, double& out) {
    if (const toml::node* n = t ? t->get(key) : nullptr) {
      if (auto v = n->as_floating_point()) out = v->get();
      else if (auto i = n->as_integer()) out = static_cast<double>(i->get());
      else fail(*n, std::string("'") + key + "' must be a number");
    }
  }
  void get(const toml::table* t, const char* key, std::optional<double>& out) {
    if (t && t->get(key)) {
      double v = 0.0;
      get(t, key, v);
      out = v;
    }
  }
  template <typename Int>
  void get_int(const toml::table* t, const char* key, Int& out) {
    if (const toml::node* n = t ? t->get(key) : nullptr) {
      const auto* i = n->as_integer();
      if (!i) fail(*n, std::string("'") + key + "' must be an integer");
      if (i->get() < 0) fail(*n, std::string("'") + key + "' must be non-negative");
      out = static_cast<Int>(i->get());
    }
  }
  void get(const toml::table* t, const char* key, bool& out) {
    if (const toml::node* n = t ? t->get(key) : nullptr) {
      const auto* b = n->as_boolean();
      if (!b) fail(*n, std::string("'") + key + "' must be true or false");
      out = b->get();
    }
  }
  void get(const toml::table* t, const char* key, std::string& out) {
    if (const toml::node* n = t ? t->get(key) : nullptr) {
      const auto* s = n->as_string();
      if (!s) fail(*n, std::string("'") + key + "' must be a string");
      out = s->get();
    }
  }
  void get_path(const toml::table* t, const char* key, fs::path& out, const fs::path& base) {
    std::string s;
    get(t, key, s);
    if (s.empty()) return;
    const fs::path p(s);
    out = p.is_absolute() || base.empty() ? p : base / p;
  }
  void get_labels(const toml::table* t, const char* key, std::vector<Label>& out) {
    if (const toml::node* n = t ? t->get(key) : nullptr) {
      const auto* arr = n->as_array();
      if (!arr) fail(*n, std::string("'") + key + "' must be an array of label names");
      out.clear();
      for (const auto& item : *arr) {
        const auto* s = item.as_string();
        if (!s) fail(item, "label names must be strings");
        try {
          out.push_back(parse_label(s->get()));
        } catch (const InvalidParameter& e) {
          fail(item, e.what());
        }
      }
    }
  }

  [[noreturn]] void fail(const toml::node& n, const std::string& why) const {
    const auto& src = n.source();
    throw ParseError(source_, offset_of(text_, src.begin.line, src.begin.column), why);
  }

 private:
  const toml::table& root_;
  std::string_view text_;
  std::string source_;
};

}  // namespace

PipelineConfig parse_config(std::string_view toml_text, const fs::path& base_dir, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    throw ParseError(source, offset_of(toml_text, e.source().begin.line, e.source().begin.column),
                     std::string(e.description()));
  }
  Reader rd(root, toml_text, source);
  rd.check_tables({"input", "output", "register", "mask", "skeleton", "vigor", "run"});

  PipelineConfig c;
  if (const auto* t = rd.table("input", {"cloud", "frames", "cams", "masks", "vine_id", "pole_distance", "pruning_weight"})) {
    rd.get_path(t, "cloud", c.cloud, base_dir);
    rd.get_path(t, "frames", c.frames, base_dir);
    rd.get_path(t, "cams", c.cams, base_dir);
    rd.get_path(t, "masks", c.masks, base_dir);
    rd.get(t, "vine_id", c.vine_id);
    rd.get(t, "pole_distance", c.pole_distance);
    rd.get(t, "pruning_weight", c.pruning_weight);
  }
  if (const auto* t = rd.table("output", {"dir", "overlays"})) {
    rd.get_path(t, "dir", c.out_dir, base_dir);
    rd.get(t, "overlays", c.overlays);
  }
  if (const auto* t = rd.table("register", {"max_iters", "tol", "max_correspondence", "discard_far", "overlap_radius",
                                            "distance_margin"})) {
    rd.get_int(t, "max_iters", c.icp.max_iters);
    rd.get(t, "tol", c.icp.tol);
    rd.get(t, "max_correspondence", c.icp.max_correspondence);
    rd.get(t, "discard_far", c.discard_far);
    rd.get(t, "overlap_radius", c.overlap_radius);
    rd.get(t, "distance_margin", c.distance_margin);
  }
  if (const auto* t = rd.table("mask", {"refine", "dilation_radius"})) {
    rd.get(t, "refine", c.refine_masks);
    rd.get_int(t, "dilation_radius", c.dilation_radius);
  }
  if (const auto* t = rd.table("skeleton", {"labels", "voxel_size", "r_s", "delta_l", "delta_b", "close_cycles", "root",
                                            "min_cluster_nodes", "seg_len", "batch_limit", "fit_max_iters", "motion_tol",
                                            "gamma_p_scale", "gamma_s_scale", "r_prior"})) {
    auto& s = c.skeleton;
    rd.get_labels(t, "labels", c.skeleton_labels);
    rd.get(t, "voxel_size", s.voxel_size);
    rd.get(t, "r_s", s.graph.r_s);
    rd.get(t, "delta_l", s.graph.delta_l);
    rd.get(t, "delta_b", s.graph.delta_b);
    rd.get(t, "close_cycles", s.close_cycles);
    std::string root = root_strategy_name(s.root);
    rd.get(t, "root", root);
    s.root = parse_root_strategy(root);
    rd.get_int(t, "min_cluster_nodes", s.min_cluster_nodes);
    rd.get(t, "seg_len", s.fit.seg_len);
    rd.get_int(t, "batch_limit", s.fit.batch_limit);
    rd.get_int(t, "fit_max_iters", s.fit.max_iters);
    rd.get(t, "motion_tol", s.fit.motion_tol);
    rd.get(t, "gamma_p_scale", s.gamma_p_scale);
    rd.get(t, "gamma_s_scale", s.gamma_s_scale);
    rd.get(t, "r_prior", s.r_prior);
  }
  if (const auto* t = rd.table("vigor", {"voxel_size", "seed"})) {
    rd.get(t, "voxel_size", c.feature_voxel_size);
    rd.get_int(t, "seed", c.seed);
  }
  if (const auto* t = rd.table("run", {"threads"})) rd.get_int(t, "threads", c.threads);
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  return parse_config(read_text(path), path.parent_path(), path.string());
}

std::string default_config_toml() {
  const PipelineConfig c;
  const auto& s = c.skeleton;
  std::ostringstream o;
  o.precision(15);
  o << "# vineskel pipeline configuration. Relative paths resolve against this file.\n\n"
    << "[input]\n"
    << "cloud = \"\"           # labelled vine cloud (PLY)\n"
    << "frames = \"\"          # frame list JSON; when set, frames are registered instead of reading cloud\n"
    << "cams = \"\"            # cameras JSON\n"
    << "masks = \"\"           # directory of cane masks, one per camera in file-name order\n"
    << "vine_id = \"" << c.vine_id << "\"\n"
    << "pole_distance = " << c.pole_distance << "   # m\n"
    << "# pruning_weight = 1.0   # kg, optional ground truth copied into features.csv\n\n"
    << "[output]\n"
    << "dir = \"out\"\n"
    << "overlays = " << (c.overlays ? "true" : "false") << "\n\n"
    << "[register]\n"
    << "max_iters = " << c.icp.max_iters << "\n"
    << "tol = " << c.icp.tol << "                  # m\n"
    << "max_correspondence = " << c.icp.max_correspondence << "   # m\n"
    << "discard_far = " << (c.discard_far ? "true" : "false") << "\n"
    << "overlap_radius = " << c.overlap_radius << "       # m\n"
    << "distance_margin = " << c.distance_margin << "      # m\n\n"
    << "[mask]\n"
    << "refine = " << (c.refine_masks ? "true" : "false") << "   # score IoU against thinned-and-dilated masks\n"
    << "dilation_radius = " << c.dilation_radius << "   # px\n\n"
    << "[skeleton]\n"
    << "labels = [\"cane\", \"cordon\"]\n"
    << "voxel_size = " << s.voxel_size << "   # m\n"
    << "r_s = " << s.graph.r_s << "          # neighbourhood radius, m\n"
    << "delta_l = " << s.graph.delta_l << "      # minimum MST path between leaves to close a loop, m\n"
    << "delta_b = " << s.graph.delta_b << "      # barb length threshold, m\n"
    << "close_cycles = " << (s.close_cycles ? "true" : "false") << "\n"
    << "root = \"" << root_strategy_name(s.root) << "\"   # min-z | max-degree | index:<n>\n"
    << "min_cluster_nodes = " << s.min_cluster_nodes << "\n"
    << "seg_len = " << s.fit.seg_len << "       # target segment length, m\n"
    << "batch_limit = " << s.fit.batch_limit << "\n"
    << "fit_max_iters = " << s.fit.max_iters << "\n"
    << "motion_tol = " << s.fit.motion_tol << "   # m\n"
    << "gamma_p_scale = " << s.gamma_p_scale << "\n"
    << "gamma_s_scale = " << s.gamma_s_scale << "\n"
    << "r_prior = " << s.r_prior << "     # m\n\n"
    << "[vigor]\n"
    << "voxel_size = " << c.feature_voxel_size << "   # m\n"
    << "seed = " << c.seed << "\n\n"
    << "[run]\n"
    << "threads = " << c.threads << "\n";
  return o.str();
}

}  // namespace vineskel
