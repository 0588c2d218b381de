// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#include "vineskel/ply.hpp"

#include "vineskel/error.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

namespace vineskel {

namespace {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

enum class Scalar { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<Scalar> scalar_from_name(const std::string& s) {
  if (s == "char" || s == "int8") return Scalar::i8;
  if (s == "uchar" || s == "uint8") return Scalar::u8;
  if (s == "short" || s == "int16") return Scalar::i16;
  if (s == "ushort" || s == "uint16") return Scalar::u16;
  if (s == "int" || s == "int32") return Scalar::i32;
  if (s == "uint" || s == "uint32") return Scalar::u32;
  if (s == "float" || s == "float32") return Scalar::f32;
  if (s == "double" || s == "float64") return Scalar::f64;
  return std::nullopt;
}

std::size_t scalar_size(Scalar s) {
  switch (s) {
    case Scalar::i8:
    case Scalar::u8: return 1;
    case Scalar::i16:
    case Scalar::u16: return 2;
    case Scalar::i32:
    case Scalar::u32:
    case Scalar::f32: return 4;
    case Scalar::f64: return 8;
  }
  return 0;
}

struct Property {
  std::string name;
  Scalar type = Scalar::f32;
  bool is_list = false;
  Scalar count_type = Scalar::u8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

class Reader {
 public:
  Reader(const std::string& bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, pos_, what); }
  [[noreturn]] void fail_at(std::size_t at, const std::string& what) const { throw ParseError(source_, at, what); }

  std::size_t pos() const { return pos_; }

  std::string line() {
    if (pos_ >= bytes_.size()) fail("unexpected end of header");
    const auto nl = bytes_.find('\n', pos_);
    if (nl == std::string::npos) fail("unterminated header line");
    std::string out = bytes_.substr(pos_, nl - pos_);
    if (!out.empty() && out.back() == '\r') out.pop_back();
    pos_ = nl + 1;
    return out;
  }

  double binary(Scalar s) {
    const auto n = scalar_size(s);
    if (pos_ + n > bytes_.size()) fail("unexpected end of binary data");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    switch (s) {
      case Scalar::i8: return static_cast<double>(static_cast<std::int8_t>(*p));
      case Scalar::u8: return static_cast<double>(static_cast<std::uint8_t>(*p));
      case Scalar::i16: return load<std::int16_t>(p);
      case Scalar::u16: return load<std::uint16_t>(p);
      case Scalar::i32: return load<std::int32_t>(p);
      case Scalar::u32: return load<std::uint32_t>(p);
      case Scalar::f32: return load<float>(p);
      case Scalar::f64: return load<double>(p);
    }
    return 0.0;
  }

  double ascii() {
    while (pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (pos_ >= bytes_.size()) fail("unexpected end of ascii data");
    const auto start = pos_;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(bytes_.data() + start, bytes_.data() + pos_, v);
    if (ec != std::errc() || ptr != bytes_.data() + pos_) {
      fail_at(start, "malformed number '" + bytes_.substr(start, pos_ - start) + "'");
    }
    return v;
  }

 private:
  template <typename T>
  static double load(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return static_cast<double>(v);
  }

  const std::string& bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

}  // namespace

PointCloud parse_ply(const std::string& bytes, const std::string& source_name) {
  Reader in(bytes, source_name);
  if (in.line() != "ply") in.fail_at(0, "missing 'ply' magic");

  bool binary = false;
  bool have_format = false;
  std::vector<Element> elements;
  for (;;) {
    const auto at = in.pos();
    const auto toks = split_ws(in.line());
    if (toks.empty()) continue;
    if (toks[0] == "end_header") break;
    if (toks[0] == "comment" || toks[0] == "obj_info") continue;
    if (toks[0] == "format") {
      if (toks.size() < 2) in.fail_at(at, "malformed format line");
      if (toks[1] == "ascii") {
        binary = false;
      } else if (toks[1] == "binary_little_endian") {
        binary = true;
      } else {
        in.fail_at(at, "unsupported PLY format '" + toks[1] + "'");
      }
      have_format = true;
    } else if (toks[0] == "element") {
      if (toks.size() != 3) in.fail_at(at, "malformed element line");
      Element e;
      e.name = toks[1];
      std::size_t count = 0;
      const auto [p, ec] = std::from_chars(toks[2].data(), toks[2].data() + toks[2].size(), count);
      if (ec != std::errc() || p != toks[2].data() + toks[2].size()) in.fail_at(at, "malformed element count");
      e.count = count;
      elements.push_back(std::move(e));
    } else if (toks[0] == "property") {
      if (elements.empty()) in.fail_at(at, "property before any element");
      Property prop;
      if (toks.size() == 5 && toks[1] == "list") {
        const auto ct = scalar_from_name(toks[2]);
        const auto it = scalar_from_name(toks[3]);
        if (!ct || !it) in.fail_at(at, "unknown list property type");
        prop.is_list = true;
        prop.count_type = *ct;
        prop.type = *it;
        prop.name = toks[4];
      } else if (toks.size() == 3) {
        const auto t = scalar_from_name(toks[1]);
        if (!t) in.fail_at(at, "unknown property type '" + toks[1] + "'");
        prop.type = *t;
        prop.name = toks[2];
      } else {
        in.fail_at(at, "malformed property line");
      }
      elements.back().properties.push_back(std::move(prop));
    } else {
      in.fail_at(at, "unexpected header keyword '" + toks[0] + "'");
    }
  }
  if (!have_format) in.fail_at(0, "missing format line");

  PointCloud cloud;
  bool saw_vertex = false;
  for (const auto& e : elements) {
    const bool is_vertex = e.name == "vertex";
    int ix = -1, iy = -1, iz = -1, ilabel = -1, icam = -1, idist = -1;
    if (is_vertex) {
      saw_vertex = true;
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const auto& n = e.properties[k].name;
        const int ki = static_cast<int>(k);
        if (e.properties[k].is_list) continue;
        if (n == "x") ix = ki;
        else if (n == "y") iy = ki;
        else if (n == "z") iz = ki;
        else if (n == "label") ilabel = ki;
        else if (n == "camera_id") icam = ki;
        else if (n == "camera_distance") idist = ki;
      }
      if (ix < 0 || iy < 0 || iz < 0) in.fail_at(0, "vertex element lacks x/y/z");
      cloud.points.reserve(e.count);
    }
    std::vector<double> values(e.properties.size());
    for (std::size_t row = 0; row < e.count; ++row) {
      const auto row_start = in.pos();
      for (std::size_t k = 0; k < e.properties.size(); ++k) {
        const auto& prop = e.properties[k];
        if (prop.is_list) {
          const double n = binary ? in.binary(prop.count_type) : in.ascii();
          if (n < 0 || n != std::floor(n)) in.fail("invalid list length");
          for (std::size_t j = 0; j < static_cast<std::size_t>(n); ++j) {
            binary ? in.binary(prop.type) : in.ascii();
          }
          values[k] = 0.0;
        } else {
          values[k] = binary ? in.binary(prop.type) : in.ascii();
        }
      }
      if (!is_vertex) continue;
      Point p;
      p.position = {values[ix], values[iy], values[iz]};
      if (!p.position.allFinite()) in.fail_at(row_start, "non-finite vertex position");
      if (ilabel >= 0) {
        const double l = values[ilabel];
        if (l != 255.0) {
          if (l < 0 || l >= kLabelCount) in.fail_at(row_start, "label out of range");
          p.label = static_cast<Label>(static_cast<int>(l));
        }
      }
      if (icam >= 0) {
        const double c = values[icam];
        if (c != 255.0) p.camera_id = static_cast<std::uint8_t>(c);
      }
      if (idist >= 0 && values[idist] >= 0.0) p.camera_distance = values[idist];
      cloud.points.push_back(p);
    }
  }
  if (!saw_vertex) in.fail_at(0, "no vertex element");
  return cloud;
}

PointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError(path.string(), 0, "cannot open file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_ply(ss.str(), path.string());
}

std::string serialize_ply(const PointCloud& cloud, PlyFormat format) {
  bool any_label = false, any_cam = false, any_dist = false;
  for (const auto& p : cloud.points) {
    any_label |= p.label.has_value();
    any_cam |= p.camera_id.has_value();
    any_dist |= p.camera_distance.has_value();
  }

  std::ostringstream os;
  os << "ply\nformat " << (format == PlyFormat::ascii ? "ascii" : "binary_little_endian") << " 1.0\n";
  os << "element vertex " << cloud.size() << "\n";
  os << "property double x\nproperty double y\nproperty double z\n";
  if (any_label) os << "property uchar label\n";
  if (any_cam) os << "property uchar camera_id\n";
  if (any_dist) os << "property float camera_distance\n";
  os << "end_header\n";

  std::string out = os.str();
  if (format == PlyFormat::ascii) {
    std::ostringstream body;
    body.precision(17);
    for (const auto& p : cloud.points) {
      body << p.position.x() << ' ' << p.position.y() << ' ' << p.position.z();
      if (any_label) body << ' ' << (p.label ? static_cast<int>(*p.label) : 255);
      if (any_cam) body << ' ' << (p.camera_id ? static_cast<int>(*p.camera_id) : 255);
      if (any_dist) body << ' ' << static_cast<float>(p.camera_distance.value_or(-1.0));
      body << '\n';
    }
    out += body.str();
    return out;
  }

  auto put = [&out](const auto& v) {
    char buf[sizeof(v)];
    std::memcpy(buf, &v, sizeof(v));
    out.append(buf, sizeof(v));
  };
  for (const auto& p : cloud.points) {
    put(p.position.x());
    put(p.position.y());
    put(p.position.z());
    if (any_label) put(static_cast<std::uint8_t>(p.label ? static_cast<int>(*p.label) : 255));
    if (any_cam) put(static_cast<std::uint8_t>(p.camera_id.value_or(255)));
    if (any_dist) put(static_cast<float>(p.camera_distance.value_or(-1.0)));
  }
  return out;
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud, PlyFormat format) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  const auto bytes = serialize_ply(cloud, format);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace vineskel
