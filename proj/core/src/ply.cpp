// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/ply.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "roadex/errors.hpp"

namespace roadex {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary PLY I/O assumes a little-endian host");
static_assert(sizeof(Point3) == 12, "Point3 must be three packed floats");

enum class ScalarType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<ScalarType> scalar_type(std::string_view name) {
  if (name == "char" || name == "int8") return ScalarType::i8;
  if (name == "uchar" || name == "uint8") return ScalarType::u8;
  if (name == "short" || name == "int16") return ScalarType::i16;
  if (name == "ushort" || name == "uint16") return ScalarType::u16;
  if (name == "int" || name == "int32") return ScalarType::i32;
  if (name == "uint" || name == "uint32") return ScalarType::u32;
  if (name == "float" || name == "float32") return ScalarType::f32;
  if (name == "double" || name == "float64") return ScalarType::f64;
  return std::nullopt;
}

std::size_t type_size(ScalarType t) {
  switch (t) {
    case ScalarType::i8:
    case ScalarType::u8:
      return 1;
    case ScalarType::i16:
    case ScalarType::u16:
      return 2;
    case ScalarType::i32:
    case ScalarType::u32:
    case ScalarType::f32:
      return 4;
    case ScalarType::f64:
      return 8;
  }
  return 0;
}

template <typename T>
T load(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

double load_scalar(ScalarType t, const char* p) {
  switch (t) {
    case ScalarType::i8: return load<std::int8_t>(p);
    case ScalarType::u8: return load<std::uint8_t>(p);
    case ScalarType::i16: return load<std::int16_t>(p);
    case ScalarType::u16: return load<std::uint16_t>(p);
    case ScalarType::i32: return load<std::int32_t>(p);
    case ScalarType::u32: return load<std::uint32_t>(p);
    case ScalarType::f32: return load<float>(p);
    case ScalarType::f64: return load<double>(p);
  }
  return 0.0;
}

struct Property {
  std::string name;
  ScalarType type = ScalarType::f32;
  bool is_list = false;
  ScalarType count_type = ScalarType::u8;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> properties;
};

struct Header {
  bool binary = false;
  std::vector<Element> elements;
  std::size_t body_offset = 0;
};

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

Header parse_header(std::string_view bytes) {
  Header header;
  std::size_t pos = 0;
  bool saw_format = false;
  bool first = true;
  while (true) {
    const std::size_t line_start = pos;
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) throw ParseError(pos, "header is not terminated by end_header");
    std::string_view line = bytes.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    const auto words = split_words(line);

    if (first) {
      if (words.size() != 1 || words[0] != "ply") throw ParseError(line_start, "missing 'ply' magic");
      first = false;
      continue;
    }
    if (words.empty()) continue;
    const std::string_view kw = words[0];
    if (kw == "comment" || kw == "obj_info") continue;
    if (kw == "format") {
      if (words.size() != 3) throw ParseError(line_start, "malformed format line");
      if (words[1] == "ascii") {
        header.binary = false;
      } else if (words[1] == "binary_little_endian") {
        header.binary = true;
      } else {
        throw ParseError(line_start, "unsupported format '" + std::string(words[1]) + "'");
      }
      saw_format = true;
    } else if (kw == "element") {
      if (words.size() != 3) throw ParseError(line_start, "malformed element line");
      Element e;
      e.name = std::string(words[1]);
      std::uint64_t count = 0;
      auto [ptr, ec] = std::from_chars(words[2].data(), words[2].data() + words[2].size(), count);
      if (ec != std::errc() || ptr != words[2].data() + words[2].size()) {
        throw ParseError(line_start, "bad element count");
      }
      e.count = static_cast<std::size_t>(count);
      header.elements.push_back(std::move(e));
    } else if (kw == "property") {
      if (header.elements.empty()) throw ParseError(line_start, "property before any element");
      Property prop;
      if (words.size() == 5 && words[1] == "list") {
        auto ct = scalar_type(words[2]);
        auto it = scalar_type(words[3]);
        if (!ct || !it) throw ParseError(line_start, "unknown list property type");
        prop.is_list = true;
        prop.count_type = *ct;
        prop.type = *it;
        prop.name = std::string(words[4]);
      } else if (words.size() == 3) {
        auto t = scalar_type(words[1]);
        if (!t) throw ParseError(line_start, "unknown property type '" + std::string(words[1]) + "'");
        prop.type = *t;
        prop.name = std::string(words[2]);
      } else {
        throw ParseError(line_start, "malformed property line");
      }
      header.elements.back().properties.push_back(std::move(prop));
    } else if (kw == "end_header") {
      break;
    } else {
      throw ParseError(line_start, "unexpected header keyword '" + std::string(kw) + "'");
    }
  }
  if (!saw_format) throw ParseError(0, "missing format line");
  header.body_offset = pos;
  return header;
}

struct VertexLayout {
  int x = -1, y = -1, z = -1, intensity = -1;
};

VertexLayout vertex_layout(const Element& e, std::size_t offset) {
  VertexLayout l;
  for (std::size_t i = 0; i < e.properties.size(); ++i) {
    const Property& p = e.properties[i];
    if (p.is_list) continue;
    const int idx = static_cast<int>(i);
    if (p.name == "x") l.x = idx;
    else if (p.name == "y") l.y = idx;
    else if (p.name == "z") l.z = idx;
    else if (p.name == "intensity" || p.name == "scalar_intensity") l.intensity = idx;
  }
  if (l.x < 0 || l.y < 0 || l.z < 0) throw ParseError(offset, "vertex element lacks x, y or z");
  return l;
}

void check_finite(const Point3& p, std::size_t index) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
    throw ValidationError(index, "non-finite vertex coordinate");
  }
}

class AsciiReader {
 public:
  AsciiReader(std::string_view bytes, std::size_t pos) : bytes_(bytes), pos_(pos) {}

  // Returns false at end of data.
  bool next(double& value) {
    while (pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (pos_ >= bytes_.size()) return false;
    std::size_t end = pos_;
    while (end < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[end]))) ++end;
    const char* first = bytes_.data() + pos_;
    const char* last = bytes_.data() + end;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(pos_, "invalid number '" + std::string(bytes_.substr(pos_, end - pos_)) + "'");
    }
    pos_ = end;
    return true;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_;
};

PointCloud read_ascii_body(std::string_view bytes, const Header& header) {
  AsciiReader reader(bytes, header.body_offset);
  PointCloud cloud;
  for (const Element& e : header.elements) {
    const bool is_vertex = e.name == "vertex";
    VertexLayout layout;
    std::vector<float> intensity;
    std::vector<Point3> points;
    if (is_vertex) {
      layout = vertex_layout(e, header.body_offset);
      points.reserve(e.count);
    }
    std::vector<double> values(e.properties.size());
    for (std::size_t r = 0; r < e.count; ++r) {
      for (std::size_t pi = 0; pi < e.properties.size(); ++pi) {
        const Property& p = e.properties[pi];
        double v = 0.0;
        if (!reader.next(v)) {
          if (is_vertex) throw TruncationError(e.count, r);
          throw TruncationError(0, 0);
        }
        if (p.is_list) {
          for (std::size_t k = 0; k < static_cast<std::size_t>(v); ++k) {
            double ignored;
            if (!reader.next(ignored)) throw TruncationError(is_vertex ? e.count : 0, r);
          }
        }
        values[pi] = v;
      }
      if (is_vertex) {
        Point3 pt{static_cast<float>(values[layout.x]), static_cast<float>(values[layout.y]),
                  static_cast<float>(values[layout.z])};
        check_finite(pt, r);
        points.push_back(pt);
        if (layout.intensity >= 0) intensity.push_back(static_cast<float>(values[layout.intensity]));
      }
    }
    if (is_vertex) return PointCloud(std::move(points), std::move(intensity));
  }
  throw ParseError(0, "no vertex element");
}

PointCloud read_binary_body(std::string_view bytes, const Header& header) {
  std::size_t pos = header.body_offset;
  for (const Element& e : header.elements) {
    const bool is_vertex = e.name == "vertex";
    VertexLayout layout;
    std::vector<Point3> points;
    std::vector<float> intensity;
    if (is_vertex) {
      layout = vertex_layout(e, header.body_offset);
      points.reserve(e.count);
    }
    std::vector<double> values(e.properties.size());
    for (std::size_t r = 0; r < e.count; ++r) {
      for (std::size_t pi = 0; pi < e.properties.size(); ++pi) {
        const Property& p = e.properties[pi];
        if (p.is_list) {
          const std::size_t cs = type_size(p.count_type);
          if (pos + cs > bytes.size()) throw TruncationError(is_vertex ? e.count : 0, r);
          const auto n = static_cast<std::size_t>(load_scalar(p.count_type, bytes.data() + pos));
          pos += cs + n * type_size(p.type);
          if (pos > bytes.size()) throw TruncationError(is_vertex ? e.count : 0, r);
          continue;
        }
        const std::size_t s = type_size(p.type);
        if (pos + s > bytes.size()) throw TruncationError(is_vertex ? e.count : 0, r);
        values[pi] = load_scalar(p.type, bytes.data() + pos);
        pos += s;
      }
      if (is_vertex) {
        Point3 pt{static_cast<float>(values[layout.x]), static_cast<float>(values[layout.y]),
                  static_cast<float>(values[layout.z])};
        check_finite(pt, r);
        points.push_back(pt);
        if (layout.intensity >= 0) intensity.push_back(static_cast<float>(values[layout.intensity]));
      }
    }
    if (is_vertex) return PointCloud(std::move(points), std::move(intensity));
  }
  throw ParseError(0, "no vertex element");
}

void append_float(std::string& out, float v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

PointCloud parse_ply(std::string_view bytes) {
  const Header header = parse_header(bytes);
  return header.binary ? read_binary_body(bytes, header) : read_ascii_body(bytes, header);
}

PointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(path, "read failed");
  return parse_ply(bytes);
}

void write_ply(const PointCloud& cloud, const std::filesystem::path& path, PlyFormat format) {
  std::string out;
  out += "ply\n";
  out += format == PlyFormat::ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property float x\nproperty float y\nproperty float z\n";
  if (cloud.has_intensity()) out += "property float intensity\n";
  out += "end_header\n";

  const auto intensity = cloud.intensity();
  if (format == PlyFormat::ascii) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point3& p = cloud[i];
      append_float(out, p.x);
      out += ' ';
      append_float(out, p.y);
      out += ' ';
      append_float(out, p.z);
      if (cloud.has_intensity()) {
        out += ' ';
        append_float(out, intensity[i]);
      }
      out += '\n';
    }
  } else {
    const std::size_t stride = cloud.has_intensity() ? 16 : 12;
    const std::size_t base = out.size();
    out.resize(base + stride * cloud.size());
    char* dst = out.data() + base;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      std::memcpy(dst, &cloud[i], 12);
      if (cloud.has_intensity()) std::memcpy(dst + 12, &intensity[i], 4);
      dst += stride;
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError(path, "cannot open for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError(path, "write failed");
}

}  // namespace roadex
