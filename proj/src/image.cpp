#include "sonarsynth/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "sonarsynth/errors.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace sonarsynth {

namespace {

void validate_dims(int width, int height, int channels, std::size_t n) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("Image: non-positive dimensions");
  }
  if (channels != 1 && channels != 3) {
    throw ValidationError("Image: channels must be 1 or 3, got " +
                          std::to_string(channels));
  }
  const std::size_t want =
      static_cast<std::size_t>(width) * height * channels;
  if (n != want) {
    throw ValidationError("Image: data length " + std::to_string(n) +
                          " does not match dims (want " + std::to_string(want) +
                          ")");
  }
}

}  // namespace

Image Image::make(int width, int height, int channels,
                  std::vector<double> data) {
  validate_dims(width, height, channels, data.size());
  for (double v : data) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("Image: value out of [0,1]: " + std::to_string(v));
    }
  }
  Image img;
  img.width_ = width;
  img.height_ = height;
  img.channels_ = channels;
  img.data_ = std::move(data);
  return img;
}

Image Image::make_clamped(int width, int height, int channels,
                          std::vector<double> data) {
  validate_dims(width, height, channels, data.size());
  for (double& v : data) {
    if (std::isnan(v)) throw ValidationError("Image: NaN value");
    v = std::clamp(v, 0.0, 1.0);
  }
  Image img;
  img.width_ = width;
  img.height_ = height;
  img.channels_ = channels;
  img.data_ = std::move(data);
  return img;
}

Tensor Image::to_tensor() const {
  Tensor t({channels_, height_, width_});
  std::copy(data_.begin(), data_.end(), t.data());
  return t;
}

Image tensor_to_image(const Tensor& t) {
  if (t.ndim() != 3) throw ValidationError("tensor_to_image: want 3-D tensor");
  std::vector<double> data(t.data(), t.data() + t.numel());
  return Image::make_clamped(t.dim(2), t.dim(1), t.dim(0), std::move(data));
}

Image to_grayscale(const Image& img) {
  if (img.channels() == 1) return img;
  const int w = img.width(), h = img.height();
  std::vector<double> gray(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      gray[static_cast<std::size_t>(y) * w + x] = kLumaR * img.at(0, y, x) +
                                                  kLumaG * img.at(1, y, x) +
                                                  kLumaB * img.at(2, y, x);
    }
  }
  return Image::make_clamped(w, h, 1, std::move(gray));
}

double box_area(const BoundingBox& b) {
  return std::max(0.0, b.x_max - b.x_min) * std::max(0.0, b.y_max - b.y_min);
}

// --------------------------------------------------------------------------
// PNG
// --------------------------------------------------------------------------

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

Image load_image(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("load_image: cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("load_image: png init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("load_image: png init failed");
  }

  std::vector<png_bytep> row_ptrs;
  std::vector<png_byte> raw;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("load_image: not a valid PNG: " + path);
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);

  if (color_type & PNG_COLOR_MASK_ALPHA) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("load_image: unsupported format (alpha channel): " + path);
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    png_set_palette_to_rgb(png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (bit_depth == 16) {
    png_set_swap(png);  // PNG is big-endian; we read native uint16
  }
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  const int depth = png_get_bit_depth(png, info);

  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("load_image: unsupported channel count " +
                  std::to_string(channels) + ": " + path);
  }
  if (depth != 8 && depth != 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("load_image: unsupported bit depth " + std::to_string(depth) +
                  ": " + path);
  }

  const std::size_t stride = png_get_rowbytes(png, info);
  raw.resize(stride * height);
  row_ptrs.resize(height);
  for (int y = 0; y < height; ++y) row_ptrs[y] = raw.data() + stride * y;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  // interleaved rows -> planar [0,1]
  std::vector<double> data(static_cast<std::size_t>(width) * height * channels);
  const std::size_t plane = static_cast<std::size_t>(width) * height;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < channels; ++c) {
        double v;
        if (depth == 8) {
          v = raw[stride * y + static_cast<std::size_t>(x) * channels + c] /
              255.0;
        } else {
          const auto* row16 = reinterpret_cast<const std::uint16_t*>(
              raw.data() + stride * y);
          v = row16[static_cast<std::size_t>(x) * channels + c] / 65535.0;
        }
        data[plane * c + static_cast<std::size_t>(y) * width + x] = v;
      }
    }
  }
  return Image::make(width, height, channels, std::move(data));
}

void save_image(const Image& img, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("save_image: cannot open " + path + " for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("save_image: png init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("save_image: png init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("save_image: write failed: " + path);
  }

  png_init_io(png, fp.get());
  png_set_compression_level(png, 6);  // fixed settings keep output bytes stable

  const int w = img.width(), h = img.height(), ch = img.channels();
  png_set_IHDR(png, info, w, h, 8,
               ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<png_byte> row(static_cast<std::size_t>(w) * ch);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < ch; ++c) {
        const long q = std::lround(img.at(c, y, x) * 255.0);
        row[static_cast<std::size_t>(x) * ch + c] =
            static_cast<png_byte>(std::clamp(q, 0L, 255L));
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// --------------------------------------------------------------------------
// Manifest
// --------------------------------------------------------------------------

namespace {

BoundingBox parse_box(const nlohmann::json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 5) {
    throw ValidationError("manifest: malformed box record in " + ctx +
                          " (want [x_min,y_min,x_max,y_max,label])");
  }
  BoundingBox b;
  b.x_min = j[0].get<double>();
  b.y_min = j[1].get<double>();
  b.x_max = j[2].get<double>();
  b.y_max = j[3].get<double>();
  b.label = j[4].get<int>();
  if (!(b.x_min < b.x_max) || !(b.y_min < b.y_max)) {
    throw ValidationError("manifest: degenerate box in " + ctx);
  }
  return b;
}

std::string resolve_path(const fs::path& base, const std::string& p) {
  fs::path q(p);
  if (q.is_absolute()) return q.lexically_normal().string();
  return (base / q).lexically_normal().string();
}

void require_exists(const std::string& p) {
  if (!fs::exists(p)) throw ValidationError("manifest: dangling path: " + p);
}

}  // namespace

DatasetManifest load_manifest(const std::string& path,
                              bool allow_empty_content) {
  std::ifstream in(path);
  if (!in) throw IoError("load_manifest: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("load_manifest: invalid JSON in " + path + ": " +
                          e.what());
  }
  const fs::path base = fs::path(path).parent_path();

  DatasetManifest m;
  if (!j.is_object() || !j.contains("content") || !j["content"].is_array()) {
    throw ValidationError("load_manifest: missing \"content\" array in " +
                          path);
  }
  for (const auto& je : j["content"]) {
    if (!je.is_object() || !je.contains("path")) {
      throw ValidationError("load_manifest: malformed content record in " +
                            path);
    }
    ContentEntry e;
    e.path = resolve_path(base, je["path"].get<std::string>());
    require_exists(e.path);
    if (je.contains("boxes")) {
      for (const auto& jb : je["boxes"]) e.boxes.push_back(parse_box(jb, e.path));
    }
    m.content.push_back(std::move(e));
  }
  if (m.content.empty() && !allow_empty_content) {
    throw ValidationError("load_manifest: no content entries in " + path);
  }

  if (j.contains("styles")) {
    for (const auto& js : j["styles"]) {
      if (!js.is_object() || !js.contains("id") || !js.contains("paths")) {
        throw ValidationError("load_manifest: malformed style record in " +
                              path);
      }
      StyleSet s;
      s.id = js["id"].get<int>();
      for (const auto& jp : js["paths"]) {
        std::string p = resolve_path(base, jp.get<std::string>());
        require_exists(p);
        s.paths.push_back(std::move(p));
      }
      if (s.paths.empty()) {
        throw ValidationError("load_manifest: style set " +
                              std::to_string(s.id) + " has no images");
      }
      m.styles.push_back(std::move(s));
    }
    std::sort(m.styles.begin(), m.styles.end(),
              [](const StyleSet& a, const StyleSet& b) { return a.id < b.id; });
    for (int i = 0; i < static_cast<int>(m.styles.size()); ++i) {
      if (m.styles[i].id != i) {
        throw ValidationError("load_manifest: non-contiguous style ids in " +
                              path);
      }
    }
  }
  return m;
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
  ordered_json j;
  j["content"] = ordered_json::array();
  for (const auto& e : manifest.content) {
    ordered_json je;
    je["path"] = e.path;
    je["boxes"] = ordered_json::array();
    for (const auto& b : e.boxes) {
      je["boxes"].push_back({b.x_min, b.y_min, b.x_max, b.y_max, b.label});
    }
    j["content"].push_back(std::move(je));
  }
  if (!manifest.styles.empty()) {
    j["styles"] = ordered_json::array();
    for (const auto& s : manifest.styles) {
      ordered_json js;
      js["id"] = s.id;
      js["paths"] = s.paths;
      j["styles"].push_back(std::move(js));
    }
  }
  std::ofstream out(path);
  if (!out) throw IoError("save_manifest: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("save_manifest: write failed: " + path);
}

}  // namespace sonarsynth
