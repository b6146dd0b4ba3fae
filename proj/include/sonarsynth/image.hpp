#pragma once

#include <string>
#include <vector>

#include "sonarsynth/tensor.hpp"

namespace sonarsynth {

// Planar intensity image: data[c * H * W + y * W + x], every value in [0, 1].
// 1 channel (grayscale) or 3 channels (RGB). Immutable by convention once
// built; all pipeline stages produce new images.
class Image {
public:
  Image() = default;

  // Validates channel count, data length and the [0,1] range; throws
  // ValidationError on violation.
  static Image make(int width, int height, int channels,
                    std::vector<double> data);

  // Same checks, but clamps values into [0,1] first (for results of
  // numerical ops that may overshoot by rounding).
  static Image make_clamped(int width, int height, int channels,
                            std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  const std::vector<double>& data() const { return data_; }

  double at(int c, int y, int x) const {
    return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }

  Tensor to_tensor() const;  // {C, H, W}

private:
  int width_ = 0, height_ = 0, channels_ = 0;
  std::vector<double> data_;
};

Image tensor_to_image(const Tensor& t);  // {C,H,W}, clamps into [0,1]

// Rec.601 luma; the grayscale rule used by polarity pairs and the top-k
// intensity machinery.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

Image to_grayscale(const Image& img);  // 1ch passthrough, 3ch luma

// Axis-aligned box in pixel coordinates, x in [0, W], y in [0, H].
struct BoundingBox {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  int label = 0;
};

double box_area(const BoundingBox& b);

// --------------------------------------------------------------------------
// Dataset manifest
// --------------------------------------------------------------------------

struct ContentEntry {
  std::string path;
  std::vector<BoundingBox> boxes;
};

struct StyleSet {
  int id = 0;
  std::vector<std::string> paths;
};

struct DatasetManifest {
  std::vector<ContentEntry> content;
  std::vector<StyleSet> styles;  // sorted by id, ids contiguous 0..N-1

  int n_styles() const { return static_cast<int>(styles.size()); }
};

// --------------------------------------------------------------------------
// File I/O
// --------------------------------------------------------------------------

// 8/16-bit grayscale or RGB PNG; values mapped linearly to [0,1]
// (v/255 or v/65535). Palette images are expanded to RGB; alpha is rejected.
Image load_image(const std::string& path);

// 8-bit PNG, round-to-nearest quantization; round trip error <= 1/255.
void save_image(const Image& img, const std::string& path);

// JSON manifest:
//   {"content": [{"path": "...", "boxes": [[x0,y0,x1,y1,label], ...]}, ...],
//    "styles":  [{"id": 0, "paths": ["...", ...]}, ...]}
// Paths are resolved relative to the manifest's directory. Style ids must be
// contiguous from 0; every referenced file must exist. The "styles" key is
// optional (depth-image manifests have none). Content may be empty only when
// allow_empty_content is set (the basegen command accepts empty batches).
DatasetManifest load_manifest(const std::string& path,
                              bool allow_empty_content = false);

void save_manifest(const DatasetManifest& manifest, const std::string& path);

}  // namespace sonarsynth
