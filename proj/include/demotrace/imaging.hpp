#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "demotrace/error.hpp"

namespace demotrace {

// Dense row-major raster.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 0 || height < 0) throw Error(ErrorCode::kInvalidArgument, "negative image size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Image& o) const { return width_ == o.width_ && height_ == o.height_; }
  template <typename U>
  bool same_shape(const Image<U>& o) const {
    return width_ == o.width() && height_ == o.height();
  }

  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width_ && v < height_; }

  T& operator()(int u, int v) { return data_[index(u, v)]; }
  const T& operator()(int u, int v) const { return data_[index(u, v)]; }

  T* row(int v) { return data_.data() + static_cast<std::size_t>(v) * width_; }
  const T* row(int v) const { return data_.data() + static_cast<std::size_t>(v) * width_; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int u, int v) const { return static_cast<std::size_t>(v) * width_ + u; }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Metric depth; invalid pixels are NaN.
using DepthImage = Image<float>;
// Binary mask; 0 = unset, 1 = set.
using MaskImage = Image<std::uint8_t>;

struct Flow {
  float du = 0.0f;
  float dv = 0.0f;
  bool operator==(const Flow&) const = default;
};
using FlowField = Image<Flow>;

inline constexpr float kInvalidDepth = std::numeric_limits<float>::quiet_NaN();

inline bool is_valid_depth(float d) { return d > 0.0f && d < std::numeric_limits<float>::infinity(); }

// Inclusive pixel bounds.
struct BBox {
  int u_min = 0;
  int v_min = 0;
  int u_max = 0;
  int v_max = 0;

  int width() const { return u_max - u_min + 1; }
  int height() const { return v_max - v_min + 1; }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool contains(const BBox& o) const {
    return o.u_min >= u_min && o.v_min >= v_min && o.u_max <= u_max && o.v_max <= v_max;
  }

  bool operator==(const BBox&) const = default;
};

double bbox_iou(const BBox& a, const BBox& b);

// Grows the box by `margin` pixels on every side, clamped to the image.
BBox expand_bbox(const BBox& b, int margin, int width, int height);

std::size_t popcount(const MaskImage& m);

// Set iff sqrt(du² + dv²) >= tau_f.
MaskImage flow_magnitude_mask(const FlowField& flow, double tau_f);

MaskImage mask_subtract(const MaskImage& a, const MaskImage& b);
MaskImage mask_union(const MaskImage& a, const MaskImage& b);
MaskImage mask_intersect(const MaskImage& a, const MaskImage& b);

// Square structuring element of side 2k+1. The window is clipped at the
// image border (out-of-image pixels are ignored), which keeps erosion and
// dilation adjoint and the opening idempotent.
MaskImage erode(const MaskImage& m, int k);
MaskImage dilate(const MaskImage& m, int k);
MaskImage morphological_open(const MaskImage& m, int k);

struct Component {
  std::int32_t label = 0;  // value in ComponentSet::labels
  std::size_t area = 0;
  BBox bbox;
};

struct ComponentSet {
  // 0 = background, otherwise 1-based label of the owning component.
  Image<std::int32_t> labels;
  // Area descending; ties by (v_min, u_min) of the bbox, then by label.
  std::vector<Component> components;

  MaskImage mask(std::size_t i) const;
};

// 8-connected components.
ComponentSet connected_components(const MaskImage& m);

std::optional<BBox> tight_bbox(const MaskImage& m);

}  // namespace demotrace
