#pragma once

#include <array>

namespace detaudit {

/// Axis-aligned box in pixel space, (x1, y1) top-left and (x2, y2) bottom-right.
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }

  /// Finite coordinates and strictly positive area.
  bool is_valid() const;

  static BoundingBox from_xywh(double x, double y, double w, double h) {
    return {x, y, x + w, y + h};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ImageDims {
  int width = 1;
  int height = 1;

  bool is_valid() const { return width >= 1 && height >= 1; }
  friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

struct SimilarityParams {
  double alpha = 0.1;  // weight of the kernel term
  double sigma = 0.1;  // kernel bandwidth in normalized units

  bool is_valid() const;
};

using CornerVector = std::array<double, 4>;

double intersection_area(const BoundingBox& a, const BoundingBox& b);

double iou(const BoundingBox& a, const BoundingBox& b);

/// Corners normalized by image size, clamped to [0, 1].
CornerVector corner_vector(const BoundingBox& b, const ImageDims& dims);

/// exp(-||c(a) - c(b)|| / sigma) on normalized corner vectors. The exponent
/// uses the plain Euclidean norm, not its square.
double gaussian_kernel(const BoundingBox& a, const BoundingBox& b,
                       const ImageDims& dims, double sigma);

/// alpha * kernel + (1 - alpha) * IoU. Strictly positive; exactly 1 for
/// identical boxes.
double similarity(const BoundingBox& a, const BoundingBox& b,
                  const ImageDims& dims, const SimilarityParams& params);

/// Intersection with [0, W] x [0, H]. May return an invalid box when `b`
/// lies entirely outside the image.
BoundingBox clip_to_image(const BoundingBox& b, const ImageDims& dims);

bool inside_image(const BoundingBox& b, const ImageDims& dims);

}  // namespace detaudit
