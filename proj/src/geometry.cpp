#include "detaudit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace detaudit {

bool BoundingBox::is_valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x1 < x2 && y1 < y2;
}

bool SimilarityParams::is_valid() const {
  return alpha >= 0.0 && alpha <= 1.0 && sigma > 0.0 && std::isfinite(sigma);
}

double intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  return w * h;
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

CornerVector corner_vector(const BoundingBox& b, const ImageDims& dims) {
  const double w = dims.width;
  const double h = dims.height;
  return {std::clamp(b.x1 / w, 0.0, 1.0), std::clamp(b.y1 / h, 0.0, 1.0),
          std::clamp(b.x2 / w, 0.0, 1.0), std::clamp(b.y2 / h, 0.0, 1.0)};
}

double gaussian_kernel(const BoundingBox& a, const BoundingBox& b,
                       const ImageDims& dims, double sigma) {
  const CornerVector ca = corner_vector(a, dims);
  const CornerVector cb = corner_vector(b, dims);
  double sq = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double d = ca[i] - cb[i];
    sq += d * d;
  }
  return std::exp(-std::sqrt(sq) / sigma);
}

double similarity(const BoundingBox& a, const BoundingBox& b,
                  const ImageDims& dims, const SimilarityParams& params) {
  const double k = gaussian_kernel(a, b, dims, params.sigma);
  const double overlap = iou(a, b);
  // Written as a correction to the IoU so that k == IoU == 1 yields exactly 1.
  return overlap + params.alpha * (k - overlap);
}

BoundingBox clip_to_image(const BoundingBox& b, const ImageDims& dims) {
  const double w = dims.width;
  const double h = dims.height;
  return {std::clamp(b.x1, 0.0, w), std::clamp(b.y1, 0.0, h),
          std::clamp(b.x2, 0.0, w), std::clamp(b.y2, 0.0, h)};
}

bool inside_image(const BoundingBox& b, const ImageDims& dims) {
  return b.x1 >= 0.0 && b.y1 >= 0.0 && b.x2 <= dims.width &&
         b.y2 <= dims.height;
}

}  // namespace detaudit
