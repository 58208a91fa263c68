#pragma once

#include <compare>
#include <string_view>

namespace detcal {

/// Axis-aligned rectangle in pixel coordinates: (x, y) is the top-left corner.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }

  /// Finite coordinates with strictly positive width and height.
  bool valid() const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
  friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;
};

/// Throws DomainError naming `what` when the box is not valid().
void require_valid(const BoundingBox& box, std::string_view what = "box");

/// Intersection over union. Rejects invalid boxes. Disjoint or merely touching
/// boxes give exactly 0.0.
double iou(const BoundingBox& a, const BoundingBox& b);

/// iou() without validation, for kernels whose inputs were validated upstream.
double iou_unchecked(const BoundingBox& a, const BoundingBox& b) noexcept;

}  // namespace detcal
