#include "detcal/box.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "detcal/error.hpp"

namespace detcal {

bool BoundingBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

void require_valid(const BoundingBox& box, std::string_view what) {
  if (box.valid()) return;
  std::ostringstream msg;
  msg.precision(17);
  msg << what << " is not a valid box (x=" << box.x << ", y=" << box.y
      << ", w=" << box.w << ", h=" << box.h << "); need finite values, w>0, h>0";
  throw DomainError(msg.str());
}

double iou_unchecked(const BoundingBox& a, const BoundingBox& b) noexcept {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  if (iw <= 0.0) return 0.0;
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  // Areas from the same corner arithmetic as the intersection, so iou(a, a)
  // is exactly 1.
  const double area_a = (a.right() - a.x) * (a.bottom() - a.y);
  const double area_b = (b.right() - b.x) * (b.bottom() - b.y);
  const double uni = area_a + area_b - inter;
  return std::min(1.0, inter / uni);
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  require_valid(a, "first box");
  require_valid(b, "second box");
  return iou_unchecked(a, b);
}

}  // namespace detcal
