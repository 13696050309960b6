/*
 * Copyright 2026 The irreg Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "irreg/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace irreg {

double Area(const BoundingBox& box) {
  return (box.x2 - box.x1) * (box.y2 - box.y1);
}

double IntersectionArea(const BoundingBox& a, const BoundingBox& b) {
  const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (w <= 0 || h <= 0) return 0;
  return w * h;
}

double UnionArea(const BoundingBox& a, const BoundingBox& b) {
  return Area(a) + Area(b) - IntersectionArea(a, b);
}

double Iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = IntersectionArea(a, b);
  if (inter == 0) return 0;
  return inter / (Area(a) + Area(b) - inter);
}

double Chi2Overlap(const BoundingBox& a, const BoundingBox& b) {
  const double inter = IntersectionArea(a, b);
  if (inter == 0) return 0;
  const double uni = Area(a) + Area(b) - inter;
  return 2 * inter / (inter + uni);
}

ProposalRepr MakeProposalRepr(const BoundingBox& box,
                              const BoundingBox& max_box, double width,
                              double height) {
  const double dx = 0.5 * ((box.x1 + box.x2) - (max_box.x1 + max_box.x2));
  const double dy = 0.5 * ((box.y1 + box.y2) - (max_box.y1 + max_box.y2));
  return {Iou(box, max_box),
          std::hypot(dx, dy) / std::hypot(width, height)};
}

}  // namespace irreg
