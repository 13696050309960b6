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

#ifndef IRREG_GEOMETRY_HPP_
#define IRREG_GEOMETRY_HPP_

#include "irreg/dataset.hpp"

namespace irreg {

// Spatial relation of a proposal to the maximum-scored proposal of its image.
struct ProposalRepr {
  double iou_to_max = 1;
  // Center distance divided by the image diagonal, so it lies in [0, 1].
  double center_dist = 0;

  friend bool operator==(const ProposalRepr&, const ProposalRepr&) = default;
};

double Area(const BoundingBox& box);
double IntersectionArea(const BoundingBox& a, const BoundingBox& b);
double UnionArea(const BoundingBox& a, const BoundingBox& b);

// Intersection over union; 0 for disjoint boxes.
double Iou(const BoundingBox& a, const BoundingBox& b);

// 2 S(a & b) / (S(a & b) + S(a | b)). This is the chi-square kernel on the
// boxes' indicator functions, hence positive semi-definite, and equals
// 2u / (1 + u) with u = Iou(a, b).
double Chi2Overlap(const BoundingBox& a, const BoundingBox& b);

ProposalRepr MakeProposalRepr(const BoundingBox& box,
                              const BoundingBox& max_box, double width,
                              double height);

}  // namespace irreg

#endif  // IRREG_GEOMETRY_HPP_
