// Copyright 2026 The STT Tracking Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "stt/core/types.hpp"

#include <array>
#include <vector>

namespace stt {

/// Corners of the box footprint in the XY plane, counter-clockwise.
std::array<Eigen::Vector2d, 4> footprint(const Box7& box);

/// Area of a simple polygon given in order (shoelace formula), unsigned.
double polygon_area(const std::vector<Eigen::Vector2d>& polygon);

/// Intersection of two convex polygons, both counter-clockwise.
std::vector<Eigen::Vector2d> clip_convex(const std::vector<Eigen::Vector2d>& subject,
                                         const std::vector<Eigen::Vector2d>& clip);

/// Bird's-eye-view IoU of the heading-rotated footprints. Z is ignored.
double bev_iou(const Box7& a, const Box7& b);

/// Constant-acceleration propagation over dt >= 0 seconds.
StateVector extrapolate(const StateVector& state, double dt);

/// XY distance between a predicted position and a box center.
double center_distance(const StateVector& predicted, const Box7& box);

}  // namespace stt
