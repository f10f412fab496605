// Copyright 2026 The maskpipe Authors.
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

#include "maskpipe/geometry.hpp"

namespace maskpipe {

/// Stage-1 output: a face box and its score in [0, 1].
struct Detection {
  BoundingBox box;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Stage-2 output. confidence is the probability of the returned label.
struct Classification {
  MaskLabel label = MaskLabel::NoMask;
  double confidence = 0.0;

  friend bool operator==(const Classification&, const Classification&) = default;
};

struct ClassifiedDetection {
  Detection detection;
  Classification classification;
};

}  // namespace maskpipe
