// Copyright 2026 the planecal authors
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

#include "planecal/types.hpp"

#include "planecal/errors.hpp"

namespace planecal {

std::string to_string(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::TopLeft:
      return "TopLeft";
    case EdgeLabel::TopRight:
      return "TopRight";
    case EdgeLabel::BottomRight:
      return "BottomRight";
    case EdgeLabel::BottomLeft:
      return "BottomLeft";
  }
  return "Unknown";
}

EdgeLabel edge_label_from_string(const std::string& name) {
  for (EdgeLabel label : kAllEdgeLabels) {
    if (to_string(label) == name) {
      return label;
    }
  }
  throw DataError("unknown edge label '" + name + "'");
}

}  // namespace planecal
