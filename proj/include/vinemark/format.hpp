// Copyright 2026 The Vinemark Authors.
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
#ifndef VINEMARK_FORMAT_HPP
#define VINEMARK_FORMAT_HPP

#include <string>

namespace vinemark {

/// Shortest decimal text that reads back to the same double ("0.886").
std::string shortest(double value);

/// Fixed-point text with `decimals` digits after the point.
std::string fixed(double value, int decimals);

}  // namespace vinemark

#endif  // VINEMARK_FORMAT_HPP
