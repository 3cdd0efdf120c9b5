// Copyright 2026 The fdmcar Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Static SVG renderings of bands and power curves.

#ifndef FDMCAR_SVG_HPP_
#define FDMCAR_SVG_HPP_

#include <span>
#include <string>

#include "fdmcar/mcar_tests.hpp"
#include "fdmcar/simulation.hpp"

namespace fdmcar {

// Difference curve, constant-width band polygon and the zero line.
std::string band_svg(const ConfidenceBand& band);

// Rejection rate against b, one polyline per method x calibration, with a
// dashed line at alpha.
std::string power_svg(std::span<const RejectionTable> curves);

}  // namespace fdmcar

#endif  // FDMCAR_SVG_HPP_
