// Copyright 2026 The ballfield Authors
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

#include <cmath>
#include <sstream>

#include "ballfield/error.hpp"

namespace ballfield {

/// Rejects H <= 0, n < 1 and the excluded case 2H = n.
inline void require_admissible(int n, double H) {
  if (n < 1) throw DomainError("sphere dimension n must be >= 1");
  if (!(H > 0.0) || !std::isfinite(H)) throw DomainError("H must be a finite positive number");
  if (std::abs(2.0 * H - n) < 1e-12) {
    std::ostringstream msg;
    msg << "invalid (n, H) = (" << n << ", " << H << "): the model requires 2H != n";
    throw DomainError(msg.str());
  }
}

/// True in the regime 2H > n (kernel built from psi - sigma(S^n)).
inline bool above_critical(int n, double H) { return 2.0 * H > n; }

}  // namespace ballfield
