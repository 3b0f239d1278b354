// Copyright 2026 The dptlab Authors
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

#include <complex>
#include <cstddef>
#include <cstdlib>
#include <sstream>
#include <string>

#include "dptlab/errors.hpp"
#include "dptlab/types.hpp"

namespace dptlab {

inline constexpr std::size_t kDefaultMemoryBudgetMb = 4096;

/// Cap on a single dense allocation, from DPTLAB_MEM_MB (MiB) when set.
inline std::size_t memory_budget_bytes() {
  std::size_t mb = kDefaultMemoryBudgetMb;
  if (const char* env = std::getenv("DPTLAB_MEM_MB"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(env, &end, 10);
    if (end != env && parsed > 0) mb = static_cast<std::size_t>(parsed);
  }
  return mb * std::size_t(1024) * std::size_t(1024);
}

/// Throws MemoryBoundExceeded when a complex rows x cols allocation exceeds the budget.
inline void require_dense_allocation(Index rows, Index cols, const std::string& what, const std::string& hint = {}) {
  const long double bytes = static_cast<long double>(rows) * static_cast<long double>(cols) *
                            static_cast<long double>(sizeof(std::complex<double>));
  const std::size_t budget = memory_budget_bytes();
  if (bytes > static_cast<long double>(budget)) {
    std::ostringstream os;
    os << what << " needs " << static_cast<double>(bytes / (1024.0L * 1024.0L)) << " MiB, above the "
       << budget / (1024 * 1024) << " MiB bound (DPTLAB_MEM_MB)";
    if (!hint.empty()) os << "; " << hint;
    throw MemoryBoundExceeded(os.str());
  }
}

}  // namespace dptlab
