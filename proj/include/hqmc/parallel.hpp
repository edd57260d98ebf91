// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace hqmc {

/// Environment variable consulted for the default worker count.
inline constexpr const char* kThreadsEnvVar = "HQMC_THREADS";

/// HQMC_THREADS when set to a positive integer, else 1.
int default_thread_count();

/// Runs body(begin, end) over a fixed partition of [0, n). The partition does
/// not depend on `threads`; callers write results into disjoint slots and
/// reduce sequentially, so outputs are bit-identical for any thread count.
/// The first exception thrown by any chunk is rethrown.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t begin, std::size_t end)>& body);

}  // namespace hqmc
