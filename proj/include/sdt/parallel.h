// Copyright 2026 The sdtag Authors.
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

#ifndef SDT_PARALLEL_H_
#define SDT_PARALLEL_H_

#include <cstddef>
#include <exception>
#include <mutex>

#include "sdt/kernels.h"

namespace sdt {

// Runs body(i) for i in [0, n) across OpenMP threads. The first exception
// thrown by any iteration is rethrown on the calling thread. Callers that
// need deterministic reductions write into per-index slots and combine them
// serially afterwards.
template <typename Body>
void ParallelFor(std::size_t n, Body&& body) {
  std::exception_ptr failure;
  std::mutex failure_mu;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) num_threads(kernels::MaxThreads()) if (n > 1)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace sdt

#endif  // SDT_PARALLEL_H_
