// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace pellipt {

/// Worker count: hardware concurrency, capped by PELLIPT_THREADS when set.
int worker_count();

/// Runs body(begin, end, chunk) over contiguous chunks of [0, n). Chunk
/// boundaries depend only on n and the worker count, and `chunk` indexes them
/// in order, so callers can reduce per-chunk results deterministically.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body,
                     std::size_t min_chunk = 64);

/// Number of chunks parallel_chunks will use for n items.
std::size_t chunk_count(std::size_t n, std::size_t min_chunk = 64);

/// body(i) for every i in [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t min_chunk = 64);

}  // namespace pellipt
