#pragma once

#include <cstddef>
#include <functional>

namespace gpsobolev {

/// Number of worker threads used by parallel loops (>= 1). Results of every
/// parallel loop in this library are independent of this value.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(i) for i in [begin, end) over contiguous static chunks. Each
/// index must write only its own outputs.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace gpsobolev
