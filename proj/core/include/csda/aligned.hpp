#pragma once

#include <cstddef>
#include <cstdlib>
#include <new>
#include <vector>

namespace csda {

// 64-byte-aligned allocator. Buffers handed to the vectorized numeric
// kernels must have a fixed alignment: SIMD peeling decisions depend on the
// address, and a heap-history-dependent address would make reduction
// orderings (and so low-order result bits) vary between otherwise identical
// runs.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t kAlignment = 64;

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    const std::size_t bytes = (n * sizeof(T) + kAlignment - 1) / kAlignment *
                              kAlignment;
    void* p = std::aligned_alloc(kAlignment, bytes);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const {
    return true;
  }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

}  // namespace csda
