#pragma once

#include <cstdlib>
#include <new>
#include <stdexcept>
#include <string>

namespace hopss {

/// 64-byte-aligned allocator so field and spectrum storage satisfies the
/// strictest SIMD alignment the FFT kernels dispatch on.
template <typename T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() = default;
    template <typename U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), alignment));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <typename U>
    bool operator==(const AlignedAllocator<U>&) const noexcept {
        return true;
    }
};

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument or precondition violation.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(what) {}
};

/// A time step produced a non-finite value or exceeded the magnitude cap.
/// `step` is the failing step index when known (-1 from a bare single step).
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, long step_index = -1)
        : Error(what), step(step_index) {}
    long step;
};

/// Malformed or truncated dataset file.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(what) {}
};

/// File system failure while reading or writing a dataset.
class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(what) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

} // namespace hopss
