#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace solmz {

// 64-byte aligned storage so every buffer can be handed to the same FFTW
// plan through the new-array execute interface.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), alignment));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept {
        return true;
    }
};

using cplx = std::complex<double>;
using CVec = std::vector<cplx, AlignedAllocator<cplx>>;

// Unnormalised in-place complex DFT of a fixed length. Plans are cached per
// length and shared; execution is thread-safe.
class Fft {
public:
    explicit Fft(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    void forward(CVec& data) const;
    void backward(CVec& data) const;

private:
    std::size_t n_;
    void* forward_plan_;
    void* backward_plan_;
};

} // namespace solmz
