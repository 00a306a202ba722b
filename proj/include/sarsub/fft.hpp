#pragma once

#include <span>

#include "sarsub/raster.hpp"

namespace sarsub {

// 1-D complex FFT of fixed length. Forward is unscaled, inverse scales by 1/n.
// Plans are created under a global lock; execute() may be called concurrently
// from any number of threads with distinct buffers.
class Fft1d {
public:
    explicit Fft1d(int n);
    ~Fft1d();
    Fft1d(const Fft1d&) = delete;
    Fft1d& operator=(const Fft1d&) = delete;
    Fft1d(Fft1d&& other) noexcept;
    Fft1d& operator=(Fft1d&& other) noexcept;

    int size() const { return n_; }
    void forward(std::span<const cdouble> in, std::span<cdouble> out) const;
    void inverse(std::span<const cdouble> in, std::span<cdouble> out) const;

private:
    int n_ = 0;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
};

}  // namespace sarsub
