#include "sarsub/fft.hpp"

#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

#include "sarsub/error.hpp"

namespace sarsub {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

Fft1d::Fft1d(int n) : n_(n) {
    require(n > 0, "FFT length must be positive");
    std::vector<cdouble> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    std::lock_guard lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_plan_ = fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_FORWARD, flags);
    inverse_plan_ = fftw_plan_dft_1d(n, as_fftw(a.data()), as_fftw(b.data()), FFTW_BACKWARD, flags);
    if (!forward_plan_ || !inverse_plan_) fail(ErrorKind::numeric, "FFTW planning failed");
}

Fft1d::~Fft1d() {
    if (!forward_plan_ && !inverse_plan_) return;
    std::lock_guard lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

Fft1d::Fft1d(Fft1d&& other) noexcept
    : n_(other.n_),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      inverse_plan_(std::exchange(other.inverse_plan_, nullptr)) {}

Fft1d& Fft1d::operator=(Fft1d&& other) noexcept {
    if (this != &other) {
        std::swap(n_, other.n_);
        std::swap(forward_plan_, other.forward_plan_);
        std::swap(inverse_plan_, other.inverse_plan_);
    }
    return *this;
}

void Fft1d::forward(std::span<const cdouble> in, std::span<cdouble> out) const {
    require(int(in.size()) == n_ && int(out.size()) == n_, "FFT buffer length mismatch");
    // FFTW's new-array execute does not modify the input for out-of-place complex transforms.
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(const_cast<cdouble*>(in.data())),
                     as_fftw(out.data()));
}

void Fft1d::inverse(std::span<const cdouble> in, std::span<cdouble> out) const {
    require(int(in.size()) == n_ && int(out.size()) == n_, "FFT buffer length mismatch");
    fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), as_fftw(const_cast<cdouble*>(in.data())),
                     as_fftw(out.data()));
    const double scale = 1.0 / double(n_);
    for (auto& v : out) v *= scale;
}

}  // namespace sarsub
