#pragma once

#include "omi/errors.hpp"

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace omi {

// Uniformly sampled time series: sample i sits at t0 + i * dt.
template <class T>
class Trace {
  public:
    Trace(double t0, double dt, std::vector<T> samples)
        : t0_(t0), dt_(dt), samples_(std::move(samples)) {
        if (!(dt_ > 0.0)) throw DomainError("trace: sample interval must be > 0");
        if (samples_.size() < 2) throw DomainError("trace: needs at least 2 samples");
    }

    double t0() const noexcept { return t0_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }
    double t_end() const noexcept { return time(samples_.size() - 1); }

    const T& operator[](std::size_t i) const noexcept { return samples_[i]; }
    T& operator[](std::size_t i) noexcept { return samples_[i]; }
    const std::vector<T>& samples() const noexcept { return samples_; }
    std::vector<T>& samples() noexcept { return samples_; }

    // Same time axis, new values.
    template <class U>
    Trace<U> with_samples(std::vector<U> values) const {
        return Trace<U>(t0_, dt_, std::move(values));
    }

  private:
    double t0_;
    double dt_;
    std::vector<T> samples_;
};

using ComplexTrace = Trace<std::complex<double>>;
using RealTrace = Trace<double>;

}  // namespace omi
