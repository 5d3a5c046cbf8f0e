#pragma once

#include <vector>

#include "dlab/clifford.hpp"

namespace dlab {

/// Thin FFTW wrapper for in-place c2c transforms of multicomponent fields.
/// `dims` are the transform lengths (slowest first), `howmany` independent
/// transforms interleaved with the given stride/dist layout.  Plan creation is
/// serialized behind a mutex; execution on distinct buffers is thread-safe.
/// No normalization is applied in either direction.
class FftPlan {
public:
    FftPlan(std::vector<int> dims, int howmany, int stride, int dist, int sign);
    ~FftPlan();

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    void execute(Complex* data) const;

private:
    void* plan_ = nullptr;          // fftw_plan
    std::vector<Complex> scratch_;  // planning buffer, reused via new-array exec
};

/// Unnormalized forward (-1) transform convention: out_m = sum_j in_j e^{-2pi i m j / n}.
inline constexpr int kFftForward = -1;
inline constexpr int kFftBackward = +1;

}  // namespace dlab
