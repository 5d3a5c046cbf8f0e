#include "dlab/fft.hpp"

#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace dlab {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

FftPlan::FftPlan(std::vector<int> dims, int howmany, int stride, int dist, int sign) {
    if (dims.empty() || howmany <= 0) throw std::invalid_argument("bad fft shape");
    std::size_t total = static_cast<std::size_t>(howmany);
    for (int d : dims) {
        if (d <= 0) throw std::invalid_argument("bad fft length");
        total *= static_cast<std::size_t>(d);
    }
    // The layouts used here are dense, so total elements = howmany * prod(dims).
    scratch_.resize(total);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_complex* buf = reinterpret_cast<fftw_complex*>(scratch_.data());
    plan_ = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), howmany, buf, nullptr,
                               stride, dist, buf, nullptr, stride, dist, sign, FFTW_ESTIMATE);
    if (!plan_) throw std::runtime_error("fftw plan creation failed");
}

FftPlan::~FftPlan() {
    if (plan_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_));
    }
}

void FftPlan::execute(Complex* data) const {
    fftw_complex* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_), buf, buf);
}

}  // namespace dlab
