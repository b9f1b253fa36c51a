#include "solmz/spectral.hpp"

#include "solmz/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace solmz {

namespace {

struct PlanPair {
    fftw_plan forward;
    fftw_plan backward;
};

// The FFTW planner is not re-entrant. FFTW_ESTIMATE keeps the chosen
// algorithm independent of timing noise, so reruns are bit-identical.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

PlanPair plans_for(std::size_t n) {
    static std::map<std::size_t, PlanPair> cache;
    std::lock_guard lock(planner_mutex());
    auto it = cache.find(n);
    if (it != cache.end()) {
        return it->second;
    }
    CVec scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int len = static_cast<int>(n);
    PlanPair p{fftw_plan_dft_1d(len, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE),
               fftw_plan_dft_1d(len, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE)};
    if (p.forward == nullptr || p.backward == nullptr) {
        throw DomainError("FFTW could not plan a transform of length " + std::to_string(n));
    }
    cache.emplace(n, p);
    return p;
}

} // namespace

Fft::Fft(std::size_t n) : n_(n) {
    const PlanPair p = plans_for(n);
    forward_plan_ = p.forward;
    backward_plan_ = p.backward;
}

void Fft::forward(CVec& data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), buf, buf);
}

void Fft::backward(CVec& data) const {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), buf, buf);
}

} // namespace solmz
