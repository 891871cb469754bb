#include "tfgdd/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

#include "tfgdd/errors.hpp"

namespace tfgdd {

namespace {

// Plan creation is not thread-safe in FFTW; execution through
// fftw_execute_dft is. Plans are created with FFTW_ESTIMATE so the algorithm
// choice depends only on the size (never on runtime timing) and with
// FFTW_UNALIGNED so one plan serves arbitrarily aligned caller buffers.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_pair(n, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<fftw_complex> scratch(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), scratch.data(),
                                          scratch.data(), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan == nullptr) throw NumericalError("failed to create DFT plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void execute(const std::complex<double>* in, std::complex<double>* out,
             std::size_t n, int sign) {
    if (n == 0) throw ConfigError("DFT size must be positive");
    fftw_plan plan = PlanCache::instance().get(n, sign);
    // fftw_complex and std::complex<double> are layout-compatible.
    fftw_execute_dft(plan,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace

void dft_forward(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
    execute(in, out, n, FFTW_FORWARD);
}

void dft_inverse(const std::complex<double>* in, std::complex<double>* out, std::size_t n) {
    execute(in, out, n, FFTW_BACKWARD);
}

void dft_forward(std::vector<std::complex<double>>& data) {
    dft_forward(data.data(), data.data(), data.size());
}

void dft_inverse(std::vector<std::complex<double>>& data) {
    dft_inverse(data.data(), data.data(), data.size());
}

} // namespace tfgdd
