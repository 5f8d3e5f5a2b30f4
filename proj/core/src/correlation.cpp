#include "dcor/correlation.hpp"

#include "dcor/error.hpp"

#include <fftw3.h>
#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <string>

namespace dcor {
namespace {

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* plan) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
    auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
    if (!p) throw std::bad_alloc();
    return FftwBuffer<T>(p);
}

} // namespace

CorrelationSet::CorrelationSet(std::size_t codes, std::size_t length)
    : codes_(codes), length_(length) {
    if (codes < 1) throw InvalidArgument("code family needs at least one code");
    if (length < 2) throw InvalidArgument("code length must be at least 2");
    values_.assign(pair_count() * length, 0);
}

CorrelationSet correlate_naive(const CodeMatrix& x) {
    const std::size_t n = x.codes();
    const std::size_t len = x.length();
    CorrelationSet u(n, len);
    tbb::parallel_for(std::size_t{0}, n, [&](std::size_t i) {
        const auto xi = x.row(i);
        for (std::size_t j = i; j < n; ++j) {
            const auto xj = x.row(j);
            auto out = u.slab(i, j);
            for (std::size_t t = 0; t < len; ++t) {
                std::int32_t sum = 0;
                for (std::size_t tau = 0; tau < len; ++tau)
                    sum += xi[tau] * xj[(tau + len - t) % len];
                out[t] = sum;
            }
        }
    });
    return u;
}

CorrelationSet correlate_fft(const CodeMatrix& x) {
    const std::size_t n = x.codes();
    const std::size_t len = x.length();
    const std::size_t bins = len / 2 + 1;
    const int size = static_cast<int>(len);

    auto spectra = fftw_buffer<fftw_complex>(n * bins);
    Plan forward;
    Plan inverse;
    {
        auto real = fftw_buffer<double>(len);
        auto cplx = fftw_buffer<fftw_complex>(bins);
        std::lock_guard lock(planner_mutex());
        forward.reset(fftw_plan_dft_r2c_1d(size, real.get(), cplx.get(), FFTW_ESTIMATE));
        inverse.reset(fftw_plan_dft_c2r_1d(size, cplx.get(), real.get(), FFTW_ESTIMATE));
    }
    if (!forward || !inverse) throw NumericalError("FFT planning failed");

    tbb::parallel_for(std::size_t{0}, n, [&](std::size_t i) {
        auto real = fftw_buffer<double>(len);
        const auto xi = x.row(i);
        for (std::size_t t = 0; t < len; ++t) real[t] = xi[t];
        fftw_execute_dft_r2c(forward.get(), real.get(), spectra.get() + i * bins);
    });

    CorrelationSet u(n, len);
    const double tolerance = 1e-6 * static_cast<double>(len);
    tbb::parallel_for(std::size_t{0}, n, [&](std::size_t i) {
        auto product = fftw_buffer<fftw_complex>(bins);
        auto real = fftw_buffer<double>(len);
        const auto* fi = reinterpret_cast<const std::complex<double>*>(spectra.get() + i * bins);
        for (std::size_t j = i; j < n; ++j) {
            const auto* fj = reinterpret_cast<const std::complex<double>*>(spectra.get() + j * bins);
            auto* prod = reinterpret_cast<std::complex<double>*>(product.get());
            for (std::size_t k = 0; k < bins; ++k) prod[k] = fi[k] * std::conj(fj[k]);
            // c2r destroys its input, which is scratch here.
            fftw_execute_dft_c2r(inverse.get(), product.get(), real.get());
            auto out = u.slab(i, j);
            for (std::size_t t = 0; t < len; ++t) {
                // FFTW's inverse is unnormalized: real[t] = T * value(i, j, t).
                const double v = real[t] / static_cast<double>(len);
                const double rounded = std::nearbyint(v);
                if (std::abs(v - rounded) > tolerance)
                    throw NumericalError("FFT correlation residual " + std::to_string(v - rounded) +
                                         " at pair (" + std::to_string(i) + "," +
                                         std::to_string(j) + ") shift " + std::to_string(t));
                out[t] = static_cast<std::int32_t>(rounded);
            }
        }
    });
    return u;
}

void apply_flip(CorrelationSet& u, const CodeMatrix& x_pre, BitIndex idx) {
    if (!x_pre.contains(idx)) throw InvalidArgument("bit index out of range");
    const std::size_t n = x_pre.codes();
    const std::size_t len = x_pre.length();
    const std::size_t a = idx.code;
    const std::size_t b = idx.chip;
    const std::int32_t s2 = 2 * x_pre(a, b);

    // Pairs (i, a) with i < a are stored as slab(i, a): the flipped chip sits
    // at tau - t = b, so the changed term pairs it with x[i][b + t].
    for (std::size_t i = 0; i < a; ++i) {
        std::int32_t* out = u.slab(i, a).data();
        const std::int8_t* xi = x_pre.row(i).data();
        const std::size_t split = len - b;
#pragma omp simd
        for (std::size_t t = 0; t < split; ++t) out[t] -= s2 * xi[b + t];
#pragma omp simd
        for (std::size_t t = split; t < len; ++t) out[t] -= s2 * xi[b + t - len];
    }
    // Pairs (a, j) with j > a: the flipped chip sits at tau = b, paired with
    // x[j][b - t].
    for (std::size_t j = a + 1; j < n; ++j) {
        std::int32_t* out = u.slab(a, j).data();
        const std::int8_t* xj = x_pre.row(j).data();
#pragma omp simd
        for (std::size_t t = 0; t <= b; ++t) out[t] -= s2 * xj[b - t];
#pragma omp simd
        for (std::size_t t = b + 1; t < len; ++t) out[t] -= s2 * xj[b + len - t];
    }
    // Autocorrelation: both tau = b and tau - t = b change; shift 0 is fixed.
    const auto xa = x_pre.row(a);
    auto diag = u.slab(a, a);
    for (std::size_t t = 1; t < len; ++t) {
        const std::size_t up = b + t < len ? b + t : b + t - len;
        const std::size_t down = t <= b ? b - t : b + len - t;
        diag[t] -= s2 * (xa[up] + xa[down]);
    }
}

CorrelationStats correlation_stats(const CorrelationSet& u, std::size_t bins) {
    if (bins == 0) throw InvalidArgument("histogram needs at least one bin");
    const std::size_t n = u.codes();
    const std::size_t len = u.length();
    const double scale = 1.0 / static_cast<double>(len);

    CorrelationStats stats;
    stats.histogram.counts.assign(bins, 0);
    const double width = stats.histogram.bin_width();

    std::int64_t max_abs = 0;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const auto slab = u.slab(i, j);
            double slab_sum = 0.0;
            for (std::size_t t = (i == j ? 1 : 0); t < len; ++t) {
                const std::int64_t v = slab[t];
                max_abs = std::max<std::int64_t>(max_abs, v < 0 ? -v : v);
                const double sigma = static_cast<double>(v) * scale;
                slab_sum += sigma;
                auto bin = static_cast<std::size_t>((sigma - stats.histogram.lo) / width);
                ++stats.histogram.counts[std::min(bin, bins - 1)];
                ++stats.count;
            }
            sum += slab_sum;
        }
    }
    if (stats.count == 0) return stats;
    stats.max_abs = static_cast<double>(max_abs) * scale;
    stats.mean = sum / static_cast<double>(stats.count);

    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const auto slab = u.slab(i, j);
            double slab_sq = 0.0;
            for (std::size_t t = (i == j ? 1 : 0); t < len; ++t) {
                const double d = static_cast<double>(slab[t]) * scale - stats.mean;
                slab_sq += d * d;
            }
            sq += slab_sq;
        }
    stats.std = std::sqrt(sq / static_cast<double>(stats.count));
    return stats;
}

} // namespace dcor
