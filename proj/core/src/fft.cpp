#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace nqlab::detail {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

std::vector<double> real_convolution(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t need = a.size() + b.size();
    std::size_t n = 1;
    while (n < need) n <<= 1;
    const std::size_t nc = n / 2 + 1;
    double* ra = fftw_alloc_real(n);
    double* rb = fftw_alloc_real(n);
    fftw_complex* ca = fftw_alloc_complex(nc);
    fftw_complex* cb = fftw_alloc_complex(nc);
    fftw_plan pa, pb, pc;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        pa = fftw_plan_dft_r2c_1d(static_cast<int>(n), ra, ca, FFTW_ESTIMATE);
        pb = fftw_plan_dft_r2c_1d(static_cast<int>(n), rb, cb, FFTW_ESTIMATE);
        pc = fftw_plan_dft_c2r_1d(static_cast<int>(n), ca, ra, FFTW_ESTIMATE);
    }
    std::fill(ra, ra + n, 0.0);
    std::fill(rb, rb + n, 0.0);
    std::copy(a.begin(), a.end(), ra);
    std::copy(b.begin(), b.end(), rb);
    fftw_execute(pa);
    fftw_execute(pb);
    for (std::size_t k = 0; k < nc; ++k) {
        const double re = ca[k][0] * cb[k][0] - ca[k][1] * cb[k][1];
        const double im = ca[k][0] * cb[k][1] + ca[k][1] * cb[k][0];
        ca[k][0] = re;
        ca[k][1] = im;
    }
    fftw_execute(pc);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = ra[i] / static_cast<double>(n);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(pa);
        fftw_destroy_plan(pb);
        fftw_destroy_plan(pc);
    }
    fftw_free(ra);
    fftw_free(rb);
    fftw_free(ca);
    fftw_free(cb);
    return out;
}

ComplexFft::ComplexFft(std::size_t n) : n_(n) {
    buf_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(n));
    auto* s = reinterpret_cast<fftw_complex*>(buf_);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd_ = fftw_plan_dft_1d(static_cast<int>(n), s, s, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(static_cast<int>(n), s, s, FFTW_BACKWARD, FFTW_ESTIMATE);
}

ComplexFft::~ComplexFft() {
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
        fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    }
    fftw_free(buf_);
}

void ComplexFft::forward() { fftw_execute(static_cast<fftw_plan>(fwd_)); }

void ComplexFft::backward() { fftw_execute(static_cast<fftw_plan>(bwd_)); }

}  // namespace nqlab::detail
