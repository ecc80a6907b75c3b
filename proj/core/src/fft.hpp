#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace nqlab::detail {

// Linear convolution of two real sequences, truncated to a.size() entries.
std::vector<double> real_convolution(const std::vector<double>& a, const std::vector<double>& b);

// In-place complex 1D DFT pair on an owned, aligned buffer (FFTW plans).
// Planning is serialized under a global lock; each instance is used by one thread.
class ComplexFft {
public:
    explicit ComplexFft(std::size_t n);
    ~ComplexFft();
    ComplexFft(const ComplexFft&) = delete;
    ComplexFft& operator=(const ComplexFft&) = delete;

    std::size_t size() const { return n_; }
    std::complex<double>* data() { return buf_; }
    void forward();   // unnormalized
    void backward();  // unnormalized

private:
    std::size_t n_;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
    std::complex<double>* buf_ = nullptr;
};

}  // namespace nqlab::detail
