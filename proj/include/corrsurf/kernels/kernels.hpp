#pragma once

#include <cstddef>
#include <span>

// Hot loops of the Monte Carlo engine. Each kernel has a portable scalar
// reference and, on x86-64, an AVX2 variant that performs the same sequence
// of IEEE operations lane by lane, so results are bit-identical. The
// dispatching entry points pick the variant once at startup.
namespace corrsurf::kernels {

enum class Isa { scalar, avx2 };

Isa best_available() noexcept;
Isa active() noexcept;
// Requesting an ISA the CPU lacks falls back to scalar.
void set_active(Isa isa) noexcept;
const char* isa_name(Isa isa) noexcept;

struct TarchStepCoeffs {
    double omega;
    double alpha;
    double alpha_d;
    double beta;
};

// One time step for a batch of independent paths:
//   r = sqrt(s2) * eps;  agg += r;  s2 = omega + (alpha + alpha_d [r <= 0]) r^2 + beta s2
void tarch_step(const TarchStepCoeffs& c, std::span<const double> eps, std::span<double> sigma2,
                std::span<double> agg);

// out[i] = Phi((a_i * d - b * x_i) / sqrt(1 - b^2)), a_i = threshold_scale[i]
// or 1 when threshold_scale is empty.
void conditional_default_prob(std::span<const double> factor, std::span<const double> threshold_scale,
                              double threshold, double loading, std::span<double> out);

void norm_cdf(std::span<const double> x, std::span<double> out);

// Fixed-order sum: four interleaved partial sums (i mod 4) combined as
// (s0 + s1) + (s2 + s3), then the tail. Order does not depend on the ISA.
double strided_sum(std::span<const double> x) noexcept;

// Same reduction order applied to min(x_i, cap).
double capped_sum(std::span<const double> x, double cap) noexcept;

namespace scalar {
double norm_cdf_one(double x) noexcept;
void tarch_step(const TarchStepCoeffs& c, const double* eps, double* sigma2, double* agg, std::size_t n);
void conditional_default_prob(const double* factor, const double* scale, double threshold, double loading,
                              double* out, std::size_t n);
void norm_cdf(const double* x, double* out, std::size_t n);
double strided_sum(const double* x, std::size_t n) noexcept;
double capped_sum(const double* x, std::size_t n, double cap) noexcept;
} // namespace scalar

namespace avx2 {
bool supported() noexcept;
void tarch_step(const TarchStepCoeffs& c, const double* eps, double* sigma2, double* agg, std::size_t n);
void conditional_default_prob(const double* factor, const double* scale, double threshold, double loading,
                              double* out, std::size_t n);
void norm_cdf(const double* x, double* out, std::size_t n);
double strided_sum(const double* x, std::size_t n) noexcept;
double capped_sum(const double* x, std::size_t n, double cap) noexcept;
} // namespace avx2

} // namespace corrsurf::kernels
