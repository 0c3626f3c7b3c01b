#include "corrsurf/kernels/kernels.hpp"

#include <atomic>
#include <cassert>

namespace corrsurf::kernels {

#ifndef CORRSURF_HAVE_AVX2
namespace avx2 {
bool supported() noexcept { return false; }
void tarch_step(const TarchStepCoeffs& c, const double* eps, double* sigma2, double* agg, std::size_t n)
{
    scalar::tarch_step(c, eps, sigma2, agg, n);
}
void conditional_default_prob(const double* factor, const double* scale, double threshold, double loading,
                              double* out, std::size_t n)
{
    scalar::conditional_default_prob(factor, scale, threshold, loading, out, n);
}
void norm_cdf(const double* x, double* out, std::size_t n) { scalar::norm_cdf(x, out, n); }
double strided_sum(const double* x, std::size_t n) noexcept { return scalar::strided_sum(x, n); }
double capped_sum(const double* x, std::size_t n, double cap) noexcept { return scalar::capped_sum(x, n, cap); }
} // namespace avx2
#endif

namespace {

std::atomic<Isa>& current()
{
    static std::atomic<Isa> isa{best_available()};
    return isa;
}

bool use_avx2() noexcept { return current().load(std::memory_order_relaxed) == Isa::avx2; }

} // namespace

Isa best_available() noexcept
{
    return avx2::supported() ? Isa::avx2 : Isa::scalar;
}

Isa active() noexcept { return current().load(); }

void set_active(Isa isa) noexcept
{
    if (isa == Isa::avx2 && !avx2::supported())
        isa = Isa::scalar;
    current().store(isa);
}

const char* isa_name(Isa isa) noexcept
{
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

void tarch_step(const TarchStepCoeffs& c, std::span<const double> eps, std::span<double> sigma2,
                std::span<double> agg)
{
    assert(eps.size() == sigma2.size() && agg.size() == sigma2.size());
    if (use_avx2())
        avx2::tarch_step(c, eps.data(), sigma2.data(), agg.data(), eps.size());
    else
        scalar::tarch_step(c, eps.data(), sigma2.data(), agg.data(), eps.size());
}

void conditional_default_prob(std::span<const double> factor, std::span<const double> threshold_scale,
                              double threshold, double loading, std::span<double> out)
{
    assert(out.size() == factor.size());
    assert(threshold_scale.empty() || threshold_scale.size() == factor.size());
    const double* scale = threshold_scale.empty() ? nullptr : threshold_scale.data();
    if (use_avx2())
        avx2::conditional_default_prob(factor.data(), scale, threshold, loading, out.data(), factor.size());
    else
        scalar::conditional_default_prob(factor.data(), scale, threshold, loading, out.data(), factor.size());
}

void norm_cdf(std::span<const double> x, std::span<double> out)
{
    assert(out.size() == x.size());
    if (use_avx2())
        avx2::norm_cdf(x.data(), out.data(), x.size());
    else
        scalar::norm_cdf(x.data(), out.data(), x.size());
}

double strided_sum(std::span<const double> x) noexcept
{
    return use_avx2() ? avx2::strided_sum(x.data(), x.size()) : scalar::strided_sum(x.data(), x.size());
}

double capped_sum(std::span<const double> x, double cap) noexcept
{
    return use_avx2() ? avx2::capped_sum(x.data(), x.size(), cap) : scalar::capped_sum(x.data(), x.size(), cap);
}

} // namespace corrsurf::kernels
