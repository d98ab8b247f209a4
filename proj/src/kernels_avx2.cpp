// Compiled with -mavx2 -mfma; only called after a CPUID check.
#include "cylpack/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace cylpack::kernels::detail
{
void support_scan_avx2(double k,
                       SiteBlock sites,
                       std::span<double const> probe_cos,
                       std::span<double const> probe_sin,
                       std::span<double> heights)
{
    double const none = -std::numeric_limits<double>::infinity();
    std::size_t const n = sites.size();
    std::size_t const count = heights.size();

    __m256d const vk = _mm256_set1_pd(k);
    __m256d const one = _mm256_set1_pd(1.0);
    __m256d const zero = _mm256_setzero_pd();
    __m256d const vnone = _mm256_set1_pd(none);

    std::size_t g = 0;
    for (; g + 4 <= count; g += 4)
    {
        __m256d ct = _mm256_loadu_pd(probe_cos.data() + g);
        __m256d st = _mm256_loadu_pd(probe_sin.data() + g);
        __m256d best = vnone;
        for (std::size_t j = 0; j < n; ++j)
        {
            __m256d cj = _mm256_set1_pd(sites.cos[j]);
            __m256d sj = _mm256_set1_pd(sites.sin[j]);
            __m256d c = _mm256_fmadd_pd(ct, cj, _mm256_mul_pd(st, sj));
            // rad = 1 - k (1 - c)
            __m256d rad = _mm256_fnmadd_pd(vk, _mm256_sub_pd(one, c), one);
            __m256d ok = _mm256_cmp_pd(rad, zero, _CMP_GE_OQ);
            __m256d h = _mm256_add_pd(_mm256_set1_pd(sites.axial[j]),
                                      _mm256_sqrt_pd(_mm256_max_pd(rad, zero)));
            h = _mm256_blendv_pd(vnone, h, ok);
            best = _mm256_max_pd(best, h);
        }
        _mm256_storeu_pd(heights.data() + g, best);
    }
    if (g < count)
    {
        support_scan_scalar(k,
                            sites,
                            probe_cos.subspan(g),
                            probe_sin.subspan(g),
                            heights.subspan(g));
    }
}

void distance_sq_avx2(double k,
                      double cos_phi,
                      double sin_phi,
                      double axial,
                      SiteBlock sites,
                      std::span<double> out)
{
    std::size_t const n = sites.size();
    __m256d const vk = _mm256_set1_pd(k);
    __m256d const one = _mm256_set1_pd(1.0);
    __m256d const cp = _mm256_set1_pd(cos_phi);
    __m256d const sp = _mm256_set1_pd(sin_phi);
    __m256d const z = _mm256_set1_pd(axial);

    std::size_t j = 0;
    for (; j + 4 <= n; j += 4)
    {
        __m256d cj = _mm256_loadu_pd(sites.cos.data() + j);
        __m256d sj = _mm256_loadu_pd(sites.sin.data() + j);
        __m256d zj = _mm256_loadu_pd(sites.axial.data() + j);
        __m256d c = _mm256_fmadd_pd(cp, cj, _mm256_mul_pd(sp, sj));
        __m256d dz = _mm256_sub_pd(z, zj);
        __m256d d2 = _mm256_fmadd_pd(vk, _mm256_sub_pd(one, c),
                                     _mm256_mul_pd(dz, dz));
        _mm256_storeu_pd(out.data() + j, d2);
    }
    if (j < n)
    {
        SiteBlock tail{sites.cos.subspan(j), sites.sin.subspan(j),
                       sites.axial.subspan(j)};
        distance_sq_scalar(k, cos_phi, sin_phi, axial, tail, out.subspan(j));
    }
}
}  // namespace cylpack::kernels::detail
