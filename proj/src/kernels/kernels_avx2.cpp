// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include "ipid/kernels.hpp"

namespace ipid::kernels {

namespace {

inline double horizontal_sum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double continuation_avx2(const MixtureNodes& m, double p_tilde, const double* J, std::size_t M) {
    const double q = 1.0 - p_tilde;
    if (q <= 0.0) {
        double mass = 0.0;
        for (std::size_t k = 0; k < m.count; ++k) mass += m.post_weighted[k];
        return mass * J[M - 1];
    }
    const double scale = static_cast<double>(M - 1);
    const double last = static_cast<double>(M - 2);

    const __m256d vp = _mm256_set1_pd(p_tilde);
    const __m256d vq = _mm256_set1_pd(q);
    const __m256d vscale = _mm256_set1_pd(scale);
    const __m256d vlast = _mm256_set1_pd(last);
    __m256d acc = _mm256_setzero_pd();

    std::size_t k = 0;
    for (; k + 4 <= m.count; k += 4) {
        const __m256d gw = _mm256_loadu_pd(m.post_weighted + k);
        const __m256d fw = _mm256_loadu_pd(m.pre_weighted + k);
        const __m256d r = _mm256_loadu_pd(m.odds_ratio + k);

        const __m256d density = _mm256_fmadd_pd(vp, gw, _mm256_mul_pd(vq, fw));
        const __m256d posterior = _mm256_div_pd(vp, _mm256_fmadd_pd(vq, r, vp));
        const __m256d t = _mm256_mul_pd(posterior, vscale);
        const __m256d jf = _mm256_min_pd(_mm256_floor_pd(t), vlast);
        const __m256d frac = _mm256_sub_pd(t, jf);
        const __m128i idx = _mm256_cvttpd_epi32(jf);
        const __m256d lo = _mm256_i32gather_pd(J, idx, 8);
        const __m256d hi = _mm256_i32gather_pd(J + 1, idx, 8);
        const __m256d value = _mm256_fmadd_pd(frac, _mm256_sub_pd(hi, lo), lo);
        acc = _mm256_fmadd_pd(density, value, acc);
    }

    double total = horizontal_sum(acc);
    const std::size_t last_index = M - 2;
    for (; k < m.count; ++k) {
        const double density = p_tilde * m.post_weighted[k] + q * m.pre_weighted[k];
        const double posterior = p_tilde / (p_tilde + q * m.odds_ratio[k]);
        const double t = posterior * scale;
        std::size_t j = static_cast<std::size_t>(t);
        if (j > last_index) j = last_index;
        const double frac = t - static_cast<double>(j);
        total += density * (J[j] + frac * (J[j + 1] - J[j]));
    }
    return total;
}

constexpr KernelTable kAvx2{Isa::Avx2, &dot_avx2, &continuation_avx2};

}  // namespace

const KernelTable* avx2_table() { return &kAvx2; }

}  // namespace ipid::kernels
