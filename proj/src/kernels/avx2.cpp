#ifdef OAMMAG_HAVE_AVX2

#include <immintrin.h>

#include <cstdint>
#include <cstring>

#include "oammag/kernels/kernels.hpp"

#include "detail.hpp"

namespace oammag::kernels::avx2 {

namespace {

// valid[i..i+3] widened to an all-ones/all-zeros double-lane mask.
inline __m256d valid_mask4(const unsigned char* valid) {
    std::uint32_t packed;
    std::memcpy(&packed, valid, 4);
    const __m128i bytes = _mm_cvtsi32_si128(int(packed));
    const __m128i lanes32 = _mm_cvtepu8_epi32(bytes);
    const __m128i mask32 = _mm_cmpgt_epi32(lanes32, _mm_setzero_si128());
    return _mm256_castsi256_pd(_mm256_cvtepi32_epi64(mask32));
}

inline double hsum(__m256d v) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, v);
    return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

} // namespace

void masked_sums(const double* a, const double* b, const unsigned char* valid,
                 std::size_t n, double& sum_a, double& sum_b, std::size_t& count) {
    __m256d acc_a = _mm256_setzero_pd();
    __m256d acc_b = _mm256_setzero_pd();
    __m256i acc_c = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = valid_mask4(valid + i);
        acc_a = _mm256_add_pd(acc_a, _mm256_and_pd(_mm256_loadu_pd(a + i), mask));
        acc_b = _mm256_add_pd(acc_b, _mm256_and_pd(_mm256_loadu_pd(b + i), mask));
        acc_c = _mm256_sub_epi64(acc_c, _mm256_castpd_si256(mask));
    }
    double sa = hsum(acc_a), sb = hsum(acc_b);
    alignas(32) std::uint64_t cnt[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(cnt), acc_c);
    std::size_t c = cnt[0] + cnt[1] + cnt[2] + cnt[3];
    for (; i < n; ++i) {
        if (!valid[i]) continue;
        sa += a[i];
        sb += b[i];
        ++c;
    }
    sum_a = sa;
    sum_b = sb;
    count = c;
}

void centered_moments(const double* a, const double* b, const unsigned char* valid,
                      std::size_t n, double mean_a, double mean_b,
                      double& saa, double& sbb, double& sab) {
    const __m256d ma = _mm256_set1_pd(mean_a);
    const __m256d mb = _mm256_set1_pd(mean_b);
    __m256d acc_aa = _mm256_setzero_pd();
    __m256d acc_bb = _mm256_setzero_pd();
    __m256d acc_ab = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = valid_mask4(valid + i);
        const __m256d da =
            _mm256_and_pd(_mm256_sub_pd(_mm256_loadu_pd(a + i), ma), mask);
        const __m256d db =
            _mm256_and_pd(_mm256_sub_pd(_mm256_loadu_pd(b + i), mb), mask);
        acc_aa = _mm256_add_pd(acc_aa, _mm256_mul_pd(da, da));
        acc_bb = _mm256_add_pd(acc_bb, _mm256_mul_pd(db, db));
        acc_ab = _mm256_add_pd(acc_ab, _mm256_mul_pd(da, db));
    }
    double aa = hsum(acc_aa), bb = hsum(acc_bb), ab = hsum(acc_ab);
    for (; i < n; ++i) {
        if (!valid[i]) continue;
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        aa += da * da;
        bb += db * db;
        ab += da * db;
    }
    saa = aa;
    sbb = bb;
    sab = ab;
}

void bilinear_rotate(const double* src, int width, int height,
                     double cx, double cy, double cos_t, double sin_t,
                     double* dst, unsigned char* dst_valid) {
    const int x0_max = width - 2;
    const int y0_max = height - 2;
    const __m256d vcos = _mm256_set1_pd(cos_t);
    const __m256d vsin = _mm256_set1_pd(sin_t);
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vcy = _mm256_set1_pd(cy);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d xmax = _mm256_set1_pd(double(width - 1));
    const __m256d ymax = _mm256_set1_pd(double(height - 1));
    const __m256d x0cap = _mm256_set1_pd(double(x0_max));
    const __m256d y0cap = _mm256_set1_pd(double(y0_max));
    const __m256d vw = _mm256_set1_pd(double(width));
    const __m256d lane_off = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    const __m128i step_e = _mm_set1_epi32(1);
    const __m128i step_s = _mm_set1_epi32(width);

    for (int j = 0; j < height; ++j) {
        const double y = j - cy;
        const __m256d vy = _mm256_set1_pd(y);
        double* out = dst + std::size_t(j) * width;
        unsigned char* out_valid = dst_valid + std::size_t(j) * width;
        int i = 0;
        for (; i + 4 <= width; i += 4) {
            const __m256d vx =
                _mm256_add_pd(_mm256_set1_pd(double(i) - cx), lane_off);
            const __m256d xs = _mm256_add_pd(
                _mm256_sub_pd(_mm256_mul_pd(vx, vcos), _mm256_mul_pd(vy, vsin)),
                vcx);
            const __m256d ys = _mm256_add_pd(
                _mm256_add_pd(_mm256_mul_pd(vx, vsin), _mm256_mul_pd(vy, vcos)),
                vcy);
            const __m256d in_range = _mm256_and_pd(
                _mm256_and_pd(_mm256_cmp_pd(xs, zero, _CMP_GE_OQ),
                              _mm256_cmp_pd(ys, zero, _CMP_GE_OQ)),
                _mm256_and_pd(_mm256_cmp_pd(xs, xmax, _CMP_LE_OQ),
                              _mm256_cmp_pd(ys, ymax, _CMP_LE_OQ)));
            const __m256d x0d =
                _mm256_min_pd(_mm256_max_pd(_mm256_floor_pd(xs), zero), x0cap);
            const __m256d y0d =
                _mm256_min_pd(_mm256_max_pd(_mm256_floor_pd(ys), zero), y0cap);
            const __m256d fx = _mm256_sub_pd(xs, x0d);
            const __m256d fy = _mm256_sub_pd(ys, y0d);
            // Out-of-range lanes gather from index 0 and are blanked below.
            const __m256d idx_d = _mm256_blendv_pd(
                zero, _mm256_add_pd(_mm256_mul_pd(y0d, vw), x0d), in_range);
            const __m128i i00 = _mm256_cvttpd_epi32(idx_d);
            const __m128i i01 = _mm_add_epi32(i00, step_e);
            const __m128i i10 = _mm_add_epi32(i00, step_s);
            const __m128i i11 = _mm_add_epi32(i10, step_e);
            const __m256d g00 = _mm256_i32gather_pd(src, i00, 8);
            const __m256d g01 = _mm256_i32gather_pd(src, i01, 8);
            const __m256d g10 = _mm256_i32gather_pd(src, i10, 8);
            const __m256d g11 = _mm256_i32gather_pd(src, i11, 8);
            const __m256d wx = _mm256_sub_pd(one, fx);
            const __m256d top = _mm256_add_pd(_mm256_mul_pd(wx, g00),
                                              _mm256_mul_pd(fx, g01));
            const __m256d bot = _mm256_add_pd(_mm256_mul_pd(wx, g10),
                                              _mm256_mul_pd(fx, g11));
            const __m256d v = _mm256_add_pd(
                _mm256_mul_pd(_mm256_sub_pd(one, fy), top), _mm256_mul_pd(fy, bot));
            _mm256_storeu_pd(out + i, _mm256_and_pd(v, in_range));
            const int bits = _mm256_movemask_pd(in_range);
            out_valid[i] = (bits >> 0) & 1;
            out_valid[i + 1] = (bits >> 1) & 1;
            out_valid[i + 2] = (bits >> 2) & 1;
            out_valid[i + 3] = (bits >> 3) & 1;
        }
        for (; i < width; ++i) {
            const double x = i - cx;
            const double xs = x * cos_t - y * sin_t + cx;
            const double ys = x * sin_t + y * cos_t + cy;
            if (detail::source_in_range(xs, ys, width, height)) {
                out[i] = detail::bilinear_sample(src, width, xs, ys, x0_max, y0_max);
                out_valid[i] = 1;
            } else {
                out[i] = 0.0;
                out_valid[i] = 0;
            }
        }
    }
}

} // namespace oammag::kernels::avx2

#endif // OAMMAG_HAVE_AVX2
