#pragma once

#include <cstddef>

namespace oammag::kernels {

// Masked reduction, pass 1: sums and count over pixels with valid[i] != 0.
using MaskedSumsFn = void (*)(const double* a, const double* b,
                              const unsigned char* valid, std::size_t n,
                              double& sum_a, double& sum_b, std::size_t& count);

// Masked reduction, pass 2: centered second moments over the same pixels.
using CenteredMomentsFn = void (*)(const double* a, const double* b,
                                   const unsigned char* valid, std::size_t n,
                                   double mean_a, double mean_b,
                                   double& saa, double& sbb, double& sab);

// Bilinear resample of src under a rotation by the angle whose cosine/sine
// are given, about (cx, cy). Output pixels whose source footprint leaves the
// image are written as 0 with dst_valid = 0. src must be fully valid.
using BilinearRotateFn = void (*)(const double* src, int width, int height,
                                  double cx, double cy,
                                  double cos_t, double sin_t,
                                  double* dst, unsigned char* dst_valid);

namespace scalar {
void masked_sums(const double* a, const double* b, const unsigned char* valid,
                 std::size_t n, double& sum_a, double& sum_b, std::size_t& count);
void centered_moments(const double* a, const double* b, const unsigned char* valid,
                      std::size_t n, double mean_a, double mean_b,
                      double& saa, double& sbb, double& sab);
void bilinear_rotate(const double* src, int width, int height,
                     double cx, double cy, double cos_t, double sin_t,
                     double* dst, unsigned char* dst_valid);
} // namespace scalar

#ifdef OAMMAG_HAVE_AVX2
namespace avx2 {
void masked_sums(const double* a, const double* b, const unsigned char* valid,
                 std::size_t n, double& sum_a, double& sum_b, std::size_t& count);
void centered_moments(const double* a, const double* b, const unsigned char* valid,
                      std::size_t n, double mean_a, double mean_b,
                      double& saa, double& sbb, double& sab);
void bilinear_rotate(const double* src, int width, int height,
                     double cx, double cy, double cos_t, double sin_t,
                     double* dst, unsigned char* dst_valid);
} // namespace avx2
#endif

} // namespace oammag::kernels
