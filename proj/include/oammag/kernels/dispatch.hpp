#pragma once

#include <string>

#include "oammag/kernels/kernels.hpp"

namespace oammag::kernels {

enum class Backend { automatic, scalar, avx2 };

struct KernelTable {
    MaskedSumsFn masked_sums = nullptr;
    CenteredMomentsFn centered_moments = nullptr;
    BilinearRotateFn bilinear_rotate = nullptr;
};

// Selects the kernel set used by image operations. "automatic" picks the
// widest instruction set the CPU supports among those compiled in.
// Intended to be called once at startup; not synchronized against
// concurrent readers.
void set_backend(Backend backend);
Backend current_backend();

// Table in effect under the current backend setting.
const KernelTable& active();

// Name of the backend active() resolves to: "scalar" or "avx2".
std::string backend_name();

// True when AVX2 kernels are compiled in and the CPU supports them.
bool avx2_available();

} // namespace oammag::kernels
