#include "oammag/kernels/dispatch.hpp"

#include <stdexcept>

namespace oammag::kernels {

namespace {

Backend& setting() {
    static Backend b = Backend::automatic;
    return b;
}

KernelTable table_for(Backend resolved) {
#ifdef OAMMAG_HAVE_AVX2
    if (resolved == Backend::avx2)
        return {avx2::masked_sums, avx2::centered_moments, avx2::bilinear_rotate};
#endif
    (void)resolved;
    return {scalar::masked_sums, scalar::centered_moments, scalar::bilinear_rotate};
}

Backend resolve(Backend b) {
    if (b == Backend::automatic)
        return avx2_available() ? Backend::avx2 : Backend::scalar;
    return b;
}

KernelTable& table() {
    static KernelTable t = table_for(resolve(Backend::automatic));
    return t;
}

} // namespace

bool avx2_available() {
#ifdef OAMMAG_HAVE_AVX2
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

void set_backend(Backend backend) {
    if (backend == Backend::avx2 && !avx2_available())
        throw std::invalid_argument("set_backend: avx2 not available on this host");
    setting() = backend;
    table() = table_for(resolve(backend));
}

Backend current_backend() { return setting(); }

const KernelTable& active() { return table(); }

std::string backend_name() {
    return resolve(setting()) == Backend::avx2 ? "avx2" : "scalar";
}

} // namespace oammag::kernels
