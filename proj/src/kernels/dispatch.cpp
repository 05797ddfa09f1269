#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "gk/kernels.hpp"

namespace gk::kernels {

#if !GK_HAVE_AVX2_TU
namespace detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace detail
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend initial_backend() noexcept {
    const bool avx2 = avx2_supported();
    if (const char* env = std::getenv("GK_KERNELS")) {
        const std::string want(env);
        if (want == "scalar") return Backend::Scalar;
        if (want == "avx2" && avx2) return Backend::Avx2;
    }
    return avx2 ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current() noexcept {
    static std::atomic<Backend> backend{initial_backend()};
    return backend;
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
    }
    return "unknown";
}

bool avx2_supported() noexcept {
    static const bool ok = detail::avx2_table() != nullptr && cpu_has_avx2();
    return ok;
}

Backend active_backend() noexcept { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_supported())
        throw std::invalid_argument("AVX2 kernels are not available on this host");
    current().store(b, std::memory_order_relaxed);
}

const KernelTable& table(Backend b) {
    if (b == Backend::Avx2) {
        if (!avx2_supported()) throw std::invalid_argument("AVX2 kernels are not available on this host");
        return *detail::avx2_table();
    }
    return detail::scalar_table();
}

const KernelTable& active() noexcept {
    if (active_backend() == Backend::Avx2) return *detail::avx2_table();
    return detail::scalar_table();
}

namespace {
void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}
}  // namespace

void matvec(std::span<const double> a, std::size_t n, std::span<const double> x, std::span<double> y) {
    require(a.size() == n * n && x.size() == n && y.size() == n, "matvec: size mismatch");
    active().matvec(a.data(), n, x.data(), y.data());
}

void coupling_sums(std::span<const double> a, std::size_t n, std::span<const double> s,
                   std::span<const double> c, std::span<double> as, std::span<double> ac) {
    require(a.size() == n * n && s.size() == n && c.size() == n && as.size() == n && ac.size() == n,
            "coupling_sums: size mismatch");
    active().coupling_sums(a.data(), n, s.data(), c.data(), as.data(), ac.data());
}

void jacobian_fill(std::span<const double> a, std::size_t n, std::span<const double> s,
                   std::span<const double> c, double scale, std::span<double> j) {
    require(a.size() == n * n && s.size() == n && c.size() == n && j.size() == n * n,
            "jacobian_fill: size mismatch");
    active().jacobian_fill(a.data(), n, s.data(), c.data(), scale, j.data());
}

}  // namespace gk::kernels
