#pragma once

// Dense O(n^2) inner loops shared by the Kuramoto right-hand side, its
// Jacobian, the RK4 integrator and the cut-norm local search.
//
// Each kernel has a scalar reference implementation and an AVX2/FMA variant.
// The variant is chosen once at startup from CPUID and can be overridden
// with set_backend() or GK_KERNELS=scalar|avx2 in the environment.

#include <cstddef>
#include <span>
#include <string_view>

namespace gk::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view backend_name(Backend b) noexcept;

/// True when the AVX2 translation unit was built and the CPU reports AVX2+FMA.
bool avx2_supported() noexcept;

Backend active_backend() noexcept;

/// Throws std::invalid_argument if the backend is unavailable on this host.
void set_backend(Backend b);

struct KernelTable {
    // y = A x, A row-major n x n.
    void (*matvec)(const double* a, std::size_t n, const double* x, double* y);
    // as = A s and ac = A c in one pass over A.
    void (*coupling_sums)(const double* a, std::size_t n, const double* s, const double* c, double* as,
                          double* ac);
    // j[r][k] = scale * a[r][k] * (c_r c_k + s_r s_k) off the diagonal,
    // j[r][r] = -(sum of the off-diagonal entries of row r).
    void (*jacobian_fill)(const double* a, std::size_t n, const double* s, const double* c, double scale,
                          double* j);
};

const KernelTable& table(Backend b);
const KernelTable& active() noexcept;

// Span wrappers over the active backend.
void matvec(std::span<const double> a, std::size_t n, std::span<const double> x, std::span<double> y);
void coupling_sums(std::span<const double> a, std::size_t n, std::span<const double> s,
                   std::span<const double> c, std::span<double> as, std::span<double> ac);
void jacobian_fill(std::span<const double> a, std::size_t n, std::span<const double> s,
                   std::span<const double> c, double scale, std::span<double> j);

namespace detail {
const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;  // nullptr when not compiled in
}  // namespace detail

}  // namespace gk::kernels
