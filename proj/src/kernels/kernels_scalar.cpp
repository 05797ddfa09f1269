#include "gk/kernels.hpp"

namespace gk::kernels {
namespace {

void matvec_scalar(const double* a, std::size_t n, const double* x, double* y) {
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = a + r * n;
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += row[k] * x[k];
        y[r] = acc;
    }
}

void coupling_sums_scalar(const double* a, std::size_t n, const double* s, const double* c, double* as,
                          double* ac) {
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = a + r * n;
        double acc_s = 0.0;
        double acc_c = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc_s += row[k] * s[k];
            acc_c += row[k] * c[k];
        }
        as[r] = acc_s;
        ac[r] = acc_c;
    }
}

void jacobian_fill_scalar(const double* a, std::size_t n, const double* s, const double* c, double scale,
                          double* j) {
    for (std::size_t r = 0; r < n; ++r) {
        const double* row = a + r * n;
        double* out = j + r * n;
        const double cr = c[r];
        const double sr = s[r];
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = scale * row[k] * (cr * c[k] + sr * s[k]);
            out[k] = v;
            if (k != r) sum += v;
        }
        out[r] = -sum;
    }
}

constexpr KernelTable kScalar{matvec_scalar, coupling_sums_scalar, jacobian_fill_scalar};

}  // namespace

namespace detail {
const KernelTable& scalar_table() noexcept { return kScalar; }
}  // namespace detail

}  // namespace gk::kernels
