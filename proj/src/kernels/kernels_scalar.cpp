#include "ipid/kernels.hpp"

namespace ipid::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double continuation_scalar(const MixtureNodes& m, double p_tilde, const double* J, std::size_t M) {
    const double q = 1.0 - p_tilde;
    if (q <= 0.0) {
        // Certain change: the posterior is 1 at every node.
        double mass = 0.0;
        for (std::size_t k = 0; k < m.count; ++k) mass += m.post_weighted[k];
        return mass * J[M - 1];
    }
    const double scale = static_cast<double>(M - 1);
    const std::size_t last = M - 2;
    double acc = 0.0;
    for (std::size_t k = 0; k < m.count; ++k) {
        const double density = p_tilde * m.post_weighted[k] + q * m.pre_weighted[k];
        const double posterior = p_tilde / (p_tilde + q * m.odds_ratio[k]);
        const double t = posterior * scale;
        std::size_t j = static_cast<std::size_t>(t);
        if (j > last) j = last;
        const double frac = t - static_cast<double>(j);
        const double value = J[j] + frac * (J[j + 1] - J[j]);
        acc += density * value;
    }
    return acc;
}

constexpr KernelTable kScalar{Isa::Scalar, &dot_scalar, &continuation_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace ipid::kernels
