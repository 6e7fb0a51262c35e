#pragma once

// Inner loops of the Bellman sweeps. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2+FMA variant chosen at runtime. The
// variants differ from the reference only by floating-point summation order.

#include <cstddef>
#include <optional>

namespace ipid::kernels {

enum class Isa { Scalar, Avx2 };

const char* isa_name(Isa isa);

// Quadrature nodes of one continuation integral, pre-multiplied by the rule
// weights: post_weighted[k] = w_k g(x_k), pre_weighted[k] = w_k f(x_k), and
// odds_ratio[k] = f(x_k) / g(x_k) computed from log densities.
struct MixtureNodes {
    const double* post_weighted = nullptr;
    const double* pre_weighted = nullptr;
    const double* odds_ratio = nullptr;
    std::size_t count = 0;
};

// sum_k (p~ gw_k + (1 - p~) fw_k) * J(p~ / (p~ + (1 - p~) r_k)) where J is the
// piecewise-linear interpolant of grid_values on a uniform grid over [0, 1].
using ContinuationFn = double (*)(const MixtureNodes& nodes, double p_tilde,
                                  const double* grid_values, std::size_t grid_size);
using DotFn = double (*)(const double* a, const double* b, std::size_t n);

struct KernelTable {
    Isa isa;
    DotFn dot;
    ContinuationFn continuation;
};

const KernelTable& scalar_table();
// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_supports(Isa isa);

// Best supported table, unless overridden by force_isa() or by setting the
// environment variable IPID_FORCE_SCALAR=1 before first use.
const KernelTable& active();
Isa active_isa();
// Throws when the requested variant is unavailable. nullopt restores detection.
void force_isa(std::optional<Isa> isa);

}  // namespace ipid::kernels
