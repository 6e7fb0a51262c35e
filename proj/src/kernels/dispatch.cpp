#include <atomic>
#include <cstdlib>
#include <string>

#include "ipid/common.hpp"
#include "ipid/kernels.hpp"

namespace ipid::kernels {

#ifndef IPID_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(IPID_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
            return avx2_table() != nullptr && __builtin_cpu_supports("avx2") &&
                   __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

namespace {

const KernelTable* detect() {
    const char* env = std::getenv("IPID_FORCE_SCALAR");
    if (env != nullptr && std::string(env) == "1") return &scalar_table();
    if (cpu_supports(Isa::Avx2)) return avx2_table();
    return &scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& active() {
    const KernelTable* table = g_active.load(std::memory_order_acquire);
    if (table == nullptr) {
        table = detect();
        g_active.store(table, std::memory_order_release);
    }
    return *table;
}

Isa active_isa() { return active().isa; }

void force_isa(std::optional<Isa> isa) {
    if (!isa) {
        g_active.store(detect(), std::memory_order_release);
        return;
    }
    require(cpu_supports(*isa), std::string("kernel variant not available: ") + isa_name(*isa));
    g_active.store(*isa == Isa::Avx2 ? avx2_table() : &scalar_table(), std::memory_order_release);
}

}  // namespace ipid::kernels
