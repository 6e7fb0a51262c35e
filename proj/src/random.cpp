#include "ipid/random.hpp"

namespace ipid {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x1f0d5a3bU};
    return std::mt19937_64(seq);
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : engine_(make_engine(seed, stream)) {}

double RandomSource::uniform() { return unit_(engine_); }

double RandomSource::uniform_open0() { return 1.0 - unit_(engine_); }

double RandomSource::standard_normal() { return normal_(engine_); }

}  // namespace ipid
