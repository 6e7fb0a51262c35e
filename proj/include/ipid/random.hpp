#pragma once

#include <cstdint>
#include <random>

namespace ipid {

// Per-stream random source. Every (seed, stream index) pair gets its own
// engine so that path i of a simulation is the same no matter which thread
// draws it or how many paths are requested.
class RandomSource {
public:
    RandomSource(std::uint64_t seed, std::uint64_t stream);

    double uniform();          // [0, 1)
    double uniform_open0();    // (0, 1]
    double standard_normal();

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace ipid
