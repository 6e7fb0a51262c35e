#pragma once

#include <cstddef>
#include <vector>

namespace ipid {

// Composite Simpson rule on [lo, hi] with an odd number of equally spaced nodes.
struct SimpsonRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

SimpsonRule make_simpson_rule(double lo, double hi, std::size_t nodes);

}  // namespace ipid
