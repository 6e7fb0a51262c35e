#include "ipid/quadrature.hpp"

#include "ipid/common.hpp"

namespace ipid {

SimpsonRule make_simpson_rule(double lo, double hi, std::size_t nodes) {
    require(nodes >= 3 && nodes % 2 == 1, "Simpson rule needs an odd node count >= 3");
    require(hi > lo, "Simpson rule needs hi > lo");

    SimpsonRule rule;
    rule.nodes.resize(nodes);
    rule.weights.resize(nodes);
    const double h = (hi - lo) / static_cast<double>(nodes - 1);
    for (std::size_t k = 0; k < nodes; ++k) {
        rule.nodes[k] = k + 1 == nodes ? hi : lo + h * static_cast<double>(k);
        double w = (k == 0 || k + 1 == nodes) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        rule.weights[k] = w * h / 3.0;
    }
    return rule;
}

}  // namespace ipid
