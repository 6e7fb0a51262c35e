#pragma once

// Plain-text periodic MDP instances.
//
//   states 3
//   actions 2
//   period 2
//   discount 0.9
//   transition <stage> <state> <action> <p_0> ... <p_{S-1}>
//   cost <stage> <state> <action> <c>
//
// '#' starts a comment. The four header lines come first, in any order.
// Every (stage, state, action) needs exactly one transition and one cost.

#include <istream>
#include <ostream>
#include <string>

#include "ipid/periodic_mdp.hpp"

namespace ipid {

PeriodicMdp parse_mdp_instance(std::istream& in, const std::string& source);
PeriodicMdp load_mdp_instance(const std::string& path);
void write_mdp_instance(std::ostream& out, const PeriodicMdp& mdp);

}  // namespace ipid
