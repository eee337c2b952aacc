#pragma once

#include <iosfwd>

#include "pauserl/mdp.hpp"

namespace pauserl {

// Plain-text timeline:
//   S A H gamma T
//   @init p_0 ... p_{S-1}        (optional; uniform when absent)
//   @t <time>
//   S*A reward lines, one value each, ordered (s, a) row-major
//   S*A transition rows of S values each, same order
//   ...further @t blocks
void write_timeline(std::ostream& out, const TimeVaryingTabularMDP& mdp);
TimeVaryingTabularMDP read_timeline(std::istream& in);

}  // namespace pauserl
