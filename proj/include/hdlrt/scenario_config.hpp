#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hdlrt/sim.hpp"

namespace hdlrt {

// Scenario config: line-oriented key=value blocks separated by blank lines,
// '#' comments. Keys: id, kind, n (integer or comma list), p, blocks,
// alternative, alt_params, iterations, seed, alpha, rho.
//
// alt_params carries one segment per group separated by ';', each segment a
// comma list of key=value pairs for the named construction, e.g.
//   alternative=equicorrelated
//   alt_params=a=0.5,b=0.5; a=0.6,b=0.4,mean=0.1; a=0.5,b=0.31,mean=0.1
std::vector<Scenario> parse_scenarios(std::istream& in);
std::vector<Scenario> parse_scenarios_file(const std::string& path);

}  // namespace hdlrt
