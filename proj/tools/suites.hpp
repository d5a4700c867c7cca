#pragma once

#include <iosfwd>

namespace fplab::suites {

// Self-contained property suites behind `fp verify`. Each logs one line per
// check and returns true iff everything passed. quick trims sizes for CI.
bool core_suite(bool quick, std::ostream& log);
bool gn_suite(bool quick, std::ostream& log);
bool bounds_suite(bool quick, std::ostream& log);

}  // namespace fplab::suites
