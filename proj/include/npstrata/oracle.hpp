#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "npstrata/polygon.hpp"

namespace npstrata {

// Brute-force reference implementations used by the test suite and the CLI
// selfcheck.  They deliberately share no evaluation code with the main
// library: enumeration walks raw convex lattice paths, the codimension scan
// re-derives polygon heights from the factor list with its own fraction
// arithmetic, and partition splitting tries every subset of factor
// instances.

class OracleError : public std::runtime_error {
 public:
  enum class Code { BudgetExceeded };

  OracleError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// All symmetric Newton polygons of genus g, found by exhaustive search over
// convex integer-breakpoint lattice paths (0,0) -> (2g,g).  Budget: g <= 8.
std::vector<NewtonPolygon> brute_enumerate(int g);

// Lattice-point count below xi: scans every (x, y) with 1 <= x <= g,
// 0 <= y <= g and tests y < xi(x) in exact integer arithmetic.
long long brute_codim(const NewtonPolygon& xi);

// Every split of xi into two symmetric sub-polygons, by subset search over
// the expanded factor instances.  Budget: at most 24 instances.
std::vector<PolygonPartition> brute_partitions(const NewtonPolygon& xi);

}  // namespace npstrata
