#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "npstrata/polygon.hpp"

namespace npstrata {

class StrataError : public std::runtime_error {
 public:
  enum class Code { OutOfRange };

  StrataError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Dimension of A_g: g(g+1)/2.
long long dim_ag(int g);

// Codimension of the Newton stratum of xi in A_g: the number of lattice
// points (x, y) with 1 <= x <= g and 0 <= y < xi(x), evaluated in exact
// rational arithmetic.
long long codim_ag(const NewtonPolygon& xi);

// Expected dimension of the stratum in M_g: max{0, 3g-3 - codim_ag(xi)},
// except the genus-1 ordinary case, which is 1 (the coarse space M_{1,1}).
long long e_dim(const NewtonPolygon& xi);

// Dimension of the p-rank-f stratum of M_g: 2g-3+f.  Defined for g >= 2 and
// 0 <= f <= g only; throws StrataError(OutOfRange) otherwise.
long long prank_stratum_dim(int g, int f);

// Self-check: dim_ag(g) - codim_ag(ss^g) == floor(g^2/4).
bool supersingular_dim_identity(int g);

struct StratumMetrics {
  int g = 0;
  int f = 0;  // p-rank
  long long codim_ag = 0;
  long long e_dim = 0;
  std::optional<long long> prank_stratum_dim;  // absent for g = 1
};

StratumMetrics compute_metrics(const NewtonPolygon& xi);

}  // namespace npstrata
