#include "npstrata/strata.hpp"

namespace npstrata {

long long dim_ag(int g) {
  if (g < 1) throw StrataError(StrataError::Code::OutOfRange, "dim_ag requires g >= 1");
  return static_cast<long long>(g) * (g + 1) / 2;
}

long long codim_ag(const NewtonPolygon& xi) {
  // Count lattice points strictly below the polygon over 1 <= x <= g; by
  // symmetry of xi this half-window count is the full codimension.
  long long count = 0;
  for (long long x = 1; x <= xi.genus(); ++x) {
    count += rational_ceil(xi.value_at(x));
  }
  return count;
}

long long e_dim(const NewtonPolygon& xi) {
  int g = xi.genus();
  if (g == 1 && xi.p_rank() == 1) return 1;  // M_{1,1} has dimension 1
  long long v = 3LL * g - 3 - codim_ag(xi);
  return v > 0 ? v : 0;
}

long long prank_stratum_dim(int g, int f) {
  if (g < 2 || f < 0 || f > g) {
    throw StrataError(StrataError::Code::OutOfRange,
                      "prank_stratum_dim requires g >= 2 and 0 <= f <= g (got g=" +
                          std::to_string(g) + ", f=" + std::to_string(f) + ")");
  }
  return 2LL * g - 3 + f;
}

bool supersingular_dim_identity(int g) {
  if (g < 1) throw StrataError(StrataError::Code::OutOfRange, "requires g >= 1");
  long long lhs = dim_ag(g) - codim_ag(supersingular_polygon(g));
  return lhs == static_cast<long long>(g) * g / 4;
}

StratumMetrics compute_metrics(const NewtonPolygon& xi) {
  StratumMetrics m;
  m.g = xi.genus();
  m.f = xi.p_rank();
  m.codim_ag = codim_ag(xi);
  m.e_dim = npstrata::e_dim(xi);
  if (m.g >= 2) m.prank_stratum_dim = prank_stratum_dim(m.g, m.f);
  return m;
}

}  // namespace npstrata
