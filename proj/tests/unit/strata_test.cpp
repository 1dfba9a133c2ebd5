#include <doctest.h>

#include "npstrata/polygon.hpp"
#include "npstrata/strata.hpp"

using namespace npstrata;

namespace {
NewtonPolygon P(const std::string& s) { return NewtonPolygon::parse(s); }

NewtonPolygon ord_pad(int ord_count, const std::string& tail) {
  if (ord_count == 0) return P(tail);
  return P("ord^" + std::to_string(ord_count) + "+" + tail);
}
}  // namespace

TEST_CASE("dim_Ag") {
  CHECK(dim_ag(1) == 1);
  CHECK(dim_ag(4) == 10);
  CHECK(dim_ag(12) == 78);
}

TEST_CASE("codimension anchors") {
  CHECK(codim_ag(P("ss^4")) == 6);
  for (int d = 3; d <= 8; ++d) {
    CHECK(codim_ag(nu_zero_polygon(d)) == d);
    CHECK(codim_ag(direct_sum(nu_zero_polygon(d), P("ss"))) == d + 2);
  }
  for (int g = 1; g <= 12; ++g) {
    CHECK(codim_ag(ordinary_polygon(g)) == 0);
    if (g >= 1) CHECK(codim_ag(ord_pad(g - 1, "ss")) == 1);
    if (g >= 2) CHECK(codim_ag(ord_pad(g - 2, "ss^2")) == 2);
    if (g >= 3) CHECK(codim_ag(ord_pad(g - 3, "nu3")) == 3);
  }
  for (int g = 3; g <= 10; ++g) CHECK(codim_ag(ord_pad(g - 3, "ss^3")) == 4);
  for (int g = 4; g <= 10; ++g) {
    CHECK(codim_ag(ord_pad(g - 4, "nu3+ss")) == 5);
    CHECK(codim_ag(ord_pad(g - 4, "ss^4")) == 6);
  }
  // Padding with ordinary factors never changes the codimension.
  for (const auto& xi : enumerate_polygons(4)) {
    CHECK(codim_ag(direct_sum(P("ord^3"), xi)) == codim_ag(xi));
  }
}

TEST_CASE("expected dimension e(xi, M_g)") {
  CHECK(e_dim(P("ss^4")) == 3);
  CHECK(e_dim(P("nu5")) == 7);
  CHECK(e_dim(P("ord")) == 1);  // genus-1 ordinary convention
  CHECK(e_dim(P("ss")) == 0);   // max{0, 0 - 1}
  CHECK(e_dim(P("ord^5")) == 12);
  CHECK(e_dim(P("ss^5")) == 3);
  CHECK(e_dim(P("nu3+ss^2")) == 5);
  for (int g = 2; g <= 12; ++g) CHECK(e_dim(ordinary_polygon(g)) == 3 * g - 3);
}

TEST_CASE("p-rank stratum dimension") {
  CHECK(prank_stratum_dim(2, 0) == 1);
  CHECK(prank_stratum_dim(5, 0) == 7);
  CHECK(prank_stratum_dim(5, 5) == 12);
  CHECK(prank_stratum_dim(10, 6) == 23);
  CHECK_THROWS_AS(prank_stratum_dim(1, 0), StrataError);
  CHECK_THROWS_AS(prank_stratum_dim(3, -1), StrataError);
  CHECK_THROWS_AS(prank_stratum_dim(3, 4), StrataError);
}

TEST_CASE("supersingular dimension identity") {
  for (int g = 1; g <= 12; ++g) {
    CHECK(supersingular_dim_identity(g));
    CHECK(dim_ag(g) - codim_ag(supersingular_polygon(g)) == (g * g) / 4);
  }
}

TEST_CASE("compute_metrics bundles the numbers") {
  StratumMetrics m = compute_metrics(P("nu3+ss"));
  CHECK(m.g == 4);
  CHECK(m.f == 0);
  CHECK(m.codim_ag == 5);
  CHECK(m.e_dim == 4);
  REQUIRE(m.prank_stratum_dim);
  CHECK(*m.prank_stratum_dim == 5);

  StratumMetrics g1 = compute_metrics(P("ord"));
  CHECK(g1.g == 1);
  CHECK(g1.e_dim == 1);
  CHECK_FALSE(g1.prank_stratum_dim);
}
