#include "npstrata/oracle.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace npstrata {

namespace {

struct PathSegment {
  long long dx, dy;
};

// Recursively extend a convex path by segments of strictly increasing slope
// in [0,1] until it reaches (2g, g), collecting the segment lists.
void extend_path(long long x, long long y, long long g, long long prev_dy, long long prev_dx,
                 std::vector<PathSegment>& segs, std::vector<std::vector<PathSegment>>& out) {
  if (x == 2 * g && y == g) {
    out.push_back(segs);
    return;
  }
  for (long long dx = 1; x + dx <= 2 * g; ++dx) {
    for (long long dy = 0; dy <= dx && y + dy <= g; ++dy) {
      // strictly steeper than the previous segment keeps vertices canonical
      if (dy * prev_dx <= prev_dy * dx) continue;
      segs.push_back({dx, dy});
      extend_path(x + dx, y + dy, g, dy, dx, segs, out);
      segs.pop_back();
    }
  }
}

}  // namespace

std::vector<NewtonPolygon> brute_enumerate(int g) {
  if (g < 1) throw std::invalid_argument("genus must be >= 1");
  if (g > 8)
    throw OracleError(OracleError::Code::BudgetExceeded,
                      "brute_enumerate budget is g <= 8 (got g=" + std::to_string(g) + ")");

  std::vector<std::vector<PathSegment>> paths;
  std::vector<PathSegment> segs;
  extend_path(0, 0, g, -1, 1, segs, paths);

  std::vector<NewtonPolygon> out;
  for (const auto& path : paths) {
    // width of each slope, keyed by (dy, dx) in lowest terms
    std::map<std::pair<long long, long long>, long long> width;
    for (const auto& s : path) {
      long long q = std::gcd(s.dy, s.dx);
      width[{s.dy / q, s.dx / q}] += s.dx;
    }
    bool symmetric = true;
    for (const auto& [slope, w] : width) {
      auto mirror = width.find({slope.second - slope.first, slope.second});
      if (mirror == width.end() || mirror->second != w) {
        symmetric = false;
        break;
      }
    }
    if (!symmetric) continue;
    std::vector<FactorEntry> entries;
    for (const auto& [slope, w] : width) {
      auto [d, h] = slope;
      entries.push_back({static_cast<int>(h - d), static_cast<int>(d),
                         static_cast<int>(w / h)});
    }
    out.push_back(NewtonPolygon::make(entries));
  }
  std::sort(out.begin(), out.end());
  return out;
}

long long brute_codim(const NewtonPolygon& xi) {
  // Own height evaluation: the factor list arrives slope-sorted; accumulate
  // segment end-points and express xi(x) as the fraction num/den.
  auto factors = xi.factor_list();
  long long g = xi.genus();
  long long count = 0;
  for (long long x = 1; x <= g; ++x) {
    long long num = 0, den = 1;  // xi(x)
    long long x0 = 0, y0 = 0;
    for (const auto& [c, d, m] : factors) {
      long long run = m * (c + d);
      if (x <= x0 + run) {
        den = c + d;
        num = y0 * den + (x - x0) * d;
        break;
      }
      x0 += run;
      y0 += m * d;
    }
    for (long long y = 0; y <= g; ++y) {
      if (y * den < num) ++count;
    }
  }
  return count;
}

std::vector<PolygonPartition> brute_partitions(const NewtonPolygon& xi) {
  // Expand to individual factor instances, then try every subset as the
  // left-hand side, keeping the symmetric ones.
  std::vector<std::pair<int, int>> instances;
  for (const auto& [c, d, m] : xi.factor_list()) {
    for (long long k = 0; k < m; ++k) instances.emplace_back(static_cast<int>(c), static_cast<int>(d));
  }
  std::size_t n = instances.size();
  if (n > 24)
    throw OracleError(OracleError::Code::BudgetExceeded,
                      "brute_partitions budget is 24 factor instances (got " +
                          std::to_string(n) + ")");

  std::set<PolygonPartition> out;
  for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
    std::map<std::pair<int, int>, int> left_count;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) ++left_count[instances[i]];
    }
    bool symmetric = true;
    for (const auto& [cd, cnt] : left_count) {
      auto mirror = left_count.find({cd.second, cd.first});
      if (mirror == left_count.end() || mirror->second != cnt) {
        symmetric = false;
        break;
      }
    }
    if (!symmetric) continue;
    std::vector<FactorEntry> l, r;
    std::map<std::pair<int, int>, int> right_count;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) continue;
      ++right_count[instances[i]];
    }
    for (const auto& [cd, cnt] : left_count) l.push_back({cd.first, cd.second, cnt});
    for (const auto& [cd, cnt] : right_count) r.push_back({cd.first, cd.second, cnt});
    out.insert(PolygonPartition(NewtonPolygon::make(l), NewtonPolygon::make(r)));
  }
  return {out.begin(), out.end()};
}

}  // namespace npstrata
