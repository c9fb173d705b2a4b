#pragma once

// Slow reference implementations that work directly on rational distances.
// They share no code with the library beyond FiniteMetricSpace::distance.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "scdim/metricspace.hpp"

namespace oracle {

using scdim::FiniteMetricSpace;
using scdim::Rational;

// Components by breadth-first search over the relation d <= s.
inline std::vector<std::vector<std::size_t>> components(const FiniteMetricSpace& x, const std::vector<std::size_t>& a,
                                                        const Rational& s) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> seen(a.size(), false);
  for (std::size_t start = 0; start < a.size(); ++start) {
    if (seen[start]) continue;
    std::vector<std::size_t> queue{start};
    seen[start] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (!seen[k] && x.distance(a[queue[head]], a[k]) <= s) {
          seen[k] = true;
          queue.push_back(k);
        }
      }
    }
    std::vector<std::size_t> comp;
    for (auto k : queue) comp.push_back(a[k]);
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline Rational diameter(const FiniteMetricSpace& x, const std::vector<std::size_t>& a) {
  Rational best = 0;
  for (auto p : a) {
    for (auto q : a) best = std::max(best, x.distance(p, q));
  }
  return best;
}

// Largest s-component diameter of the coloring.
inline Rational coloring_cost(const FiniteMetricSpace& x, const std::vector<std::size_t>& colors, std::size_t count,
                              const Rational& s) {
  Rational worst = 0;
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<std::size_t> cls;
    for (std::size_t p = 0; p < colors.size(); ++p) {
      if (colors[p] == c) cls.push_back(p);
    }
    for (const auto& comp : components(x, cls, s)) worst = std::max(worst, diameter(x, comp));
  }
  return worst;
}

struct Optimum {
  Rational value;
  std::vector<std::size_t> colors;  // lexicographically smallest optimal assignment
};

// Enumerates all (n+1)^|X| colorings in lexicographic order. Distances are
// replaced by their position in a locally sorted list so that the inner loop
// compares integers.
inline Optimum min_cost_coloring(const FiniteMetricSpace& x, std::size_t n, const Rational& s) {
  const std::size_t size = x.size();
  const std::size_t count = n + 1;
  std::vector<Rational> values;
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) values.push_back(x.distance(i, j));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<std::size_t> pos(size * size);
  std::vector<bool> close(size * size);
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      const Rational& d = x.distance(i, j);
      pos[i * size + j] = static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), d) - values.begin());
      close[i * size + j] = d <= s;
    }
  }
  auto cost = [&](const std::vector<std::size_t>& colors) {
    std::size_t worst = 0;
    std::vector<int> comp(size, -1);
    for (std::size_t start = 0; start < size; ++start) {
      if (comp[start] >= 0) continue;
      std::vector<std::size_t> members{start};
      comp[start] = static_cast<int>(start);
      for (std::size_t head = 0; head < members.size(); ++head) {
        for (std::size_t k = 0; k < size; ++k) {
          if (comp[k] < 0 && colors[k] == colors[start] && close[members[head] * size + k]) {
            comp[k] = static_cast<int>(start);
            members.push_back(k);
          }
        }
      }
      for (auto a : members) {
        for (auto b : members) worst = std::max(worst, pos[a * size + b]);
      }
    }
    return worst;
  };
  std::vector<std::size_t> colors(size, 0);
  std::size_t best_cost = SIZE_MAX;
  std::vector<std::size_t> best;
  for (;;) {
    const std::size_t c = cost(colors);
    if (c < best_cost) {
      best_cost = c;
      best = colors;
    }
    std::size_t k = colors.size();
    while (k > 0 && colors[k - 1] + 1 == count) colors[--k] = 0;
    if (k == 0) break;
    ++colors[k - 1];
  }
  return {values[best_cost], best};
}

}  // namespace oracle
