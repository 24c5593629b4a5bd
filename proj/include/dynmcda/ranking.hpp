#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"

namespace dynmcda {

enum class Method { cba, staticMcda, dynamicMcda };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::cba: return "cba";
    case Method::staticMcda: return "staticMcda";
    case Method::dynamicMcda: return "dynamicMcda";
  }
  return "unknown";
}

inline Method method_from_string(std::string_view s) {
  if (s == "cba") return Method::cba;
  if (s == "staticMcda") return Method::staticMcda;
  if (s == "dynamicMcda") return Method::dynamicMcda;
  throw ValidationError("method", "unknown method '" + std::string(s) + "'");
}

struct RankingOutcome {
  Method method = Method::dynamicMcda;
  std::map<int, double> totals;  // option id -> total
  std::vector<int> order;        // best first

  int best() const { return order.empty() ? 0 : order.front(); }
};

// Descending total, ties by ascending option id. Every ranking in the
// library goes through this so the tie rule is global.
inline std::vector<int> order_by_total(const std::map<int, double>& totals) {
  std::vector<int> ids;
  ids.reserve(totals.size());
  for (const auto& [id, _] : totals) ids.push_back(id);
  std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
    const double ta = totals.at(a);
    const double tb = totals.at(b);
    if (ta != tb) return ta > tb;
    return a < b;
  });
  return ids;
}

inline RankingOutcome make_ranking(Method method, std::map<int, double> totals) {
  if (totals.empty()) throw ValidationError("options", "cannot rank an empty option set");
  RankingOutcome out;
  out.method = method;
  out.order = order_by_total(totals);
  out.totals = std::move(totals);
  return out;
}

}  // namespace dynmcda
