#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dynpr/error.hpp"

namespace dynpr {

enum class ScoreKind { static_rank, transient, cumulative, difference, summary, external };

inline std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::static_rank: return "static";
    case ScoreKind::transient: return "transient";
    case ScoreKind::cumulative: return "cumulative";
    case ScoreKind::difference: return "difference";
    case ScoreKind::summary: return "summary";
    case ScoreKind::external: return "external";
  }
  return "unknown";
}

inline ScoreKind parse_score_kind(std::string_view s) {
  if (s == "static") return ScoreKind::static_rank;
  if (s == "transient") return ScoreKind::transient;
  if (s == "cumulative") return ScoreKind::cumulative;
  if (s == "difference") return ScoreKind::difference;
  if (s == "summary") return ScoreKind::summary;
  if (s == "external") return ScoreKind::external;
  throw InputError("unknown score kind '" + std::string(s) + "'");
}

/// One score per node.
struct ScoreVector {
  std::vector<double> values;
  ScoreKind kind = ScoreKind::external;

  ScoreVector() = default;
  ScoreVector(std::vector<double> v, ScoreKind k) : values(std::move(v)), kind(k) {
    for (double x : values) {
      if (!std::isfinite(x)) throw InputError("score values must be finite");
    }
  }

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

}  // namespace dynpr
