#pragma once

#include <optional>
#include <string>

namespace musecp {

/// A metric that may be unmeasurable for a given pair. A missing value always
/// carries a reason code ("no-tempo", "no-signal", ...); aggregation skips
/// missing values instead of zero-filling them.
struct MetricValue {
  std::optional<double> value;
  std::string reason;  // set only when value is absent

  static MetricValue of(double v) { return {v, {}}; }
  static MetricValue missing(std::string why) { return {std::nullopt, std::move(why)}; }

  bool present() const { return value.has_value(); }
};

}  // namespace musecp
