#pragma once

#include <string>
#include <utility>
#include <vector>

namespace razavy {

/// Ordered (abscissa, value) samples plus free-form string metadata.
struct SampledFunction {
  std::string kind;  // "potential" or "wavefunction"
  std::vector<double> x;
  std::vector<double> value;
  std::vector<std::pair<std::string, std::string>> metadata;

  std::size_t size() const { return x.size(); }
};

}  // namespace razavy
