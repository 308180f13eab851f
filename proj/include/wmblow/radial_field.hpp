#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wmblow/numerics.hpp"

namespace wmblow {

/// A function of the radial variable sampled on a strictly increasing grid.
/// `dvalue` holds the first derivative when the producer knows it, else empty.
struct RadialField {
  std::vector<double> R;
  std::vector<double> value;
  std::vector<double> dvalue;

  std::size_t size() const { return R.size(); }

  double at(double r) const {
    if (!dvalue.empty()) return num::hermite_sample(R, value, dvalue, r);
    return num::linear_sample(R, value, r);
  }
};

}  // namespace wmblow
