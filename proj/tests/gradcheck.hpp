// Copyright 2026 The farda Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Central finite-difference helpers shared by the gradient tests.

#ifndef FARDA_TESTS_GRADCHECK_HPP_
#define FARDA_TESTS_GRADCHECK_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "farda/random.hpp"

namespace gradcheck {

inline constexpr double kStep = 1e-6;

// |a - n| / max(|a|, |n|, floor). With a step of 1e-6 the central
// difference carries ~1e-10 of rounding noise, so gradients smaller than
// the floor are compared on an absolute scale.
inline double rel_error(double analytic, double numeric, double floor = 1e-4) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), floor});
}

// Perturbs values[k] for a sample of indices and compares the central
// difference of `loss` with grad[k]. Returns the worst relative error.
inline double check(std::vector<double>& values, const std::vector<double>& grad,
                    const std::function<double()>& loss, std::size_t max_entries,
                    farda::Rng& rng, double step = kStep) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (idx.size() > max_entries) {
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(max_entries);
  }
  double worst = 0.0;
  for (std::size_t k : idx) {
    const double saved = values[k];
    values[k] = saved + step;
    const double up = loss();
    values[k] = saved - step;
    const double down = loss();
    values[k] = saved;
    worst = std::max(worst, rel_error(grad[k], (up - down) / (2 * step)));
  }
  return worst;
}

inline std::vector<double> random_vector(std::size_t n, farda::Rng& rng,
                                         double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = farda::uniform(rng, lo, hi);
  return v;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace gradcheck

#endif  // FARDA_TESTS_GRADCHECK_HPP_
