// Copyright 2026 The qpec Authors
//
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

#pragma once

#include <cmath>
#include <random>
#include <string>

#include "qpec/channel.hpp"

namespace qpec {

template <typename Rng>
ComplexMatrix ginibre(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// diag(R) moved into Q.
template <typename Rng>
ComplexMatrix haar_unitary(int d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(d, d);
  const ComplexMatrix& r = qr.matrixQR();
  for (int k = 0; k < d; ++k) {
    const Complex diag = r(k, k);
    const double mag = std::abs(diag);
    q.col(k) *= mag > 0.0 ? diag / mag : Complex(1.0, 0.0);
  }
  return q;
}

template <typename Rng>
ComplexVector random_pure_state(int d, Rng& rng) {
  ComplexVector v = ginibre(d, 1, rng);
  return v / v.norm();
}

/// CPTP channel from a Haar isometry into d * environment dimensions.
template <typename Rng>
Channel random_channel(int d, int kraus_rank, Rng& rng, std::string label = "random") {
  const ComplexMatrix u = haar_unitary(d * kraus_rank, rng);
  std::vector<ComplexMatrix> kraus;
  for (int k = 0; k < kraus_rank; ++k) kraus.push_back(u.block(k * d, 0, d, d));
  return Channel(std::move(kraus), std::move(label));
}

}  // namespace qpec
