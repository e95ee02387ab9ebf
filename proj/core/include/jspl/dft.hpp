// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "jspl/types.hpp"

namespace jspl {

// Unitary DFT matrix F with F(a,b) = exp(-j*2*pi*a*b/n) / sqrt(n).
// Cached per size; safe to call concurrently.
const MatrixXcd& dftMatrix(int n);
const MatrixXcd& idftMatrix(int n);  // F^H, also unitary

// Doppler (and angle) axes are stored in natural signed order: storage
// column c holds index k = c - n/2. DFT routines want bins 0..n-1 with
// negative frequencies in the upper half. These rotations convert between
// the two layouts losslessly; for even n they are mutual inverses.
MatrixXcd dopplerNaturalToDft(const MatrixXcd& x);
MatrixXcd dopplerDftToNatural(const MatrixXcd& x);

}  // namespace jspl
