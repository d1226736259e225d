#pragma once

#include "types.hpp"

namespace csmri::fft {

/*
 * Unitary 1-D DFT, DC at index 0:
 *   forward  X[f] = n^-1/2 sum_j x[j] exp(-2 pi i f j / n)
 *   inverse  x[j] = n^-1/2 sum_f X[f] exp(+2 pi i f j / n)
 * `stride` walks the sequence in place. Safe to call concurrently.
 */
void forward(Cx *data, Index n, Index stride = 1);
void inverse(Cx *data, Index n, Index stride = 1);

} // namespace csmri::fft
