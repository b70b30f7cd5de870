#pragma once

#include <cstdint>
#include <memory>
#include <vector>

namespace pntm::detail {

// In-place complex transforms over contiguous (re, im) arrays of length n.
// sign = -1: forward DFT; sign = +1: inverse direction, unnormalized.
// Power-of-two lengths run the iterative radix-2 path; everything else goes
// through Bluestein's chirp-z reformulation on a padded power of two.
// All arithmetic is double; f32 tensors convert at the boundary.
struct FftPlan;

std::shared_ptr<const FftPlan> fft_plan(int64_t n);

void fft_execute(const FftPlan& plan, double* re, double* im, int sign);

// Batched transform: rows of `packed` are [re[0..n), im[0..n)] blocks.
void fft_batch(const FftPlan& plan, double* packed, int64_t batch, int sign);

}  // namespace pntm::detail
