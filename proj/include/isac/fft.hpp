#pragma once

#include <span>

#include "isac/common.hpp"

namespace isac::fft {

enum class Direction { kForward, kInverse };

/// In-place unitary DFT (scaled by 1/sqrt(n)). Forward uses exp(-j...).
/// Safe to call concurrently; plans are cached per (length, direction).
void transform(std::span<cplx> data, Direction dir);

inline void forward(std::span<cplx> data) { transform(data, Direction::kForward); }
inline void inverse(std::span<cplx> data) { transform(data, Direction::kInverse); }

/// Rotate so that bin 0 lands at index floor(n/2).
void fftshift(std::span<cplx> data);

}  // namespace isac::fft
