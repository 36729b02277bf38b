#pragma once

// Data-parallel inner loops. Every kernel in `critrep::kernels` is an
// OpenMP implementation; `critrep::serial` holds the plain single-threaded
// reference each one is tested against. Parallel kernels only partition
// independent outputs across threads, so their results do not depend on the
// thread count; they agree with the serial references to rounding.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "critrep/matrix.hpp"

namespace critrep {

/// Caps the OpenMP worker count; `1` forces fully serial execution.
void set_threads(int n);
int max_threads();

namespace kernels {

// Caller guarantees conformable shapes; `out` is overwritten.
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);

/// For each row of `data`, index of the nearest row of `centroids` under
/// squared Euclidean distance (ties to the lowest index) and that distance.
void nearest_centroid(const Matrix& data, const Matrix& centroids,
                      std::span<std::uint32_t> assignment, std::span<double> dist2);

}  // namespace kernels

namespace serial {

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out);
void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out);
void nearest_centroid(const Matrix& data, const Matrix& centroids,
                      std::span<std::uint32_t> assignment, std::span<double> dist2);

}  // namespace serial

}  // namespace critrep
