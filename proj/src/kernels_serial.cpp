#include <limits>

#include "critrep/kernels.hpp"

namespace critrep::serial {

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& out) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < a.cols(); ++p) acc += a(i, p) * b(p, j);
            out(i, j) = acc;
        }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < a.rows(); ++p) acc += a(p, i) * b(p, j);
            out(i, j) = acc;
        }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < a.cols(); ++p) acc += a(i, p) * b(j, p);
            out(i, j) = acc;
        }
}

void nearest_centroid(const Matrix& data, const Matrix& centroids,
                      std::span<std::uint32_t> assignment, std::span<double> dist2) {
    for (std::size_t i = 0; i < data.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t arg = 0;
        for (std::size_t j = 0; j < centroids.rows(); ++j) {
            double dist = 0.0;
            for (std::size_t p = 0; p < data.cols(); ++p) {
                const double diff = data(i, p) - centroids(j, p);
                dist += diff * diff;
            }
            if (dist < best) {
                best = dist;
                arg = static_cast<std::uint32_t>(j);
            }
        }
        assignment[i] = arg;
        dist2[i] = best;
    }
}

}  // namespace critrep::serial
