#include "critrep/kernels.hpp"

#include <algorithm>
#include <limits>
#include <omp.h>

namespace critrep {

void set_threads(int n) { omp_set_num_threads(std::max(1, n)); }
int max_threads() { return omp_get_max_threads(); }

namespace kernels {

namespace {

constexpr std::size_t kRowBlock = 32;
constexpr std::size_t kColBlock = 256;
constexpr std::size_t kDepthBlock = 128;

// c[0..rows) x [0..m) += a[i0..i1) x [0..k) * b[k x m], blocked over columns
// and depth. Each output accumulates over depth in ascending order.
void block_product(const double* a, std::size_t k, std::size_t i0, std::size_t i1,
                   const double* b, std::size_t m, double* c) {
    for (std::size_t j0 = 0; j0 < m; j0 += kColBlock) {
        const std::size_t j1 = std::min(m, j0 + kColBlock);
        for (std::size_t p0 = 0; p0 < k; p0 += kDepthBlock) {
            const std::size_t p1 = std::min(k, p0 + kDepthBlock);
            for (std::size_t i = i0; i < i1; ++i) {
                const double* arow = a + i * k;
                double* crow = c + (i - i0) * m;
                for (std::size_t p = p0; p < p1; ++p) {
                    const double aip = arow[p];
                    if (aip == 0.0) continue;
                    const double* brow = b + p * m;
                    for (std::size_t j = j0; j < j1; ++j) crow[j] += aip * brow[j];
                }
            }
        }
    }
}

}  // namespace

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& out) {
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    std::fill(out.values().begin(), out.values().end(), 0.0);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* pc = out.values().data();
    const auto blocks = static_cast<std::ptrdiff_t>((n + kRowBlock - 1) / kRowBlock);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
        const std::size_t i0 = static_cast<std::size_t>(blk) * kRowBlock;
        const std::size_t i1 = std::min(n, i0 + kRowBlock);
        block_product(pa, k, i0, i1, pb, m, pc + i0 * m);
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& out) {
    const std::size_t k = a.rows(), n = a.cols(), m = b.cols();
    std::fill(out.values().begin(), out.values().end(), 0.0);
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    double* pc = out.values().data();
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double* crow = pc + i * m;
        for (std::size_t p = 0; p < k; ++p) {
            const double api = pa[p * n + i];
            if (api == 0.0) continue;
            const double* brow = pb + p * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += api * brow[j];
        }
    }
}

void gemm_nt(const Matrix& a, const Matrix& b, Matrix& out) {
    gemm_nn(a, b.transposed(), out);
}

void nearest_centroid(const Matrix& data, const Matrix& centroids,
                      std::span<std::uint32_t> assignment, std::span<double> dist2) {
    const std::size_t n = data.rows(), d = data.cols(), kc = centroids.rows();
    const Matrix ct = centroids.transposed();
    std::vector<double> cnorm(kc, 0.0);
    for (std::size_t j = 0; j < kc; ++j)
        for (double v : centroids.row(j)) cnorm[j] += v * v;

    const double* px = data.values().data();
    const double* pct = ct.values().data();
    const auto blocks = static_cast<std::ptrdiff_t>((n + kRowBlock - 1) / kRowBlock);
#pragma omp parallel
    {
        std::vector<double> dots(kRowBlock * kc);
#pragma omp for schedule(static)
        for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
            const std::size_t i0 = static_cast<std::size_t>(blk) * kRowBlock;
            const std::size_t i1 = std::min(n, i0 + kRowBlock);
            std::fill(dots.begin(), dots.end(), 0.0);
            block_product(px, d, i0, i1, pct, kc, dots.data());
            for (std::size_t i = i0; i < i1; ++i) {
                double xnorm = 0.0;
                for (double v : data.row(i)) xnorm += v * v;
                const double* drow = dots.data() + (i - i0) * kc;
                double best = std::numeric_limits<double>::infinity();
                std::uint32_t arg = 0;
                for (std::size_t j = 0; j < kc; ++j) {
                    const double dist = xnorm - 2.0 * drow[j] + cnorm[j];
                    if (dist < best) {
                        best = dist;
                        arg = static_cast<std::uint32_t>(j);
                    }
                }
                assignment[i] = arg;
                dist2[i] = std::max(0.0, best);
            }
        }
    }
}

}  // namespace kernels
}  // namespace critrep
