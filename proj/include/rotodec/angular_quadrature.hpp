// Deterministic product quadrature on S^2 and on products of spheres.
//
// A grid of band limit L is Gauss-Legendre in cos(theta), ceil((L+1)/2)
// points, times a uniform rule in phi with L+1 points; it integrates every
// spherical harmonic with 1 <= l <= L to zero and every band-limited
// integrand of degree <= L (polynomial in cos theta, trigonometric in phi)
// exactly.
//
// Summation contract: nodes are enumerated in one canonical order
// (theta-major, then phi; product grids lexicographic with the first grid
// outermost), accumulated serially within fixed-size index blocks, and the
// block partials are combined by a pairwise tree. The result is therefore
// bitwise identical for any worker count.
#pragma once

#include <atomic>
#include <complex>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rotodec/core_types.hpp"
#include "rotodec/gauss_legendre.hpp"

namespace rotodec {

struct SphereNode {
    UnitDirection dir;
    Vec3 u;   // cached Cartesian direction
    double w; // quadrature weight; weights sum to 4 pi
};

class SphereGrid {
public:
    static SphereGrid build(int order) {
        if (order < 1 || order > 64)
            throw std::invalid_argument("SphereGrid: order must be in [1, 64]");
        SphereGrid g;
        g.order_ = order;
        g.n_theta_ = (order + 2) / 2; // ceil((L+1)/2)
        g.n_phi_ = order + 1;
        const auto gl = gauss_legendre(g.n_theta_);
        const double wphi = 2.0 * pi / g.n_phi_;
        g.nodes_.reserve(static_cast<std::size_t>(g.n_theta_) * g.n_phi_);
        for (const auto& n : gl) {
            const double theta = std::acos(std::min(1.0, std::max(-1.0, n.x)));
            for (int j = 0; j < g.n_phi_; ++j) {
                const double phi = wphi * j;
                UnitDirection d(theta, phi);
                g.nodes_.push_back({d, d.unit_vector(), n.w * wphi});
            }
        }
        return g;
    }

    int order() const { return order_; }
    int theta_count() const { return n_theta_; }
    int phi_count() const { return n_phi_; }
    std::size_t size() const { return nodes_.size(); }
    const SphereNode& node(std::size_t i) const { return nodes_[i]; }
    std::span<const SphereNode> nodes() const { return nodes_; }

private:
    int order_ = 0, n_theta_ = 0, n_phi_ = 0;
    std::vector<SphereNode> nodes_;
};

inline SphereGrid build_sphere_grid(int order) { return SphereGrid::build(order); }

// Worker count: explicit override > ROTODEC_THREADS > hardware concurrency.
inline int worker_count(int override_workers = 0) {
    if (override_workers > 0) return std::min(override_workers, 64);
    if (const char* env = std::getenv("ROTODEC_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min(v, 64L));
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(std::min(hc, 64u)) : 1;
}

namespace detail {

inline constexpr std::size_t kReductionBlock = 8192;

// Run fn(block_index) for block_index in [0, n_blocks), distributing blocks
// over workers. Each block writes only its own output slot, so the final
// combination step is independent of the schedule.
template <class Fn>
void parallel_blocks(std::size_t n_blocks, int workers, Fn&& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1, std::memory_order_relaxed);
            if (b >= n_blocks) return;
            fn(b);
        }
    };
    std::vector<std::thread> pool;
    const int spawn = static_cast<int>(std::min<std::size_t>(workers, n_blocks));
    pool.reserve(spawn);
    for (int t = 0; t < spawn; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

// In-place pairwise tree over block partials (canonical block order).
template <class T>
T pairwise_tree(std::vector<T>& v) {
    if (v.empty()) return T{};
    std::size_t n = v.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (n % 2) {
            v[half] = v[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return v[0];
}

// Deterministic blocked sum of eval(i) for i in [0, n).
template <class T, class Eval>
T blocked_sum(std::size_t n, int workers, Eval&& eval) {
    if (n == 0) return T{};
    const std::size_t n_blocks = (n + kReductionBlock - 1) / kReductionBlock;
    std::vector<T> partial(n_blocks, T{});
    parallel_blocks(n_blocks, workers, [&](std::size_t b) {
        const std::size_t lo = b * kReductionBlock;
        const std::size_t hi = std::min(n, lo + kReductionBlock);
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) acc += eval(i);
        partial[b] = acc;
    });
    return pairwise_tree(partial);
}

} // namespace detail

// Integral of f over S^2; f is invoked with the node's UnitDirection and may
// return double or std::complex<double>.
template <class F>
auto integrate_s2(const SphereGrid& grid, F&& f, int workers = 0) {
    using T = std::invoke_result_t<F, const UnitDirection&>;
    const int w = worker_count(workers);
    return detail::blocked_sum<T>(grid.size(), w, [&](std::size_t i) -> T {
        const SphereNode& n = grid.node(i);
        return n.w * f(n.dir);
    });
}

// Tensor-product quadrature over 2..4 spheres. The node stream is generated
// from the flat index; no product table is materialized.
template <class F, class... Grids>
double integrate_product(F&& f, const Grids&... grids) {
    static_assert(sizeof...(Grids) >= 2 && sizeof...(Grids) <= 4,
                  "integrate_product: supports 2 to 4 spheres");
    const std::array<const SphereGrid*, sizeof...(Grids)> gs{&grids...};
    std::size_t total = 1;
    for (const auto* g : gs) total *= g->size();
    const int w = worker_count(0);
    return detail::blocked_sum<double>(total, w, [&](std::size_t idx) -> double {
        std::array<const SphereNode*, sizeof...(Grids)> node{};
        for (int d = static_cast<int>(sizeof...(Grids)) - 1; d >= 0; --d) {
            const std::size_t sz = gs[d]->size();
            node[d] = &gs[d]->node(idx % sz);
            idx /= sz;
        }
        double weight = 1.0;
        for (const auto* n : node) weight *= n->w;
        return weight * [&]<std::size_t... I>(std::index_sequence<I...>) {
            return f(node[I]->dir...);
        }(std::make_index_sequence<sizeof...(Grids)>{});
    });
}

} // namespace rotodec
