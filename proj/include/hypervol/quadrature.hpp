#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "hypervol/gram.hpp"
#include "hypervol/types.hpp"

#ifdef HYPERVOL_HAVE_OPENMP
#include <omp.h>
#endif

namespace hypervol {

struct QuadratureOptions {
    double target_err = 1e-8;
    long max_regions = 4'000'000;
    int max_sweeps = 200;
    Exec exec = default_exec();
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evals = 0;
    int sweeps = 0;
    bool converged = false;
};

namespace detail {

// Grundmann-Moller cubature rule of index s (polynomial degree 2s+1) on the
// n-simplex. Points are stored in barycentric coordinates; Q = Vol * n! *
// sum_i w_i f(x_i).
struct GMRule {
    std::vector<std::vector<double>> bary;
    std::vector<double> weight;
};

inline void compositions(int total, int slots, std::vector<int>& cur,
                         std::vector<std::vector<int>>& out) {
    if (slots == 1) {
        cur.push_back(total);
        out.push_back(cur);
        cur.pop_back();
        return;
    }
    for (int v = 0; v <= total; ++v) {
        cur.push_back(v);
        compositions(total - v, slots - 1, cur, out);
        cur.pop_back();
    }
}

inline GMRule gm_rule(int n, int s) {
    GMRule rule;
    const int d = 2 * s + 1;
    double nfact = 1.0;
    for (int i = 2; i <= n; ++i) nfact *= i;
    for (int i = 0; i <= s; ++i) {
        double w = std::pow(2.0, -2.0 * s) * std::pow(double(d + n - 2 * i), double(d));
        double denom = 1.0;
        for (int j = 2; j <= i; ++j) denom *= j;
        for (int j = 2; j <= d + n - i; ++j) denom *= j;
        w /= denom;
        if (i % 2 == 1) w = -w;
        w *= nfact;
        std::vector<std::vector<int>> betas;
        std::vector<int> cur;
        compositions(s - i, n + 1, cur, betas);
        for (const auto& beta : betas) {
            std::vector<double> lam(n + 1);
            for (int j = 0; j <= n; ++j) lam[j] = double(2 * beta[j] + 1) / double(d + n - 2 * i);
            rule.bary.push_back(std::move(lam));
            rule.weight.push_back(w);
        }
    }
    return rule;
}

struct SimplexRegion {
    int dim = 0;
    std::array<std::array<double, 4>, 5> v{};  // vertices, v[i][0..dim-1]
    double volume = 0.0;
    double value = 0.0;
    double err = 0.0;
};

template <class F>
void evaluate_region(SimplexRegion& r, F&& f, const GMRule& fine, const GMRule& coarse) {
    std::array<double, 4> p{};
    auto apply = [&](const GMRule& rule) {
        double acc = 0.0;
        for (size_t q = 0; q < rule.bary.size(); ++q) {
            const auto& lam = rule.bary[q];
            for (int c = 0; c < r.dim; ++c) {
                double x = 0.0;
                for (int i = 0; i <= r.dim; ++i) x += lam[i] * r.v[i][c];
                p[c] = x;
            }
            acc += rule.weight[q] * f(p.data(), r.dim);
        }
        return acc * r.volume;
    };
    double qf = apply(fine);
    double qc = apply(coarse);
    r.value = qf;
    r.err = std::abs(qf - qc);
}

inline void bisect_longest_edge(const SimplexRegion& r, SimplexRegion& a, SimplexRegion& b) {
    int bi = 0, bj = 1;
    double best = -1.0;
    for (int i = 0; i <= r.dim; ++i)
        for (int j = i + 1; j <= r.dim; ++j) {
            double d2 = 0.0;
            for (int c = 0; c < r.dim; ++c) {
                double t = r.v[i][c] - r.v[j][c];
                d2 += t * t;
            }
            if (d2 > best) {
                best = d2;
                bi = i;
                bj = j;
            }
        }
    std::array<double, 4> mid{};
    for (int c = 0; c < r.dim; ++c) mid[c] = 0.5 * (r.v[bi][c] + r.v[bj][c]);
    a = r;
    b = r;
    a.v[bi] = mid;
    b.v[bj] = mid;
    a.volume = b.volume = 0.5 * r.volume;
}

}  // namespace detail

// Deterministic adaptive integration of f over the Euclidean simplex spanned
// by `vertices` (dim <= 4). Refinement proceeds in sweeps that bisect every
// region whose local error exceeds a share of the budget; region evaluation
// order is fixed, so Serial and Parallel execution give identical bits.
template <class F>
QuadratureResult integrate_over_simplex(const std::vector<VectorR>& vertices, F&& f,
                                        const QuadratureOptions& opt) {
    const int dim = int(vertices.size()) - 1;
    if (dim < 1 || dim > 4)
        throw std::invalid_argument("integrate_over_simplex: dimension must be 1..4");
    for (const auto& v : vertices)
        if (v.size() != dim)
            throw std::invalid_argument("integrate_over_simplex: vertex size mismatch");

    using detail::SimplexRegion;
    SimplexRegion root;
    root.dim = dim;
    for (int i = 0; i <= dim; ++i)
        for (int c = 0; c < dim; ++c) root.v[i][c] = vertices[i](c);
    MatrixR edges(dim, dim);
    for (int i = 1; i <= dim; ++i) edges.col(i - 1) = vertices[i] - vertices[0];
    double nfact = 1.0;
    for (int i = 2; i <= dim; ++i) nfact *= i;
    root.volume = std::abs(edges.determinant()) / nfact;

    QuadratureResult res;
    if (root.volume == 0.0) {
        res.converged = true;
        return res;
    }

    const detail::GMRule fine = detail::gm_rule(dim, 3);
    const detail::GMRule coarse = detail::gm_rule(dim, 2);
    const long evals_per_region = long(fine.bary.size() + coarse.bary.size());

    detail::evaluate_region(root, f, fine, coarse);
    res.evals += evals_per_region;
    std::vector<SimplexRegion> regions{root};

    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        res.sweeps = sweep;
        long double total_err = 0.0L, total_val = 0.0L;
        for (const auto& r : regions) {
            total_err += r.err;
            total_val += r.value;
        }
        res.value = double(total_val);
        res.error_estimate = double(total_err);
        if (double(total_err) <= opt.target_err) {
            res.converged = true;
            return res;
        }
        if (long(regions.size()) >= opt.max_regions) return res;

        const double threshold = opt.target_err / (2.0 * double(regions.size()));
        std::vector<long> marked;
        for (long i = 0; i < long(regions.size()); ++i)
            if (regions[i].err > threshold) marked.push_back(i);
        if (marked.empty()) return res;

        std::vector<SimplexRegion> children(2 * marked.size());
        const bool parallel = (opt.exec == Exec::Parallel);
#ifdef HYPERVOL_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
#endif
        for (long m = 0; m < long(marked.size()); ++m) {
            detail::bisect_longest_edge(regions[marked[m]], children[2 * m], children[2 * m + 1]);
            detail::evaluate_region(children[2 * m], f, fine, coarse);
            detail::evaluate_region(children[2 * m + 1], f, fine, coarse);
        }
        (void)parallel;
        res.evals += evals_per_region * 2 * long(marked.size());

        std::vector<SimplexRegion> next;
        next.reserve(regions.size() + marked.size());
        size_t mi = 0;
        for (long i = 0; i < long(regions.size()); ++i) {
            if (mi < marked.size() && marked[mi] == i) {
                next.push_back(children[2 * mi]);
                next.push_back(children[2 * mi + 1]);
                ++mi;
            } else {
                next.push_back(regions[i]);
            }
        }
        regions.swap(next);
    }
    return res;
}

}  // namespace hypervol
