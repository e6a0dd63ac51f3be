#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cascade/graph.hpp"
#include "cascade/stats.hpp"

namespace testutil {

/// Brute-force flood fill over an adjacency list.
inline bool flood_fill_connected(int n, const std::vector<cascade::Edge>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : edges) {
        adj[e.i].push_back(e.j);
        adj[e.j].push_back(e.i);
    }
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int u : adj[v]) {
            if (!seen[u]) {
                seen[u] = 1;
                ++reached;
                stack.push_back(u);
            }
        }
    }
    return reached == n;
}

/// Random connected graph: random spanning tree plus extra edges.
inline cascade::WeightedGraph random_connected_graph(int n, std::mt19937_64& rng,
                                                     double extra_edge_prob = 0.3) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<cascade::Edge> edges;
    std::uniform_real_distribution<double> weight(0.2, 2.0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<std::vector<char>> used(n, std::vector<char>(n, 0));
    for (int i = 1; i < n; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        int a = order[parent(rng)], b = order[i];
        edges.push_back({std::min(a, b), std::max(a, b), weight(rng)});
        used[std::min(a, b)][std::max(a, b)] = 1;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!used[i][j] && unif(rng) < extra_edge_prob) {
                edges.push_back({i, j, weight(rng)});
                used[i][j] = 1;
            }
        }
    }
    return cascade::WeightedGraph(n, std::move(edges));
}

/// erf by adaptive-free Simpson quadrature of the Gaussian density.
inline double erf_quadrature(double x) {
    const double sign = x < 0 ? -1.0 : 1.0;
    x = std::abs(x);
    const int intervals = 2000;
    const double h = x / intervals;
    double sum = 0.0;
    auto f = [](double t) { return std::exp(-t * t); };
    for (int i = 0; i < intervals; ++i) {
        const double a = i * h, b = a + h;
        sum += (f(a) + 4.0 * f(0.5 * (a + b)) + f(b)) * (b - a) / 6.0;
    }
    return sign * 2.0 / std::sqrt(M_PI) * sum;
}

/// Two-sided tail probability of N(mu, sigma^2) outside [-bound, bound],
/// evaluated with the quadrature erf.
inline double tail_probability_quadrature(double mu, double sigma, double bound) {
    if (sigma == 0.0) return std::abs(mu) > bound ? 1.0 : 0.0;
    const double kp = (bound + mu) / (std::sqrt(2.0) * sigma);
    const double km = (bound - mu) / (std::sqrt(2.0) * sigma);
    return 1.0 - 0.5 * (erf_quadrature(kp) + erf_quadrature(km));
}

/// Conditional mean/variance via a generic least-squares route (QR), an
/// independent path from the SPD factorization in the library.
inline std::pair<double, double> conditional_least_squares(
    const Eigen::MatrixXd& sigma, int j, const std::vector<int>& indices,
    const std::vector<double>& values) {
    const int m = static_cast<int>(indices.size());
    Eigen::MatrixXd block(m, m);
    Eigen::VectorXd cross(m), yf(m);
    for (int r = 0; r < m; ++r) {
        cross(r) = sigma(j, indices[r]);
        yf(r) = values[r];
        for (int c = 0; c < m; ++c) block(r, c) = sigma(indices[r], indices[c]);
    }
    Eigen::VectorXd w = block.colPivHouseholderQr().solve(cross);
    return {w.dot(yf), sigma(j, j) - w.dot(cross)};
}

/// Grid-scan root of P(delta) = eps for a strictly decreasing P.
template <typename F>
double grid_scan_root(F&& prob, double eps, double hi, double step = 1e-6) {
    double prev = 0.0;
    for (double d = 0.0; d <= hi; d += step) {
        if (prob(d) < eps) return 0.5 * (prev + d);
        prev = d;
    }
    return hi;
}

}  // namespace testutil
