#include "cascade/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

namespace cascade {

namespace {

void check_connected(int n, const std::vector<Edge>& edges) {
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
    if (reached != n) {
        throw ConnectivityError("graph is disconnected (" +
                                std::to_string(reached) + " of " +
                                std::to_string(n) + " agents reachable)");
    }
}

}  // namespace

WeightedGraph::WeightedGraph(int n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)) {
    if (n_ < 2) {
        throw ParameterError("graph needs at least 2 agents, got " +
                             std::to_string(n_));
    }
    std::set<std::pair<int, int>> seen;
    for (auto& e : edges_) {
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= n_) {
            throw InvalidEdgeError("edge endpoint out of range");
        }
        if (e.i == e.j) {
            throw InvalidEdgeError("self-loop at agent " +
                                   std::to_string(e.i + 1));
        }
        if (!(e.w > 0.0) || !std::isfinite(e.w)) {
            throw InvalidEdgeError("edge (" + std::to_string(e.i + 1) + "," +
                                   std::to_string(e.j + 1) +
                                   ") has non-positive weight");
        }
        if (!seen.insert({e.i, e.j}).second) {
            throw InvalidEdgeError("duplicate edge (" + std::to_string(e.i + 1) +
                                   "," + std::to_string(e.j + 1) + ")");
        }
    }
    check_connected(n_, edges_);
}

Eigen::MatrixXd WeightedGraph::laplacian() const {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto& e : edges_) {
        L(e.i, e.j) -= e.w;
        L(e.j, e.i) -= e.w;
        L(e.i, e.i) += e.w;
        L(e.j, e.j) += e.w;
    }
    return L;
}

GraphKind parse_graph_kind(const std::string& name) {
    if (name == "path") return GraphKind::path;
    if (name == "pcycle") return GraphKind::pcycle;
    if (name == "complete") return GraphKind::complete;
    if (name == "custom") return GraphKind::custom;
    throw ParameterError("unknown graph kind '" + name + "'");
}

WeightedGraph build_path(int n) {
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph build_pcycle(int n, int p) {
    if (p < 1 || p > (n - 1) / 2) {
        throw ParameterError("pcycle parameter p=" + std::to_string(p) +
                             " out of range [1, " + std::to_string((n - 1) / 2) +
                             "] for n=" + std::to_string(n));
    }
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int d = 1; d <= p; ++d) {
            int j = (i + d) % n;
            edges.push_back({i, j, 1.0});
        }
    }
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph build_complete(int n) {
    std::vector<Edge> edges;
    edges.reserve(n * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
    return WeightedGraph(n, std::move(edges));
}

SpectralData spectral(const Eigen::MatrixXd& L) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("symmetric eigensolve failed");
    }
    SpectralData s;
    s.lambdas = solver.eigenvalues();
    s.Q = solver.eigenvectors();
    const int n = s.size();
    const double lmax = s.lambdas(n - 1);
    if (std::abs(s.lambdas(0)) >= 1e-9 * std::max(lmax, 1.0)) {
        throw NumericalError(
            "smallest eigenvalue is not numerically zero; input is not a valid "
            "Laplacian");
    }
    s.lambdas(0) = 0.0;
    // Deterministic sign convention: largest-magnitude entry positive.
    for (int k = 0; k < n; ++k) {
        int imax = 0;
        s.Q.col(k).cwiseAbs().maxCoeff(&imax);
        if (s.Q(imax, k) < 0.0) s.Q.col(k) = -s.Q.col(k);
    }
    return s;
}

double max_stable_delay(const SpectralData& s) {
    const double lmax = s.lambda_max();
    if (lmax <= 0.0) {
        throw DegenerateGraphError("largest Laplacian eigenvalue is zero");
    }
    return std::numbers::pi / (2.0 * lmax);
}

WeightedGraph parse_edge_list(std::istream& in, const std::string& origin) {
    std::string line;
    int n = -1;
    std::vector<Edge> edges;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        if (n < 0) {
            if (first != "n") {
                throw ParameterError(where + ": expected header 'n <count>'");
            }
            if (!(ls >> n) || n < 2) {
                throw ParameterError(where + ": invalid agent count");
            }
            continue;
        }
        int i, j;
        double w;
        try {
            i = std::stoi(first);
        } catch (const std::exception&) {
            throw ParameterError(where + ": bad edge line");
        }
        if (!(ls >> j >> w)) {
            throw ParameterError(where + ": bad edge line");
        }
        if (i < 1 || i > n || j < 1 || j > n) {
            throw InvalidEdgeError(where + ": agent index out of 1.." +
                                   std::to_string(n));
        }
        edges.push_back({i - 1, j - 1, w});
    }
    if (n < 0) {
        throw ParameterError(origin + ": missing header 'n <count>'");
    }
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParameterError("cannot open edge-list file '" + path + "'");
    }
    return parse_edge_list(in, path);
}

}  // namespace cascade
