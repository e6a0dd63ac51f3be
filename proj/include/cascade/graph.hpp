#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cascade/errors.hpp"

namespace cascade {

// Agent indices are 0-based everywhere in this library. External surfaces
// (edge-list files, CLI configs, result tables) use 1-based labels and the
// I/O layer shifts by one.

/// One undirected edge with a positive feedback gain.
struct Edge {
    int i;
    int j;
    double w;
};

/// Connected, undirected, simple weighted graph over n agents.
/// Construction validates simplicity, positivity, and connectivity;
/// instances are immutable afterwards.
class WeightedGraph {
public:
    WeightedGraph(int n, std::vector<Edge> edges);

    int size() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Graph Laplacian: -w(i,j) off-diagonal, weighted degree on the diagonal.
    Eigen::MatrixXd laplacian() const;

private:
    int n_;
    std::vector<Edge> edges_;
};

enum class GraphKind { path, pcycle, complete, custom };

GraphKind parse_graph_kind(const std::string& name);

/// Named generators (unit weights). For pcycle, node i connects to its p
/// nearest neighbours on each side of the ring, 1 <= p <= floor((n-1)/2).
WeightedGraph build_path(int n);
WeightedGraph build_pcycle(int n, int p);
WeightedGraph build_complete(int n);

/// Eigendecomposition of a Laplacian, eigenvalues ascending.
/// lambdas[0] is clamped to exactly 0; Q columns are orthonormal with the
/// largest-magnitude entry of each column made positive (the first column is
/// (1/sqrt(n)) * ones).
struct SpectralData {
    Eigen::VectorXd lambdas;
    Eigen::MatrixXd Q;

    int size() const { return static_cast<int>(lambdas.size()); }
    double lambda_max() const { return lambdas(lambdas.size() - 1); }
};

SpectralData spectral(const Eigen::MatrixXd& L);

/// Admissible-delay bound pi / (2 * lambda_n).
double max_stable_delay(const SpectralData& s);

/// Parse the edge-list file format: a header line `n <count>`, then one
/// `i j w` triple per line with 1-based indices; `#` starts a comment.
WeightedGraph load_edge_list(const std::string& path);
WeightedGraph parse_edge_list(std::istream& in, const std::string& origin);

}  // namespace cascade
