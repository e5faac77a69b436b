#pragma once

// Graphs and weighted hypergraphs, and the stabilizer / nullifier families
// they induce. Vertex indices are 1-based everywhere in this header and in
// every serialized format.

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace gsv {

using Vertex = int;

struct Hyperedge {
  std::vector<Vertex> vertices;  // sorted, distinct, each in [1, n]
  double weight = 1.0;
};

/// Weighted hypergraph G = (V, E, Omega). A plain graph is the case where
/// every hyperedge has exactly two vertices; the qudit path ignores weights.
class WeightedHypergraph {
 public:
  /// Default cap on |E| as a function of n: 10 n^3.
  static std::size_t defaultEdgeCap(int n);

  WeightedHypergraph() = default;
  /// Validates every invariant; throws std::invalid_argument on violation.
  WeightedHypergraph(int n, std::vector<Hyperedge> edges, std::optional<std::size_t> edgeCap = std::nullopt);

  int vertexCount() const { return n_; }
  const std::vector<Hyperedge>& edges() const { return edges_; }
  bool isPlainGraph() const;

  /// Vertices adjacent to v through some hyperedge (excluding v), sorted.
  std::vector<Vertex> neighbors(Vertex v) const;

  /// Canonical text form accepted by parseHypergraph.
  std::string toText() const;

 private:
  int n_ = 0;
  std::vector<Hyperedge> edges_;
};

WeightedHypergraph parseHypergraph(std::istream& in, std::optional<std::size_t> edgeCap = std::nullopt);
WeightedHypergraph parseHypergraph(const std::string& text, std::optional<std::size_t> edgeCap = std::nullopt);
WeightedHypergraph loadHypergraph(const std::string& path);

namespace presets {
WeightedHypergraph path(int n);
WeightedHypergraph cycle(int n);
WeightedHypergraph complete(int n);
WeightedHypergraph cluster2d(int rows, int cols);
}  // namespace presets

/// Resolves "path(9)", "cycle(5)", "complete(4)", "cluster2d(3,3)"; anything
/// else is treated as a graph file path.
WeightedHypergraph resolveGraph(const std::string& spec);

/// g_i = X_i prod_{j in N(i)} Z_j, described by its vertex and neighborhood.
struct QuditStabilizerSpec {
  Vertex vertex = 0;
  std::vector<Vertex> neighbors;
  int d = 2;

  bool operator==(const QuditStabilizerSpec&) const = default;
};

std::vector<QuditStabilizerSpec> buildStabilizers(const WeightedHypergraph& graph, int d);

struct NullifierTerm {
  double weight = 1.0;
  std::vector<Vertex> factors;  // e_j - {v_i}; empty product means 1
};

/// g_i = p_i - sum_{e_j in E(i)} Omega_j prod_{k in e_j - {i}} x_k.
struct CVNullifierSpec {
  Vertex vertex = 0;
  std::vector<NullifierTerm> terms;

  /// Union of all factor sets, sorted: the modes measured in x.
  std::vector<Vertex> amplitudeModes() const;
  /// sum_j Omega_j prod_k x_k with x indexed by vertex (x[v-1]).
  double interaction(const std::vector<double>& x) const;
};

std::vector<CVNullifierSpec> buildNullifiers(const WeightedHypergraph& graph);

}  // namespace gsv
