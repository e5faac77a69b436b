#include "gsv/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gsv {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw std::invalid_argument("hypergraph: " + what); }

bool isVertexToken(const std::string& token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string formatWeight(double w) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, w);
  std::string s(buf, end);
  // Keep weights distinguishable from vertex indices.
  if (isVertexToken(s)) s += ".0";
  return s;
}

}  // namespace

std::size_t WeightedHypergraph::defaultEdgeCap(int n) {
  const auto nn = static_cast<std::size_t>(std::max(n, 1));
  return 10 * nn * nn * nn;
}

WeightedHypergraph::WeightedHypergraph(int n, std::vector<Hyperedge> edges, std::optional<std::size_t> edgeCap)
    : n_(n), edges_(std::move(edges)) {
  if (n_ < 1) invalid("vertex count must be positive");
  const std::size_t cap = edgeCap.value_or(defaultEdgeCap(n_));
  if (edges_.size() > cap)
    invalid("edge count " + std::to_string(edges_.size()) + " exceeds cap " + std::to_string(cap));

  std::set<std::vector<Vertex>> seen;
  for (auto& e : edges_) {
    if (e.vertices.empty()) invalid("hyperedge must contain at least one vertex");
    std::sort(e.vertices.begin(), e.vertices.end());
    if (std::adjacent_find(e.vertices.begin(), e.vertices.end()) != e.vertices.end())
      invalid("duplicate vertex within a hyperedge");
    if (e.vertices.front() < 1 || e.vertices.back() > n_) invalid("vertex index out of range [1, n]");
    if (!seen.insert(e.vertices).second) invalid("repeated hyperedge");
  }
}

bool WeightedHypergraph::isPlainGraph() const {
  return std::all_of(edges_.begin(), edges_.end(), [](const Hyperedge& e) { return e.vertices.size() == 2; });
}

std::vector<Vertex> WeightedHypergraph::neighbors(Vertex v) const {
  std::set<Vertex> out;
  for (const auto& e : edges_) {
    if (!std::binary_search(e.vertices.begin(), e.vertices.end(), v)) continue;
    for (Vertex u : e.vertices)
      if (u != v) out.insert(u);
  }
  return {out.begin(), out.end()};
}

std::string WeightedHypergraph::toText() const {
  std::ostringstream os;
  os << "n " << n_ << '\n';
  for (const auto& e : edges_) {
    os << "edge";
    for (Vertex v : e.vertices) os << ' ' << v;
    if (e.weight != 1.0) os << ' ' << formatWeight(e.weight);
    os << '\n';
  }
  return os.str();
}

WeightedHypergraph parseHypergraph(std::istream& in, std::optional<std::size_t> edgeCap) {
  std::optional<int> n;
  std::vector<Hyperedge> edges;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    const std::string where = " (line " + std::to_string(lineNo) + ")";
    if (head == "n") {
      if (n) invalid("duplicate header" + where);
      int count = 0;
      if (!(ls >> count)) invalid("bad vertex count" + where);
      n = count;
    } else if (head == "edge") {
      if (!n) invalid("edge before header" + where);
      std::vector<std::string> tokens;
      for (std::string t; ls >> t;) tokens.push_back(t);
      Hyperedge e;
      if (!tokens.empty() && !isVertexToken(tokens.back())) {
        try {
          std::size_t used = 0;
          e.weight = std::stod(tokens.back(), &used);
          if (used != tokens.back().size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
          invalid("bad weight '" + tokens.back() + "'" + where);
        }
        tokens.pop_back();
      }
      for (const auto& t : tokens) {
        if (!isVertexToken(t)) invalid("bad vertex '" + t + "'" + where);
        e.vertices.push_back(std::stoi(t));
      }
      edges.push_back(std::move(e));
    } else {
      invalid("unknown directive '" + head + "'" + where);
    }
  }
  if (!n) invalid("missing 'n <count>' header");
  return WeightedHypergraph(*n, std::move(edges), edgeCap);
}

WeightedHypergraph parseHypergraph(const std::string& text, std::optional<std::size_t> edgeCap) {
  std::istringstream in(text);
  return parseHypergraph(in, edgeCap);
}

WeightedHypergraph loadHypergraph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return parseHypergraph(in);
}

namespace presets {

WeightedHypergraph path(int n) {
  std::vector<Hyperedge> edges;
  for (int v = 1; v < n; ++v) edges.push_back({{v, v + 1}});
  return WeightedHypergraph(n, std::move(edges));
}

WeightedHypergraph cycle(int n) {
  if (n < 3) invalid("cycle needs at least 3 vertices");
  std::vector<Hyperedge> edges;
  for (int v = 1; v < n; ++v) edges.push_back({{v, v + 1}});
  edges.push_back({{1, n}});
  return WeightedHypergraph(n, std::move(edges));
}

WeightedHypergraph complete(int n) {
  std::vector<Hyperedge> edges;
  for (int u = 1; u <= n; ++u)
    for (int v = u + 1; v <= n; ++v) edges.push_back({{u, v}});
  return WeightedHypergraph(n, std::move(edges));
}

WeightedHypergraph cluster2d(int rows, int cols) {
  if (rows < 1 || cols < 1) invalid("cluster2d dimensions must be positive");
  auto id = [cols](int r, int c) { return r * cols + c + 1; };
  std::vector<Hyperedge> edges;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) edges.push_back({{id(r, c), id(r, c + 1)}});
      if (r + 1 < rows) edges.push_back({{id(r, c), id(r + 1, c)}});
    }
  return WeightedHypergraph(rows * cols, std::move(edges));
}

}  // namespace presets

WeightedHypergraph resolveGraph(const std::string& spec) {
  static const std::regex one(R"(\s*(path|cycle|complete)\s*\(\s*(\d+)\s*\)\s*)");
  static const std::regex two(R"(\s*cluster2d\s*\(\s*(\d+)\s*,\s*(\d+)\s*\)\s*)");
  std::smatch m;
  if (std::regex_match(spec, m, one)) {
    const int n = std::stoi(m[2]);
    if (m[1] == "path") return presets::path(n);
    if (m[1] == "cycle") return presets::cycle(n);
    return presets::complete(n);
  }
  if (std::regex_match(spec, m, two)) return presets::cluster2d(std::stoi(m[1]), std::stoi(m[2]));
  return loadHypergraph(spec);
}

std::vector<QuditStabilizerSpec> buildStabilizers(const WeightedHypergraph& graph, int d) {
  if (d < 2) throw std::invalid_argument("buildStabilizers: local dimension must be >= 2");
  if (!graph.isPlainGraph()) throw std::invalid_argument("buildStabilizers: every edge must have exactly two vertices");
  for (const auto& e : graph.edges())
    if (e.weight != 1.0) throw std::invalid_argument("buildStabilizers: qudit edges must have weight 1");
  std::vector<QuditStabilizerSpec> specs;
  specs.reserve(static_cast<std::size_t>(graph.vertexCount()));
  for (Vertex v = 1; v <= graph.vertexCount(); ++v) specs.push_back({v, graph.neighbors(v), d});
  return specs;
}

std::vector<Vertex> CVNullifierSpec::amplitudeModes() const {
  std::set<Vertex> modes;
  for (const auto& t : terms) modes.insert(t.factors.begin(), t.factors.end());
  return {modes.begin(), modes.end()};
}

double CVNullifierSpec::interaction(const std::vector<double>& x) const {
  double total = 0.0;
  for (const auto& t : terms) {
    double product = t.weight;
    for (Vertex k : t.factors) product *= x.at(static_cast<std::size_t>(k - 1));
    total += product;
  }
  return total;
}

std::vector<CVNullifierSpec> buildNullifiers(const WeightedHypergraph& graph) {
  std::vector<CVNullifierSpec> specs(static_cast<std::size_t>(graph.vertexCount()));
  for (Vertex v = 1; v <= graph.vertexCount(); ++v) specs[static_cast<std::size_t>(v - 1)].vertex = v;
  for (const auto& e : graph.edges()) {
    for (Vertex v : e.vertices) {
      NullifierTerm term{e.weight, {}};
      for (Vertex u : e.vertices)
        if (u != v) term.factors.push_back(u);
      specs[static_cast<std::size_t>(v - 1)].terms.push_back(std::move(term));
    }
  }
  return specs;
}

}  // namespace gsv
