#pragma once

// Adjacency operators on directed graphs. An edge (x, y) means x < y.
//   N^-(x) = {y : x < y},  N^+(x) = {y : y < x},
//   (L f)(x) = sum_{y in N^+(x)} f(y),  K = i(L* - L),
//   Phi = grading with Phi(y) = Phi(x) + 1 across x < y,  A = (Phi K + K Phi)/2.
// On admissible graphs [H, Phi] = L* - L, so [iH, A] = K^2 wherever [K, H] = 0.
// Finite windows of infinite graphs only satisfy the identities on rows far
// from the window boundary; residuals are therefore measured on the interior.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cmix/operator_core.hpp"

namespace cmix {

using VertexId = long;
using Edge = std::pair<VertexId, VertexId>;

class DirectedGraphWindow {
 public:
  /// Rejects loops, repeated edges, edges present in both orientations and
  /// edges touching unknown vertices. Boundary vertices default to those of
  /// degree below the window's maximum degree; interior vertices are those at
  /// graph distance >= margin from every boundary vertex.
  DirectedGraphWindow(std::vector<VertexId> vertices, std::vector<Edge> edges,
                      std::size_t margin = 0,
                      std::optional<std::vector<VertexId>> boundary = std::nullopt);

  std::size_t size() const { return vertices_.size(); }
  const std::vector<VertexId>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t margin() const { return margin_; }
  const std::vector<std::size_t>& boundary() const { return boundary_; }
  /// Indices into vertices(), ascending.
  const std::vector<std::size_t>& interior() const { return interior_; }

  std::size_t index_of(VertexId v) const;
  /// N^-(x) and N^+(x) as sorted vertex indices.
  const std::vector<std::size_t>& successors(std::size_t i) const { return succ_[i]; }
  const std::vector<std::size_t>& predecessors(std::size_t i) const { return pred_[i]; }
  std::vector<std::size_t> neighbours(std::size_t i) const;

  /// Same vertices, every edge reversed; same margin and boundary.
  DirectedGraphWindow reversed() const;

 private:
  std::vector<VertexId> vertices_;
  std::vector<Edge> edges_;
  std::size_t margin_;
  std::map<VertexId, std::size_t> index_;
  std::vector<std::vector<std::size_t>> succ_, pred_;
  std::vector<std::size_t> boundary_;
  std::vector<std::size_t> interior_;
};

/// Line-oriented format: `vertices n` (ids 0..n-1) or `vertices id id ...`,
/// optional `margin m` and `boundary id ...`, then one `x y` line per edge
/// meaning x < y. `#` starts a comment. Errors carry the line number.
DirectedGraphWindow parse_graph(std::istream& in);
DirectedGraphWindow load_graph(const std::string& path);
void write_graph(std::ostream& out, const DirectedGraphWindow& g);

/// Path 0 < 1 < ... < n-1.
DirectedGraphWindow z_window(std::size_t n, std::size_t margin);
/// nx x ny square of Z^2, (i,j) < (i+1,j) and (i,j) < (i,j+1); id = i * ny + j.
DirectedGraphWindow z2_window(std::size_t nx, std::size_t ny, std::size_t margin);
/// 0 < 1, 2 < 1, 2 < 3, 0 < 3.
DirectedGraphWindow alternating_four_cycle();

struct AdmissibilityReport {
  bool path_balance_ok = false;
  /// Closed walk (vertex ids, first == last) with unequal orientation counts.
  std::vector<VertexId> witness_cycle;
  long witness_forward = 0;
  long witness_backward = 0;

  bool pair_counts_ok = false;
  std::optional<std::pair<VertexId, VertexId>> witness_pair;
  std::size_t witness_minus_count = 0;  // #(N^-(x) & N^-(y))
  std::size_t witness_plus_count = 0;   // #(N^+(x) & N^+(y))
  std::size_t pairs_checked = 0;

  /// Phi per vertex index, 0 at the smallest index of each component.
  std::vector<long> position;
  std::vector<std::size_t> component;  // component label per vertex index

  bool admissible() const { return path_balance_ok && pair_counts_ok; }
};

/// Condition (i) by breadth-first grading; condition (ii) over all distinct
/// pairs x != y.
AdmissibilityReport check_admissible(const DirectedGraphWindow& g);

struct GraphOperators {
  Matrix h, l, k, phi, a;
};

/// Throws StructureError when the graph is not admissible.
GraphOperators build_operators(const DirectedGraphWindow& g);
GraphOperators build_operators(const DirectedGraphWindow& g, const AdmissibilityReport& report);

struct InteriorResiduals {
  double kh = 0.0;   // max interior row norm of [K, H]
  double iha = 0.0;  // max interior row norm of [iH, A] - K^2
  std::size_t rows = 0;
};

/// Throws ArgumentError on an empty interior.
InteriorResiduals interior_residuals(const GraphOperators& ops, const DirectedGraphWindow& g);

struct GraphDegree {
  Matrix d;  // (H+i)^{-1} K^2 (H-i)^{-1}
  double tol = 0.0;
  std::size_t kernel_rank_d = 0;
  std::size_t kernel_rank_k = 0;
  bool consistent = false;  // ranks agree
  double min_eigenvalue = 0.0;
  /// max over s of ||e^{isH} D e^{-isH} v - D v|| for v a unit vector at the
  /// most central interior vertex.
  double constancy_deviation = 0.0;
  std::vector<double> constancy_times;
};

GraphDegree graph_degree(const GraphOperators& ops, const DirectedGraphWindow& g,
                         double tol = 1e-8, std::vector<double> times = {0.5, 1.0});

nlohmann::json to_json(const AdmissibilityReport& r, const DirectedGraphWindow& g);

}  // namespace cmix
