#include "cmix/graph_models.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cmix/errors.hpp"

namespace cmix {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

std::size_t count_common(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

DirectedGraphWindow::DirectedGraphWindow(std::vector<VertexId> vertices, std::vector<Edge> edges,
                                         std::size_t margin,
                                         std::optional<std::vector<VertexId>> boundary)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), margin_(margin) {
  std::sort(vertices_.begin(), vertices_.end());
  if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end()) {
    throw ArgumentError("graph: repeated vertex id");
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) index_[vertices_[i]] = i;
  succ_.assign(vertices_.size(), {});
  pred_.assign(vertices_.size(), {});

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& [x, y] : edges_) {
    if (x == y) throw ArgumentError("graph: loop at vertex " + std::to_string(x));
    const auto ix = index_.find(x);
    const auto iy = index_.find(y);
    if (ix == index_.end() || iy == index_.end()) {
      throw ArgumentError("graph: edge " + std::to_string(x) + " " + std::to_string(y) +
                          " uses an undeclared vertex");
    }
    const std::size_t a = ix->second, b = iy->second;
    if (seen.count({a, b})) {
      throw ArgumentError("graph: repeated edge " + std::to_string(x) + " " + std::to_string(y));
    }
    if (seen.count({b, a})) {
      throw ArgumentError("graph: edge " + std::to_string(x) + " " + std::to_string(y) +
                          " present in both orientations");
    }
    seen.insert({a, b});
    succ_[a].push_back(b);
    pred_[b].push_back(a);
  }
  for (auto& s : succ_) std::sort(s.begin(), s.end());
  for (auto& p : pred_) std::sort(p.begin(), p.end());

  if (boundary) {
    for (VertexId v : *boundary) boundary_.push_back(index_of(v));
    std::sort(boundary_.begin(), boundary_.end());
    boundary_.erase(std::unique(boundary_.begin(), boundary_.end()), boundary_.end());
  } else {
    std::size_t max_degree = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      max_degree = std::max(max_degree, succ_[i].size() + pred_[i].size());
    }
    for (std::size_t i = 0; i < size(); ++i) {
      if (succ_[i].size() + pred_[i].size() < max_degree) boundary_.push_back(i);
    }
  }

  // Multi-source breadth-first distance from the boundary.
  std::vector<std::size_t> dist(size(), kUnreached);
  std::deque<std::size_t> queue;
  for (std::size_t b : boundary_) {
    dist[b] = 0;
    queue.push_back(b);
  }
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : neighbours(u)) {
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  for (std::size_t i = 0; i < size(); ++i) {
    if (dist[i] >= margin_) interior_.push_back(i);
  }
}

std::size_t DirectedGraphWindow::index_of(VertexId v) const {
  const auto it = index_.find(v);
  if (it == index_.end()) throw ArgumentError("graph: unknown vertex " + std::to_string(v));
  return it->second;
}

std::vector<std::size_t> DirectedGraphWindow::neighbours(std::size_t i) const {
  std::vector<std::size_t> n = succ_[i];
  n.insert(n.end(), pred_[i].begin(), pred_[i].end());
  std::sort(n.begin(), n.end());
  return n;
}

DirectedGraphWindow DirectedGraphWindow::reversed() const {
  std::vector<Edge> rev;
  rev.reserve(edges_.size());
  for (const auto& [x, y] : edges_) rev.emplace_back(y, x);
  std::vector<VertexId> b;
  for (std::size_t i : boundary_) b.push_back(vertices_[i]);
  return DirectedGraphWindow(vertices_, std::move(rev), margin_, b);
}

DirectedGraphWindow parse_graph(std::istream& in) {
  std::optional<std::vector<VertexId>> vertices;
  std::optional<std::vector<VertexId>> boundary;
  std::size_t margin = 0;
  std::vector<Edge> edges;
  std::string raw;
  std::size_t line_no = 0;
  auto fail = [&line_no](const std::string& msg) {
    throw ParseError("graph line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string head;
    if (!(ls >> head)) continue;
    if (head == "vertices" || head == "boundary") {
      std::vector<VertexId> ids;
      VertexId v;
      while (ls >> v) ids.push_back(v);
      if (!ls.eof()) fail("expected integer vertex ids after '" + head + "'");
      if (head == "vertices") {
        if (vertices) fail("vertex set declared twice");
        if (ids.size() == 1) {
          if (ids[0] < 0) fail("vertex count must be nonnegative");
          std::vector<VertexId> range(static_cast<std::size_t>(ids[0]));
          for (std::size_t i = 0; i < range.size(); ++i) range[i] = static_cast<VertexId>(i);
          vertices = std::move(range);
        } else {
          vertices = std::move(ids);
        }
      } else {
        boundary = std::move(ids);
      }
      continue;
    }
    if (head == "margin") {
      long m = -1;
      if (!(ls >> m) || m < 0) fail("margin must be a nonnegative integer");
      margin = static_cast<std::size_t>(m);
      continue;
    }
    if (!vertices) fail("edges must follow a 'vertices' header");
    std::istringstream es(raw);
    VertexId x, y;
    std::string extra;
    if (!(es >> x >> y) || (es >> extra)) fail("expected an edge 'x y'");
    edges.emplace_back(x, y);
  }
  if (!vertices) throw ParseError("graph: missing 'vertices' header");
  try {
    return DirectedGraphWindow(std::move(*vertices), std::move(edges), margin, boundary);
  } catch (const ArgumentError& e) {
    throw ParseError(e.what());
  }
}

DirectedGraphWindow load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("graph: cannot open " + path);
  return parse_graph(in);
}

void write_graph(std::ostream& out, const DirectedGraphWindow& g) {
  out << "vertices";
  for (VertexId v : g.vertices()) out << ' ' << v;
  out << "\nmargin " << g.margin() << "\nboundary";
  for (std::size_t b : g.boundary()) out << ' ' << g.vertices()[b];
  out << '\n';
  for (const auto& [x, y] : g.edges()) out << x << ' ' << y << '\n';
}

DirectedGraphWindow z_window(std::size_t n, std::size_t margin) {
  if (n == 0) throw ArgumentError("z_window: n must be >= 1");
  std::vector<VertexId> v(n);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<VertexId>(i);
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return DirectedGraphWindow(std::move(v), std::move(e), margin);
}

DirectedGraphWindow z2_window(std::size_t nx, std::size_t ny, std::size_t margin) {
  if (nx == 0 || ny == 0) throw ArgumentError("z2_window: sides must be >= 1");
  std::vector<VertexId> v;
  std::vector<Edge> e;
  auto id = [ny](std::size_t i, std::size_t j) { return static_cast<VertexId>(i * ny + j); };
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      v.push_back(id(i, j));
      if (i + 1 < nx) e.emplace_back(id(i, j), id(i + 1, j));
      if (j + 1 < ny) e.emplace_back(id(i, j), id(i, j + 1));
    }
  }
  return DirectedGraphWindow(std::move(v), std::move(e), margin);
}

DirectedGraphWindow alternating_four_cycle() {
  return DirectedGraphWindow({0, 1, 2, 3}, {{0, 1}, {2, 1}, {2, 3}, {0, 3}}, 0);
}

AdmissibilityReport check_admissible(const DirectedGraphWindow& g) {
  const std::size_t n = g.size();
  AdmissibilityReport r;
  r.position.assign(n, 0);
  r.component.assign(n, kUnreached);
  r.path_balance_ok = true;
  std::vector<std::size_t> parent(n, kUnreached);

  auto path_to_root = [&parent](std::size_t v) {
    std::vector<std::size_t> p{v};
    while (parent[p.back()] != kUnreached) p.push_back(parent[p.back()]);
    return p;
  };

  std::size_t label = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (r.component[root] != kUnreached) continue;
    r.component[root] = label;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      auto visit = [&](std::size_t v, long step) {
        const long want = r.position[u] + step;
        if (r.component[v] == kUnreached) {
          r.component[v] = label;
          r.position[v] = want;
          parent[v] = u;
          queue.push_back(v);
        } else if (r.position[v] != want && r.path_balance_ok) {
          r.path_balance_ok = false;
          // root .. u, v .. root
          std::vector<std::size_t> up = path_to_root(u);
          std::reverse(up.begin(), up.end());
          std::vector<std::size_t> down = path_to_root(v);
          std::vector<std::size_t> walk = up;
          walk.insert(walk.end(), down.begin(), down.end());
          for (std::size_t s = 0; s + 1 < walk.size(); ++s) {
            const auto& succ = g.successors(walk[s]);
            if (std::binary_search(succ.begin(), succ.end(), walk[s + 1])) {
              ++r.witness_forward;
            } else {
              ++r.witness_backward;
            }
          }
          for (std::size_t w : walk) r.witness_cycle.push_back(g.vertices()[w]);
        }
      };
      for (std::size_t v : g.successors(u)) visit(v, 1);
      for (std::size_t v : g.predecessors(u)) visit(v, -1);
    }
    ++label;
  }

  r.pair_counts_ok = true;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      ++r.pairs_checked;
      const std::size_t minus = count_common(g.successors(x), g.successors(y));
      const std::size_t plus = count_common(g.predecessors(x), g.predecessors(y));
      if (minus != plus && r.pair_counts_ok) {
        r.pair_counts_ok = false;
        r.witness_pair = std::make_pair(g.vertices()[x], g.vertices()[y]);
        r.witness_minus_count = minus;
        r.witness_plus_count = plus;
      }
    }
  }
  return r;
}

GraphOperators build_operators(const DirectedGraphWindow& g) {
  return build_operators(g, check_admissible(g));
}

GraphOperators build_operators(const DirectedGraphWindow& g, const AdmissibilityReport& report) {
  if (!report.admissible()) {
    std::ostringstream os;
    os << "build_operators: graph is not admissible";
    if (!report.path_balance_ok) {
      os << " (closed walk with " << report.witness_forward << " positive and "
         << report.witness_backward << " negative edges)";
    }
    if (!report.pair_counts_ok && report.witness_pair) {
      os << " (pair " << report.witness_pair->first << "," << report.witness_pair->second
         << ": " << report.witness_minus_count << " != " << report.witness_plus_count << ")";
    }
    throw StructureError(os.str(), 0.0);
  }
  const auto n = static_cast<Eigen::Index>(g.size());
  GraphOperators ops;
  ops.h = Matrix::Zero(n, n);
  ops.l = Matrix::Zero(n, n);
  ops.phi = Matrix::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    const auto xi = static_cast<std::size_t>(x);
    for (std::size_t y : g.predecessors(xi)) {
      const auto yi = static_cast<Eigen::Index>(y);
      ops.l(x, yi) = 1.0;
      ops.h(x, yi) = 1.0;
      ops.h(yi, x) = 1.0;
    }
    ops.phi(x, x) = static_cast<double>(report.position[xi]);
  }
  ops.k = kI * (ops.l.adjoint() - ops.l);
  ops.a = 0.5 * (ops.phi * ops.k + ops.k * ops.phi);
  return ops;
}

InteriorResiduals interior_residuals(const GraphOperators& ops, const DirectedGraphWindow& g) {
  if (g.interior().empty()) {
    throw ArgumentError("interior_residuals: empty interior; enlarge the window or lower the margin");
  }
  const Matrix kh = commutator(ops.k, ops.h);
  const Matrix iha = kI * commutator(ops.h, ops.a) - ops.k * ops.k;
  InteriorResiduals r;
  for (std::size_t i : g.interior()) {
    const auto row = static_cast<Eigen::Index>(i);
    r.kh = std::max(r.kh, kh.row(row).norm());
    r.iha = std::max(r.iha, iha.row(row).norm());
  }
  r.rows = g.interior().size();
  return r;
}

GraphDegree graph_degree(const GraphOperators& ops, const DirectedGraphWindow& g, double tol,
                         std::vector<double> times) {
  const Matrix id = identity_like(ops.h);
  const Matrix r_plus = (ops.h + kI * id).partialPivLu().inverse();
  GraphDegree out;
  out.tol = tol;
  out.d = hermitian_part(r_plus * ops.k * ops.k * r_plus.adjoint());
  const KernelSplit sd = kernel_split(out.d, tol);
  const KernelSplit sk = kernel_split(hermitian_part(ops.k), tol);
  out.kernel_rank_d = sd.kernel_dim;
  out.kernel_rank_k = sk.kernel_dim;
  out.consistent = out.kernel_rank_d == out.kernel_rank_k;
  out.min_eigenvalue = sd.eigenvalues.size() ? sd.eigenvalues.minCoeff() : 0.0;

  // Most central interior vertex: farthest from the boundary set.
  out.constancy_times = std::move(times);
  if (!g.interior().empty() && !out.constancy_times.empty()) {
    std::size_t centre = g.interior().front();
    if (!g.boundary().empty()) {
      std::vector<std::size_t> dist(g.size(), kUnreached);
      std::deque<std::size_t> queue;
      for (std::size_t b : g.boundary()) {
        dist[b] = 0;
        queue.push_back(b);
      }
      while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t v : g.neighbours(u)) {
          if (dist[v] == kUnreached) {
            dist[v] = dist[u] + 1;
            queue.push_back(v);
          }
        }
      }
      for (std::size_t i : g.interior()) {
        if (dist[i] != kUnreached && dist[i] > dist[centre]) centre = i;
      }
    }
    const SpectralDecomposition hd = decompose(ops.h);
    Vector v = Vector::Zero(ops.h.rows());
    v(static_cast<Eigen::Index>(centre)) = 1.0;
    const Vector dv = out.d * v;
    for (double s : out.constancy_times) {
      Vector back(hd.eigenvalues.size()), fwd(hd.eigenvalues.size());
      for (Eigen::Index j = 0; j < back.size(); ++j) {
        back(j) = std::polar(1.0, -s * hd.eigenvalues(j).real());
        fwd(j) = std::conj(back(j));
      }
      const Vector w = hd.eigenvectors *
                       (fwd.asDiagonal() * (hd.eigenvectors.adjoint() *
                                            (out.d * (hd.eigenvectors *
                                                      (back.asDiagonal() *
                                                       (hd.eigenvectors.adjoint() * v))))));
      out.constancy_deviation = std::max(out.constancy_deviation, (w - dv).norm());
    }
  }
  return out;
}

nlohmann::json to_json(const AdmissibilityReport& r, const DirectedGraphWindow& g) {
  nlohmann::json j;
  j["admissible"] = r.admissible();
  j["path_balance_ok"] = r.path_balance_ok;
  j["pair_counts_ok"] = r.pair_counts_ok;
  j["pairs_checked"] = r.pairs_checked;
  if (!r.path_balance_ok) {
    j["witness_cycle"] = r.witness_cycle;
    j["witness_forward"] = r.witness_forward;
    j["witness_backward"] = r.witness_backward;
  }
  if (r.witness_pair) {
    j["witness_pair"] = {r.witness_pair->first, r.witness_pair->second};
    j["witness_minus_count"] = r.witness_minus_count;
    j["witness_plus_count"] = r.witness_plus_count;
  }
  if (r.path_balance_ok) {
    nlohmann::json pos = nlohmann::json::object();
    for (std::size_t i = 0; i < g.size(); ++i) pos[std::to_string(g.vertices()[i])] = r.position[i];
    j["position"] = pos;
  }
  return j;
}

}  // namespace cmix
