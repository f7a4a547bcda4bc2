#include "cmix/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "cmix/commutator_engine.hpp"
#include "cmix/errors.hpp"
#include "cmix/graph_models.hpp"
#include "cmix/matrix_io.hpp"
#include "cmix/mixing_analyzer.hpp"
#include "cmix/random.hpp"
#include "cmix/skew_products.hpp"

#ifndef CMIX_VERSION
#define CMIX_VERSION "0.0.0"
#endif

namespace cmix::runner {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

[[noreturn]] void field_error(const std::string& path, const std::string& msg) {
  throw ParseError("config field " + path + ": " + msg);
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
      field_error(path + "/" + it.key(), "unknown field");
    }
  }
}

const json* find(const json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_double(const json& j, const char* key, const std::string& path,
                  std::optional<double> fallback = std::nullopt) {
  const json* v = find(j, key);
  if (!v) {
    if (fallback) return *fallback;
    field_error(path + "/" + key, "required number missing");
  }
  if (!v->is_number()) field_error(path + "/" + key, "expected a number");
  return v->get<double>();
}

long get_int(const json& j, const char* key, const std::string& path,
             std::optional<long> fallback = std::nullopt) {
  const json* v = find(j, key);
  if (!v) {
    if (fallback) return *fallback;
    field_error(path + "/" + key, "required integer missing");
  }
  if (!v->is_number_integer()) field_error(path + "/" + key, "expected an integer");
  return v->get<long>();
}

std::string get_string(const json& j, const char* key, const std::string& path,
                       std::optional<std::string> fallback = std::nullopt) {
  const json* v = find(j, key);
  if (!v) {
    if (fallback) return *fallback;
    field_error(path + "/" + key, "required string missing");
  }
  if (!v->is_string()) field_error(path + "/" + key, "expected a string");
  return v->get<std::string>();
}

std::vector<double> get_doubles(const json& j, const char* key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) field_error(path + "/" + key, "required array missing");
  if (!v->is_array() || v->empty()) field_error(path + "/" + key, "expected a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) field_error(path + "/" + key + "/" + std::to_string(i), "expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

std::vector<long> get_ints(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) field_error(path, "expected a non-empty integer array");
  std::vector<long> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_integer()) field_error(path + "/" + std::to_string(i), "expected an integer");
    out.push_back(v[i].get<long>());
  }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

const std::map<std::string, std::set<std::string>>& supported_tasks() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"random", {"degree", "identities", "mixing", "summability", "fourier"}},
      {"matrix", {"degree", "identities", "mixing", "summability", "fourier"}},
      {"torus", {"degree", "identities", "mixing", "summability"}},
      {"su2", {"degree"}},
      {"shift", {"identities", "mixing"}},
      {"graph", {"admissibility", "identities", "degree"}},
  };
  return table;
}

bool discrete_schedule_model(const std::string& type, const json& model) {
  if (type == "torus" || type == "su2") return true;
  if (type == "random" || type == "matrix") return model.value("kind", "discrete") == "discrete";
  return false;
}

std::vector<double> default_schedule(const std::string& type, const json& model) {
  if (type == "random" || type == "matrix") {
    if (model.value("kind", "discrete") == "discrete") return {1, 2, 5, 17, 64};
    return {0.5, 1.5, 3.0};
  }
  if (type == "torus") {
    std::vector<double> s;
    for (int n = 2; n <= 1024; n *= 2) s.push_back(n);
    return s;
  }
  if (type == "su2") return {2000};
  if (type == "shift") return {0.3, 1.0};
  return {};
}

// Model construction -------------------------------------------------------

struct Model {
  std::string type;
  std::optional<OperatorPair> pair;
  std::size_t horizon = 256;
  double dt = 0.25;
  json fourier;
  std::optional<TorusFlow> flow;
  std::optional<TorusCocycle> cocycle;
  Shape grid;
  TrigPolynomial f;
  std::optional<SU2Cocycle> su2;
  std::optional<ShiftWeylModel> shift;
  std::optional<DirectedGraphWindow> graph;
  bool expect_admissible = true;
};

std::vector<FourierTerm> parse_terms(const json& arr, std::size_t dims, const std::string& path,
                                     std::vector<std::size_t>* components = nullptr) {
  if (!arr.is_array()) field_error(path, "expected an array of Fourier terms");
  std::vector<FourierTerm> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    const json& t = arr[i];
    if (!t.is_object()) field_error(p, "expected {frequency, re, im}");
    allow_keys(t, p, {"frequency", "re", "im", "component"});
    const json* fr = find(t, "frequency");
    if (!fr) field_error(p + "/frequency", "required");
    const std::vector<long> k = get_ints(*fr, p + "/frequency");
    if (k.size() != dims) field_error(p + "/frequency", "expected length " + std::to_string(dims));
    Frequency freq(k.begin(), k.end());
    out.push_back({freq, Complex(get_double(t, "re", p, 0.0), get_double(t, "im", p, 0.0))});
    if (components) {
      const long c = get_int(t, "component", p, 0L);
      if (c < 0) field_error(p + "/component", "must be nonnegative");
      components->push_back(static_cast<std::size_t>(c));
    }
  }
  return out;
}

Shape parse_grid(const json& model, std::size_t dims, const std::string& path, std::size_t fallback) {
  const json* g = find(model, "grid");
  if (!g) return Shape(dims, fallback);
  if (g->is_number_integer()) return Shape(dims, g->get<std::size_t>());
  const std::vector<long> v = get_ints(*g, path + "/grid");
  if (v.size() != dims) field_error(path + "/grid", "expected one resolution per axis");
  Shape s;
  for (long n : v) {
    if (n < 2) field_error(path + "/grid", "resolutions must be >= 2");
    s.push_back(static_cast<std::size_t>(n));
  }
  return s;
}

Matrix parse_inline_or_file(const json& model, const char* key, const char* file_key,
                            const std::string& path) {
  if (const json* m = find(model, key)) return matrix_from_json(*m);
  if (const json* f = find(model, file_key)) {
    if (!f->is_string()) field_error(path + "/" + file_key, "expected a path");
    std::ifstream in(f->get<std::string>());
    if (!in) field_error(path + "/" + file_key, "cannot open " + f->get<std::string>());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_matrix(ss.str());
  }
  field_error(path + "/" + key, "required matrix missing");
}

Matrix special_unitary_from_seed(std::uint64_t seed) {
  Rng rng(seed);
  Matrix g = random_unitary(2, rng);
  const Complex det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  g /= std::sqrt(det);
  return g;
}

Model build_model(const json& m, std::uint64_t seed, const std::string& path) {
  if (!m.is_object()) field_error(path, "expected an object");
  Model model;
  model.type = get_string(m, "model", path);
  const std::string& type = model.type;

  if (type == "random" || type == "matrix") {
    if (type == "random") {
      allow_keys(m, path, {"model", "kind", "dim", "scale", "horizon", "dt", "fourier"});
    } else {
      allow_keys(m, path, {"model", "kind", "main", "main_file", "conjugate", "conjugate_file",
                           "horizon", "dt", "fourier"});
    }
    const std::string kind = get_string(m, "kind", path, std::string("discrete"));
    if (kind != "discrete" && kind != "continuous") field_error(path + "/kind", "discrete or continuous");
    Matrix main, conj;
    if (type == "random") {
      const long dim = get_int(m, "dim", path);
      if (dim < 1 || dim > 512) field_error(path + "/dim", "must be in [1, 512]");
      const double scale = get_double(m, "scale", path, 1.0);
      Rng rng(seed);
      if (kind == "discrete") {
        main = random_unitary(dim, rng);
      } else {
        main = random_hermitian(dim, rng, scale);
      }
      conj = random_hermitian(dim, rng);
    } else {
      main = parse_inline_or_file(m, "main", "main_file", path);
      conj = parse_inline_or_file(m, "conjugate", "conjugate_file", path);
    }
    model.pair = kind == "discrete" ? OperatorPair::discrete(main, conj)
                                    : OperatorPair::continuous(main, conj);
    const long horizon = get_int(m, "horizon", path, 256L);
    if (horizon < 16) field_error(path + "/horizon", "must be >= 16");
    model.horizon = static_cast<std::size_t>(horizon);
    model.dt = get_double(m, "dt", path, 0.25);
    if (!(model.dt > 0.0)) field_error(path + "/dt", "must be positive");
    model.fourier = m.value("fourier", json::object());
    if (!model.fourier.is_object()) field_error(path + "/fourier", "expected an object");
    allow_keys(model.fourier, path + "/fourier", {"center", "half_width", "n_max", "gamma"});
    return model;
  }

  if (type == "torus") {
    allow_keys(m, path, {"model", "y", "B", "q", "eta", "grid", "horizon", "f"});
    model.flow.emplace(get_doubles(m, "y", path));
    const std::size_t d = model.flow->dims();
    const json* bj = find(m, "B");
    if (!bj || !bj->is_array() || bj->empty()) field_error(path + "/B", "expected a non-empty matrix");
    std::vector<std::vector<long>> b;
    for (std::size_t r = 0; r < bj->size(); ++r) b.push_back(get_ints((*bj)[r], path + "/B/" + std::to_string(r)));
    const json* qj = find(m, "q");
    if (!qj) field_error(path + "/q", "required");
    const std::vector<long> q = get_ints(*qj, path + "/q");
    std::vector<std::size_t> comps;
    const std::vector<FourierTerm> eta = parse_terms(m.value("eta", json::array()), d, path + "/eta", &comps);
    std::vector<EtaTerm> eta_terms;
    for (std::size_t i = 0; i < eta.size(); ++i) eta_terms.push_back({eta[i].frequency, eta[i].coeff, comps[i]});
    model.cocycle.emplace(b, eta_terms, q);
    if (model.cocycle->base_dims() != d) field_error(path + "/B", "columns must match the dimension of y");
    model.grid = parse_grid(m, d, path, 256);
    validate_shape(model.grid);
    const long horizon = get_int(m, "horizon", path, 512L);
    if (horizon < 16) field_error(path + "/horizon", "must be >= 16");
    model.horizon = static_cast<std::size_t>(horizon);
    if (const json* fj = find(m, "f")) {
      model.f = TrigPolynomial(d, parse_terms(*fj, d, path + "/f"));
    } else {
      model.f = TrigPolynomial(d, {{Frequency(d, 0), Complex(1.0)}});
    }
    if (model.f.l2_norm_sq() == 0.0) field_error(path + "/f", "must be nonzero");
    return model;
  }

  if (type == "su2") {
    allow_keys(m, path, {"model", "y", "b", "eta", "n", "h", "h_seed", "grid"});
    model.flow.emplace(get_doubles(m, "y", path));
    const std::size_t d = model.flow->dims();
    const json* bj = find(m, "b");
    if (!bj) field_error(path + "/b", "required");
    const std::vector<long> b = get_ints(*bj, path + "/b");
    if (b.size() != d) field_error(path + "/b", "must match the dimension of y");
    const TrigPolynomial eta(d, parse_terms(m.value("eta", json::array()), d, path + "/eta"));
    const long n = get_int(m, "n", path);
    if (n < 0 || n > 64) field_error(path + "/n", "must be in [0, 64]");
    Matrix h(2, 2);
    if (const json* hj = find(m, "h")) {
      h = matrix_from_json(*hj);
    } else {
      h = special_unitary_from_seed(static_cast<std::uint64_t>(get_int(m, "h_seed", path, 11L)));
    }
    model.su2.emplace(h, b, eta, static_cast<std::size_t>(n));
    model.grid = parse_grid(m, d, path, 512);
    validate_shape(model.grid);
    return model;
  }

  if (type == "shift") {
    allow_keys(m, path, {"model", "window", "margin"});
    const long window = get_int(m, "window", path);
    const long margin = get_int(m, "margin", path);
    if (window < 2 || margin < 0) field_error(path, "window >= 2 and margin >= 0 required");
    model.shift.emplace(shift_weyl_model(static_cast<std::size_t>(window), static_cast<std::size_t>(margin)));
    return model;
  }

  if (type == "graph") {
    allow_keys(m, path, {"model", "family", "size", "nx", "ny", "margin", "path", "expect_admissible"});
    const std::string family = get_string(m, "family", path);
    const long margin = get_int(m, "margin", path, 0L);
    if (margin < 0) field_error(path + "/margin", "must be nonnegative");
    const auto mg = static_cast<std::size_t>(margin);
    if (family == "z") {
      const long n = get_int(m, "size", path);
      if (n < 1) field_error(path + "/size", "must be >= 1");
      model.graph.emplace(z_window(static_cast<std::size_t>(n), mg));
    } else if (family == "z2") {
      const long nx = get_int(m, "nx", path), ny = get_int(m, "ny", path);
      if (nx < 1 || ny < 1) field_error(path, "nx, ny must be >= 1");
      model.graph.emplace(z2_window(static_cast<std::size_t>(nx), static_cast<std::size_t>(ny), mg));
    } else if (family == "four_cycle") {
      model.graph.emplace(alternating_four_cycle());
    } else if (family == "file") {
      model.graph.emplace(load_graph(get_string(m, "path", path)));
    } else {
      field_error(path + "/family", "expected z, z2, four_cycle or file");
    }
    const json* ea = find(m, "expect_admissible");
    if (ea && !ea->is_boolean()) field_error(path + "/expect_admissible", "expected a boolean");
    model.expect_admissible = ea ? ea->get<bool>() : true;
    return model;
  }

  field_error(path + "/model", "unknown model '" + type + "'");
}

// Tasks ---------------------------------------------------------------------

struct TaskOutcome {
  Status status = Status::pass;
  json metrics = json::object();
  json thresholds = json::object();
  json artifacts = json::array();
  std::string message;
};

struct ScenarioContext {
  const Scenario& scenario;
  std::uint64_t seed;
  const Thresholds& th;
  Model model;
  Rng rng;
  std::string out_dir;
  std::string rel_dir;
  bool write_files;
  std::optional<CorrelationSeries> series;
  std::optional<double> series_norm;  // ||f||^2 for torus-style decay
};

void fail_if(TaskOutcome& out, bool bad, const std::string& msg) {
  if (bad && out.status != Status::fail) {
    out.status = Status::fail;
    out.message = msg;
  }
}

void warn_if(TaskOutcome& out, bool bad, const std::string& msg) {
  if (bad && out.status == Status::pass) {
    out.status = Status::warn;
    out.message = msg;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void write_artifact(ScenarioContext& ctx, TaskOutcome& out, const std::string& name,
                    const std::function<void(std::ostream&)>& body) {
  const std::string rel = ctx.rel_dir + "/" + name;
  out.artifacts.push_back(rel);
  if (!ctx.write_files) return;
  const fs::path path = fs::path(ctx.out_dir) / rel;
  fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  body(os);
}

std::vector<Vector> make_probes(ScenarioContext& ctx, Eigen::Index dim, std::size_t count) {
  std::vector<Vector> probes;
  for (std::size_t i = 0; i < count; ++i) probes.push_back(random_unit_vector(dim, ctx.rng));
  return probes;
}

TaskOutcome task_identities(ScenarioContext& ctx) {
  TaskOutcome out;
  const Thresholds& th = ctx.th;
  const Model& m = ctx.model;
  const auto& sched = ctx.scenario.schedule;

  if (m.pair) {
    const OperatorPair& pair = *m.pair;
    if (pair.kind() == FlowKind::discrete) {
      const double a_norm = op_norm(pair.conjugate());
      const Matrix sym = symbol(pair);
      json rows = json::array();
      for (double nd : sched) {
        const auto n = static_cast<std::size_t>(nd);
        const IdentityResidual r = degree_identity_check(pair, n);
        const double bound = th.identity_rel * (1.0 + a_norm) * (1.0 + nd);
        const double alt = max_norm(birkhoff_discrete(pair.main(), sym, n) - degree_alternative(pair, n));
        rows.push_back({{"n", n}, {"residual", num(r.residual)}, {"bound", num(bound)},
                        {"alternative_gap", num(alt)}});
        fail_if(out, !(r.residual <= bound),
                "identity residual " + fmt(r.residual) + " exceeds " + fmt(bound) + " at N=" + std::to_string(n));
        fail_if(out, !(alt <= th.alternative_abs),
                "alternative_gap " + fmt(alt) + " exceeds " + fmt(th.alternative_abs) + " at N=" + std::to_string(n));
      }
      out.metrics["degree_identity"] = rows;
      out.metrics["conjugate_norm"] = num(a_norm);
      out.thresholds = {{"identity_rel", th.identity_rel}, {"alternative_abs", th.alternative_abs}};
    } else {
      json rows = json::array();
      for (double t : sched) {
        const FlowIdentityResidual r = flow_identity_check(pair, t);
        rows.push_back({{"t", t}, {"residual", num(r.residual)}, {"quadrature_error", num(r.quadrature_error)}});
        fail_if(out, !(r.residual <= th.flow_factor * r.quadrature_error),
                "flow residual " + fmt(r.residual) + " exceeds " + fmt(th.flow_factor) +
                    " x quadrature error " + fmt(r.quadrature_error) + " at t=" + fmt(t));
        fail_if(out, !(r.residual <= th.flow_abs),
                "flow residual " + fmt(r.residual) + " exceeds " + fmt(th.flow_abs) + " at t=" + fmt(t));
      }
      out.metrics["flow_identity"] = rows;
      out.thresholds = {{"flow_factor", th.flow_factor}, {"flow_abs", th.flow_abs}};
    }
    return out;
  }

  if (m.cocycle) {
    const std::size_t d = m.flow->dims();
    double worst = 0.0;
    for (int trial = 0; trial < 32; ++trial) {
      Point x(d);
      for (double& v : x) v = ctx.rng.uniform();
      const long n = static_cast<long>(ctx.rng.next() % 101) - 50;
      const long k = static_cast<long>(ctx.rng.next() % 101) - 50;
      Point xn(d);
      for (std::size_t i = 0; i < d; ++i) xn[i] = x[i] + static_cast<double>(n) * m.flow->y()[i];
      const double lhs = cocycle_sum(*m.cocycle, *m.flow, x, n + k);
      const double rhs = cocycle_sum(*m.cocycle, *m.flow, x, n) + cocycle_sum(*m.cocycle, *m.flow, xn, k);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    out.metrics["cocycle_law_residual"] = num(worst);
    out.metrics["trials"] = 32;
    out.metrics["near_rational"] = m.flow->near_rational();
    out.thresholds = {{"cocycle_tol", th.cocycle_tol}};
    fail_if(out, !(worst <= th.cocycle_tol), "cocycle_law_residual " + fmt(worst) + " exceeds " + fmt(th.cocycle_tol));
    warn_if(out, m.flow->near_rational(), "translation vector is within tolerance of a rational point");
    return out;
  }

  if (m.shift) {
    const ShiftWeylModel& sw = *m.shift;
    const Matrix sym = unitary_symbol(sw.pair);
    double row_dev = 0.0;
    for (std::size_t i : sw.interior) {
      const auto r = static_cast<Eigen::Index>(i);
      Matrix e = Matrix::Zero(1, sym.cols());
      e(0, r) = 1.0;
      row_dev = std::max(row_dev, max_norm(sym.row(r) - e));
    }
    // Weyl phase on interior vectors.
    const auto dim = sw.pair.dim();
    auto interior_vector = [&]() {
      Vector v = Vector::Zero(dim);
      for (std::size_t i : sw.interior) v(static_cast<Eigen::Index>(i)) = Complex(ctx.rng.normal(), ctx.rng.normal());
      return Vector(v / v.norm());
    };
    const Vector phi = interior_vector();
    const Vector psi = interior_vector();
    const RealVector diag_a = sw.pair.conjugate().diagonal().real();
    double weyl = 0.0;
    for (double t : ctx.scenario.schedule) {
      Vector rot(dim);
      for (Eigen::Index k = 0; k < dim; ++k) rot(k) = std::polar(1.0, t * diag_a(k));
      const Vector lhs_vec = rot.asDiagonal() * (sw.pair.main() * (rot.conjugate().asDiagonal() * psi));
      const Complex lhs = phi.dot(lhs_vec);
      const Complex rhs = std::polar(1.0, t) * phi.dot(sw.pair.main() * psi);
      weyl = std::max(weyl, std::abs(lhs - rhs));
    }
    out.metrics["interior_symbol_deviation"] = num(row_dev);
    out.metrics["weyl_phase_residual"] = num(weyl);
    out.metrics["interior_rows"] = sw.interior.size();
    out.thresholds = {{"weyl_tol", th.weyl_tol}};
    fail_if(out, !(row_dev <= th.weyl_tol), "interior_symbol_deviation " + fmt(row_dev) + " exceeds " + fmt(th.weyl_tol));
    fail_if(out, !(weyl <= th.weyl_tol), "weyl_phase_residual " + fmt(weyl) + " exceeds " + fmt(th.weyl_tol));
    return out;
  }

  if (m.graph) {
    const AdmissibilityReport rep = check_admissible(*m.graph);
    if (!rep.admissible()) {
      fail_if(out, true, "graph is not admissible; operators undefined");
      return out;
    }
    const GraphOperators ops = build_operators(*m.graph, rep);
    const InteriorResiduals r = interior_residuals(ops, *m.graph);
    out.metrics["kh_residual"] = num(r.kh);
    out.metrics["iha_residual"] = num(r.iha);
    out.metrics["interior_rows"] = r.rows;
    out.thresholds = {{"graph_residual", th.graph_residual}};
    fail_if(out, !(r.kh <= th.graph_residual), "kh_residual " + fmt(r.kh) + " exceeds " + fmt(th.graph_residual));
    fail_if(out, !(r.iha <= th.graph_residual), "iha_residual " + fmt(r.iha) + " exceeds " + fmt(th.graph_residual));
    return out;
  }
  throw Error("identities: unsupported model");
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::nan("");
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TaskOutcome task_degree(ScenarioContext& ctx) {
  TaskOutcome out;
  const Thresholds& th = ctx.th;
  const Model& m = ctx.model;
  const auto& sched = ctx.scenario.schedule;

  if (m.pair) {
    DegreeOptions opts;
    opts.cauchy_threshold = th.cauchy;
    opts.keep_averages = false;
    const std::vector<Vector> probes = make_probes(ctx, m.pair->dim(), 3);
    const DegreeEstimate est = estimate_degree(*m.pair, sched, probes, opts);
    const KernelSplit split = kernel_split(est.limit, th.kernel_tol);
    out.metrics = to_json(est);
    out.metrics["limit_norm"] = num(op_norm(est.limit));
    out.metrics["kernel_dim"] = split.kernel_dim;
    out.thresholds = {{"cauchy", th.cauchy}, {"kernel_tol", th.kernel_tol}};
    warn_if(out, est.diverging, "Cauchy gaps are not decreasing over the last third of the schedule");
    warn_if(out, !est.settled, "degree estimate has not settled below the Cauchy threshold");
    return out;
  }

  if (m.cocycle) {
    std::vector<double> errs;
    double limit = 0.0;
    double lyeta = 0.0;
    for (double nd : sched) {
      const Case1Degree c1 = case1_degree(*m.cocycle, *m.flow, m.grid, static_cast<std::size_t>(nd));
      errs.push_back(c1.sup_error);
      limit = c1.limit;
      lyeta = c1.lyeta_sup;
    }
    const double slope = loglog_slope(sched, errs);
    out.metrics["limit"] = num(limit);
    out.metrics["schedule"] = nums(sched);
    out.metrics["sup_error"] = nums(errs);
    out.metrics["slope"] = num(slope);
    out.metrics["lyeta_sup_bound"] = num(lyeta);
    out.metrics["near_rational"] = m.flow->near_rational();
    out.thresholds = {{"degree_abs", th.degree_abs},
                      {"degree_slope_min", th.degree_slope_min},
                      {"degree_slope_max", th.degree_slope_max}};
    fail_if(out, !(errs.back() <= th.degree_abs),
            "sup_error " + fmt(errs.back()) + " exceeds " + fmt(th.degree_abs) + " at N=" + fmt(sched.back()));
    if (std::isfinite(slope) && sched.size() >= 3) {
      fail_if(out, slope < th.degree_slope_min || slope > th.degree_slope_max,
              "slope " + fmt(slope) + " outside [" + fmt(th.degree_slope_min) + ", " + fmt(th.degree_slope_max) + "]");
    }
    warn_if(out, m.flow->near_rational(), "translation vector is within tolerance of a rational point");
    return out;
  }

  if (m.su2) {
    json rows = json::array();
    const std::size_t expected_kernel = (m.su2->n() % 2 == 0) ? 1 : 0;
    for (double nd : sched) {
      const Case2Degree c2 = case2_degree(*m.su2, *m.flow, m.grid, static_cast<std::size_t>(nd), th.kernel_tol);
      std::vector<double> ev(c2.eigenvalues.data(), c2.eigenvalues.data() + c2.eigenvalues.size());
      std::vector<double> ex(c2.expected.data(), c2.expected.data() + c2.expected.size());
      rows.push_back({{"n_steps", c2.n}, {"eigenvalues", nums(ev)}, {"expected", nums(ex)},
                      {"max_relative_error", num(c2.max_relative_error)},
                      {"sup_deviation", num(c2.sup_deviation)}, {"kernel_dim", c2.kernel_dim}});
      fail_if(out, !(c2.max_relative_error <= th.su2_rel),
              "max_relative_error " + fmt(c2.max_relative_error) + " exceeds " + fmt(th.su2_rel));
      fail_if(out, c2.kernel_dim != expected_kernel,
              "kernel_dim " + std::to_string(c2.kernel_dim) + " != expected " + std::to_string(expected_kernel));
    }
    out.metrics["representation"] = m.su2->n();
    out.metrics["basis"] = "orthonormal monomials";
    out.metrics["expected_kernel_dim"] = expected_kernel;
    out.metrics["limits"] = rows;
    out.thresholds = {{"su2_rel", th.su2_rel}, {"kernel_tol", th.kernel_tol}};
    return out;
  }

  if (m.graph) {
    const AdmissibilityReport rep = check_admissible(*m.graph);
    if (!rep.admissible()) {
      fail_if(out, true, "graph is not admissible; operators undefined");
      return out;
    }
    const GraphOperators ops = build_operators(*m.graph, rep);
    const GraphDegree gd = graph_degree(ops, *m.graph, th.graph_kernel_tol);
    out.metrics["kernel_rank_d"] = gd.kernel_rank_d;
    out.metrics["kernel_rank_k"] = gd.kernel_rank_k;
    out.metrics["consistent"] = gd.consistent;
    out.metrics["min_eigenvalue"] = num(gd.min_eigenvalue);
    out.metrics["constancy_deviation"] = num(gd.constancy_deviation);
    out.metrics["constancy_times"] = nums(gd.constancy_times);
    out.thresholds = {{"graph_kernel_tol", th.graph_kernel_tol}, {"psd_floor", th.psd_floor}};
    fail_if(out, !gd.consistent,
            "kernel ranks differ: D " + std::to_string(gd.kernel_rank_d) + " vs K " + std::to_string(gd.kernel_rank_k));
    fail_if(out, !(gd.min_eigenvalue >= th.psd_floor),
            "min_eigenvalue " + fmt(gd.min_eigenvalue) + " below " + fmt(th.psd_floor));
    return out;
  }
  throw Error("degree: unsupported model");
}

const CorrelationSeries& ensure_series(ScenarioContext& ctx) {
  if (ctx.series) return *ctx.series;
  const Model& m = ctx.model;
  if (m.pair) {
    const auto dim = m.pair->dim();
    const Vector phi = random_unit_vector(dim, ctx.rng);
    const Vector psi = random_unit_vector(dim, ctx.rng);
    if (m.pair->kind() == FlowKind::discrete) {
      ctx.series = correlation_discrete(m.pair->main(), phi, psi, m.horizon);
    } else {
      std::vector<double> times;
      for (std::size_t k = 1; k <= m.horizon; ++k) times.push_back(static_cast<double>(k) * m.dt);
      ctx.series = correlation_continuous(m.pair->main(), phi, psi, times);
    }
  } else if (m.cocycle) {
    ctx.series = sector_correlation_series(*m.cocycle, *m.flow, m.f, m.f, m.horizon);
    ctx.series_norm = m.f.l2_norm_sq();
  } else {
    throw Error("correlation series: unsupported model");
  }
  return *ctx.series;
}

TaskOutcome task_mixing(ScenarioContext& ctx) {
  TaskOutcome out;
  const Thresholds& th = ctx.th;
  const Model& m = ctx.model;

  if (m.shift) {
    const ShiftWeylModel& sw = *m.shift;
    const auto dim = sw.pair.dim();
    Vector phi = Vector::Zero(dim);
    for (std::size_t i : sw.interior) phi(static_cast<Eigen::Index>(i)) = Complex(ctx.rng.normal(), ctx.rng.normal());
    phi /= phi.norm();
    const CorrelationSeries s = correlation_discrete(sw.pair.main(), phi, phi, std::max<std::size_t>(sw.margin, 1));
    double dev = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto n = static_cast<Eigen::Index>(k + 1);
      Complex expect = 0.0;
      for (Eigen::Index j = n; j < dim; ++j) expect += std::conj(phi(j)) * phi(j - n);
      dev = std::max(dev, std::abs(s.values[k] - expect));
    }
    out.metrics["pure_shift_deviation"] = num(dev);
    out.metrics["steps"] = s.size();
    out.thresholds = {{"weyl_tol", th.weyl_tol}};
    fail_if(out, !(dev <= th.weyl_tol), "pure_shift_deviation " + fmt(dev) + " exceeds " + fmt(th.weyl_tol));
    write_artifact(ctx, out, "mixing.csv", [&](std::ostream& os) { write_csv(os, s); });
    return out;
  }

  const CorrelationSeries& s = ensure_series(ctx);
  write_artifact(ctx, out, "mixing.csv", [&](std::ostream& os) { write_csv(os, s); });
  if (ctx.series_norm) {
    // max over N in [H/2, H] against ||f||^2
    double late = 0.0;
    const std::size_t h = s.size();
    for (std::size_t k = 0; k < h; ++k) {
      if (2 * (k + 1) >= h) late = std::max(late, std::abs(s.values[k]));
    }
    const double bound = th.decay_fraction * *ctx.series_norm;
    out.metrics["late_max"] = num(late);
    out.metrics["norm_sq"] = num(*ctx.series_norm);
    out.metrics["horizon"] = h;
    out.metrics["decayed"] = late <= bound;
    out.thresholds = {{"decay_fraction", th.decay_fraction}};
    warn_if(out, !(late <= bound), "late_max " + fmt(late) + " exceeds " + fmt(bound));
    return out;
  }
  const DecayReport d = decay_report(s, th.decay_fraction);
  out.metrics = to_json(d);
  out.metrics.erase("thresholds");
  out.metrics["horizon"] = s.size();
  out.thresholds = {{"decay_fraction", th.decay_fraction}};
  warn_if(out, !d.decayed, "no decay: late_max " + fmt(d.late_max) + " vs early_max " + fmt(d.early_max));
  return out;
}

TaskOutcome task_summability(ScenarioContext& ctx) {
  TaskOutcome out;
  const CorrelationSeries& s = ensure_series(ctx);
  SummabilityOptions opts;
  opts.saturation_fraction = ctx.th.saturation_fraction;
  opts.growth_slope = ctx.th.growth_slope;
  const SummabilityReport r = summability_report(s, opts);
  out.metrics = to_json(r);
  out.metrics.erase("thresholds");
  out.thresholds = {{"saturation_fraction", opts.saturation_fraction}, {"growth_slope", opts.growth_slope}};
  write_artifact(ctx, out, "summability.csv", [&](std::ostream& os) { write_csv(os, s); });
  warn_if(out, r.linear_growth, "partial sums grow linearly (tail slope " + fmt(r.tail_slope) + ")");
  warn_if(out, !r.saturating, "partial sums not saturating (tail fraction " + fmt(r.tail_fraction) + ")");
  return out;
}

TaskOutcome task_fourier(ScenarioContext& ctx) {
  TaskOutcome out;
  const Model& m = ctx.model;
  if (!m.pair || m.pair->kind() != FlowKind::discrete) {
    throw Error("fourier: requires a discrete (unitary) model");
  }
  const double center = m.fourier.value("center", 0.0);
  const double hw = m.fourier.value("half_width", 1.0);
  const std::size_t n_max = m.fourier.value("n_max", 512);
  const double gamma = m.fourier.value("gamma", 0.5);
  const FourierCalculus fc = fourier_calculus(
      m.pair->main(), [center, hw](Complex z) { return arc_bump(z, center, hw); }, n_max, gamma);
  out.metrics = {{"n_max", n_max}, {"gamma", gamma}, {"grid", fc.grid},
                 {"center", center}, {"half_width", hw},
                 {"reconstruction_error", num(fc.reconstruction_error)},
                 {"fit_exponent", num(fc.fit_exponent)}, {"fit_constant", num(fc.fit_constant)},
                 {"declared_constant", num(fc.declared_constant)}, {"tail_bound", num(fc.tail_bound)},
                 {"nyquist_energy", num(fc.nyquist_energy)}};
  out.thresholds = {{"reconstruction", ctx.th.reconstruction}, {"fourier_exponent", ctx.th.fourier_exponent}};
  fail_if(out, !(fc.reconstruction_error <= ctx.th.reconstruction),
          "reconstruction_error " + fmt(fc.reconstruction_error) + " exceeds " + fmt(ctx.th.reconstruction));
  fail_if(out, !(fc.fit_exponent <= ctx.th.fourier_exponent),
          "fit_exponent " + fmt(fc.fit_exponent) + " above " + fmt(ctx.th.fourier_exponent));
  write_artifact(ctx, out, "fourier.csv", [&](std::ostream& os) { write_csv(os, fc); });
  return out;
}

TaskOutcome task_admissibility(ScenarioContext& ctx) {
  TaskOutcome out;
  const AdmissibilityReport r = check_admissible(*ctx.model.graph);
  out.metrics = to_json(r, *ctx.model.graph);
  out.metrics["vertices"] = ctx.model.graph->size();
  out.metrics["edges"] = ctx.model.graph->edges().size();
  out.thresholds = {{"expect_admissible", ctx.model.expect_admissible}};
  fail_if(out, r.admissible() != ctx.model.expect_admissible,
          std::string("admissible = ") + (r.admissible() ? "true" : "false") + ", expected " +
              (ctx.model.expect_admissible ? "true" : "false"));
  return out;
}

struct ScenarioResult {
  json report;
  double seconds = 0.0;
  Status status = Status::pass;
  std::vector<std::string> failures;
};

ScenarioResult run_scenario(const Scenario& sc, std::uint64_t seed, const Thresholds& th,
                            const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult res;
  json tasks = json::array();
  const std::string rel_dir = sc.output_dir.empty() ? sc.name : sc.output_dir;
  try {
    ScenarioContext ctx{sc, seed, th, build_model(sc.model, seed, "/scenarios/" + sc.name + "/model"),
                        Rng(seed ^ 0x9e3779b97f4a7c15ull), opts.out_dir, rel_dir, opts.write_files,
                        std::nullopt, std::nullopt};
    for (const std::string& task : sc.tasks) {
      TaskOutcome out;
      try {
        if (task == "identities") {
          out = task_identities(ctx);
        } else if (task == "degree") {
          out = task_degree(ctx);
        } else if (task == "mixing") {
          out = task_mixing(ctx);
        } else if (task == "summability") {
          out = task_summability(ctx);
        } else if (task == "fourier") {
          out = task_fourier(ctx);
        } else if (task == "admissibility") {
          out = task_admissibility(ctx);
        }
      } catch (const std::exception& e) {
        out = TaskOutcome{};
        out.status = Status::fail;
        out.message = e.what();
      }
      json entry = {{"task", task}, {"status", to_string(out.status)}, {"metrics", out.metrics},
                    {"thresholds", out.thresholds}, {"artifacts", out.artifacts}};
      if (!out.message.empty()) entry["message"] = out.message;
      tasks.push_back(entry);
      res.status = worse(res.status, out.status);
      if (out.status != Status::pass) {
        res.failures.push_back(sc.name + "/" + task + " [" + to_string(out.status) + "]: " + out.message);
      }
    }
  } catch (const std::exception& e) {
    res.status = Status::fail;
    res.failures.push_back(sc.name + ": " + e.what());
    tasks.push_back({{"task", "model"}, {"status", "fail"}, {"message", e.what()}});
  }
  res.report = {{"name", sc.name}, {"status", to_string(res.status)}, {"seed", seed},
                {"model", sc.model}, {"tasks", tasks}};
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

void diff_into(const json& a, const json& b, const std::string& path, const CompareOptions& o,
               std::vector<DiffEntry>& out) {
  if (a.is_number() && b.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    if (std::abs(x - y) > o.abs_tol + o.rel_tol * std::max(std::abs(x), std::abs(y))) {
      out.push_back({path, a, b});
    }
    return;
  }
  if (a.type() != b.type()) {
    out.push_back({path, a, b});
    return;
  }
  if (a.is_object()) {
    std::set<std::string> keys;
    for (auto it = a.begin(); it != a.end(); ++it) keys.insert(it.key());
    for (auto it = b.begin(); it != b.end(); ++it) keys.insert(it.key());
    for (const std::string& k : keys) {
      const std::string p = path + "/" + k;
      const bool ia = a.contains(k), ib = b.contains(k);
      if (ia && ib) {
        diff_into(a[k], b[k], p, o, out);
      } else {
        out.push_back({p, ia ? a[k] : json(nullptr), ib ? b[k] : json(nullptr)});
      }
    }
    return;
  }
  if (a.is_array()) {
    const std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::string p = path + "/" + std::to_string(i);
      if (i < a.size() && i < b.size()) {
        diff_into(a[i], b[i], p, o, out);
      } else {
        out.push_back({p, i < a.size() ? a[i] : json(nullptr), i < b.size() ? b[i] : json(nullptr)});
      }
    }
    return;
  }
  if (a != b) out.push_back({path, a, b});
}

json eta_sine(double amplitude) {
  // amplitude * sin(2 pi x)
  return json::array({{{"frequency", {1}}, {"re", 0.0}, {"im", -amplitude / 2.0}},
                      {{"frequency", {-1}}, {"re", 0.0}, {"im", amplitude / 2.0}}});
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::warn:
      return "warn";
    case Status::fail:
      return "fail";
  }
  return "fail";
}

Status worse(Status a, Status b) { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

int exit_code(Status s, bool strict) {
  if (s == Status::fail) return 1;
  if (s == Status::warn && strict) return 1;
  return 0;
}

#define CMIX_THRESHOLD_FIELDS(X) \
  X(identity_rel)                \
  X(alternative_abs)             \
  X(flow_factor)                 \
  X(flow_abs)                    \
  X(cauchy)                      \
  X(degree_abs)                  \
  X(degree_slope_min)            \
  X(degree_slope_max)            \
  X(su2_rel)                     \
  X(kernel_tol)                  \
  X(decay_fraction)              \
  X(saturation_fraction)         \
  X(growth_slope)                \
  X(reconstruction)              \
  X(fourier_exponent)            \
  X(graph_residual)              \
  X(graph_kernel_tol)            \
  X(psd_floor)                   \
  X(weyl_tol)                    \
  X(cocycle_tol)

json to_json(const Thresholds& t) {
  json j = json::object();
#define X(name) j[#name] = t.name;
  CMIX_THRESHOLD_FIELDS(X)
#undef X
  return j;
}

Thresholds thresholds_from_json(const json& j, Thresholds base) {
  if (!j.is_object()) field_error("/thresholds", "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (!it->is_number()) field_error("/thresholds/" + key, "expected a number");
    const double v = it->get<double>();
    bool known = false;
#define X(name)            \
  if (key == #name) {      \
    base.name = v;         \
    known = true;          \
  }
    CMIX_THRESHOLD_FIELDS(X)
#undef X
    if (!known) field_error("/thresholds/" + key, "unknown threshold");
  }
  return base;
}

#undef CMIX_THRESHOLD_FIELDS

Config parse_config(const json& j) {
  if (!j.is_object()) throw ParseError("config: top level must be an object");
  allow_keys(j, "", {"schema", "version", "seed", "thresholds", "scenarios"});
  if (get_string(j, "schema", "") != "cmix.config") field_error("/schema", "expected \"cmix.config\"");
  const long version = get_int(j, "version", "");
  if (version != kConfigVersion) {
    field_error("/version", "unsupported version " + std::to_string(version) + " (this tool reads " +
                                std::to_string(kConfigVersion) + ")");
  }
  Config c;
  const long seed = get_int(j, "seed", "", 0L);
  if (seed < 0) field_error("/seed", "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  if (const json* t = find(j, "thresholds")) c.thresholds = thresholds_from_json(*t);

  const json* scs = find(j, "scenarios");
  if (!scs || !scs->is_array() || scs->empty()) field_error("/scenarios", "expected a non-empty array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < scs->size(); ++i) {
    const json& s = (*scs)[i];
    const std::string path = "/scenarios/" + std::to_string(i);
    if (!s.is_object()) field_error(path, "expected an object");
    allow_keys(s, path, {"name", "model", "tasks", "schedule", "seed", "output_dir"});
    Scenario sc;
    sc.name = get_string(s, "name", path);
    if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos) {
      field_error(path + "/name", "must be a non-empty name without path separators");
    }
    if (!names.insert(sc.name).second) field_error(path + "/name", "duplicate scenario name '" + sc.name + "'");
    const json* model = find(s, "model");
    if (!model || !model->is_object()) field_error(path + "/model", "expected an object");
    sc.model = *model;
    const std::string type = get_string(*model, "model", path + "/model");
    const auto sup = supported_tasks().find(type);
    if (sup == supported_tasks().end()) field_error(path + "/model/model", "unknown model '" + type + "'");

    const json* tasks = find(s, "tasks");
    if (!tasks || !tasks->is_array() || tasks->empty()) field_error(path + "/tasks", "expected a non-empty array");
    std::set<std::string> seen_tasks;
    for (std::size_t t = 0; t < tasks->size(); ++t) {
      const std::string tp = path + "/tasks/" + std::to_string(t);
      if (!(*tasks)[t].is_string()) field_error(tp, "expected a task name");
      const std::string name = (*tasks)[t].get<std::string>();
      if (!sup->second.count(name)) field_error(tp, "task '" + name + "' is not available for model '" + type + "'");
      if (!seen_tasks.insert(name).second) field_error(tp, "task '" + name + "' listed twice");
      sc.tasks.push_back(name);
    }

    if (find(s, "schedule")) {
      sc.schedule = get_doubles(s, "schedule", path);
    } else {
      sc.schedule = default_schedule(type, *model);
    }
    for (std::size_t k = 0; k < sc.schedule.size(); ++k) {
      const std::string sp = path + "/schedule/" + std::to_string(k);
      const double v = sc.schedule[k];
      if (!(v > 0.0)) field_error(sp, "entries must be positive");
      if (k > 0 && !(v > sc.schedule[k - 1])) field_error(sp, "schedule must be strictly increasing");
      if (discrete_schedule_model(type, *model) && v != std::floor(v)) field_error(sp, "discrete schedules take integers");
    }
    const bool needs_schedule = type != "graph";
    if (needs_schedule && sc.schedule.empty()) field_error(path + "/schedule", "must be non-empty");
    if (const json* sd = find(s, "seed")) {
      if (!sd->is_number_integer() || (!sd->is_number_unsigned() && sd->get<long long>() < 0)) {
        field_error(path + "/seed", "expected a nonnegative integer");
      }
      sc.seed = sd->get<std::uint64_t>();
    }
    sc.output_dir = get_string(s, "output_dir", path, std::string());

    // Build once so that model-level schema errors surface at validation.
    try {
      build_model(sc.model, sc.seed.value_or(0), path + "/model");
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      field_error(path + "/model", e.what());
    }
    c.scenarios.push_back(std::move(sc));
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const Config& c) {
  json scs = json::array();
  for (const Scenario& s : c.scenarios) {
    json e = {{"name", s.name}, {"model", s.model}, {"tasks", s.tasks}};
    if (!s.schedule.empty()) e["schedule"] = nums(s.schedule);
    if (s.seed) e["seed"] = *s.seed;
    if (!s.output_dir.empty()) e["output_dir"] = s.output_dir;
    scs.push_back(e);
  }
  return {{"schema", "cmix.config"}, {"version", kConfigVersion}, {"seed", c.seed},
          {"thresholds", to_json(c.thresholds)}, {"scenarios", scs}};
}

RunResult run(const Config& config, const RunOptions& options) {
  const auto wall_start = std::chrono::steady_clock::now();
  Config resolved = config;
  if (options.seed) resolved.seed = *options.seed;
  for (Scenario& s : resolved.scenarios) {
    if (!s.seed) s.seed = resolved.seed ^ fnv1a(s.name);
  }
  std::sort(resolved.scenarios.begin(), resolved.scenarios.end(),
            [](const Scenario& a, const Scenario& b) { return a.name < b.name; });

  const std::size_t n = resolved.scenarios.size();
  std::vector<ScenarioResult> results(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      const Scenario& s = resolved.scenarios[i];
      results[i] = run_scenario(s, *s.seed, resolved.thresholds, options);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  RunResult out;
  json scenarios = json::array();
  json timings = json::object();
  for (std::size_t i = 0; i < n; ++i) {
    scenarios.push_back(results[i].report);
    timings[resolved.scenarios[i].name] = results[i].seconds;
    out.status = worse(out.status, results[i].status);
    out.failures.insert(out.failures.end(), results[i].failures.begin(), results[i].failures.end());
  }
  out.report = {{"schema", "cmix.report"}, {"version", kReportVersion},
                {"tool_version", CMIX_VERSION}, {"status", to_string(out.status)},
                {"config", to_json(resolved)}, {"scenarios", scenarios}};

  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
  out.metadata = {{"schema", "cmix.metadata"}, {"version", kReportVersion}, {"started_utc", stamp.str()},
                  {"threads", threads}, {"scenario_seconds", timings},
                  {"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count()}};

  if (options.write_files) {
    fs::create_directories(options.out_dir);
    std::ofstream(fs::path(options.out_dir) / "report.json") << dump(out.report);
    std::ofstream(fs::path(options.out_dir) / "metadata.json") << dump(out.metadata);
  }
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<DiffEntry> compare(const json& a, const json& b, const CompareOptions& options) {
  for (const json* r : {&a, &b}) {
    if (!r->is_object() || r->value("schema", "") != "cmix.report") {
      throw ArgumentError("compare: input is not a cmix.report document");
    }
  }
  if (a.value("version", -1) != b.value("version", -1)) {
    throw ArgumentError("compare: report version mismatch (" + std::to_string(a.value("version", -1)) +
                        " vs " + std::to_string(b.value("version", -1)) + ")");
  }
  std::vector<DiffEntry> out;
  diff_into(a, b, "", options, out);
  return out;
}

std::map<std::string, json> example_configs() {
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  std::map<std::string, json> out;

  out["identities_random.json"] = {
      {"schema", "cmix.config"}, {"version", kConfigVersion}, {"seed", 7},
      {"scenarios",
       {{{"name", "identities_random16"},
         {"model", {{"model", "random"}, {"kind", "discrete"}, {"dim", 16}}},
         {"tasks", {"identities", "degree"}}, {"schedule", {1, 2, 5, 17, 64}}, {"seed", 7}},
        {{"name", "flow_identity_random8"},
         {"model", {{"model", "random"}, {"kind", "continuous"}, {"dim", 8}}},
         {"tasks", {"identities"}}, {"schedule", {0.5, 1.5, 3.0}}, {"seed", 7}},
        {{"name", "fourier_bump32"},
         {"model", {{"model", "random"}, {"kind", "discrete"}, {"dim", 32},
                    {"fourier", {{"center", 0.0}, {"half_width", 1.0}, {"n_max", 512}, {"gamma", 0.5}}}}},
         {"tasks", {"fourier", "mixing", "summability"}}, {"seed", 3}}}}};

  out["torus_case1.json"] = {
      {"schema", "cmix.config"}, {"version", kConfigVersion}, {"seed", 1},
      {"scenarios",
       {{{"name", "torus_case1"},
         {"model", {{"model", "torus"}, {"y", {golden}}, {"B", {{2}}}, {"q", {3}},
                    {"eta", eta_sine(0.05)}, {"grid", 256}, {"horizon", 512},
                    {"f", {{{"frequency", {0}}, {"re", 1.0}, {"im", 0.0}},
                           {{"frequency", {1}}, {"re", 0.25}, {"im", 0.0}},
                           {{"frequency", {-1}}, {"re", 0.25}, {"im", 0.0}},
                           {{"frequency", {2}}, {"re", 0.0}, {"im", -0.125}},
                           {{"frequency", {-2}}, {"re", 0.0}, {"im", 0.125}}}}}},
         {"tasks", {"degree", "identities", "mixing", "summability"}},
         {"schedule", {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024}}}}}};

  json su2 = json::array();
  for (int n = 1; n <= 3; ++n) {
    su2.push_back({{"name", "su2_case2_n" + std::to_string(n)},
                   {"model", {{"model", "su2"}, {"y", {golden}}, {"b", {1}}, {"eta", eta_sine(0.05)},
                              {"n", n}, {"h_seed", 11}, {"grid", 512}}},
                   {"tasks", {"degree"}}, {"schedule", {2000}}});
  }
  out["su2_case2.json"] = {{"schema", "cmix.config"}, {"version", kConfigVersion}, {"seed", 1}, {"scenarios", su2}};

  out["graph_suite.json"] = {
      {"schema", "cmix.config"}, {"version", kConfigVersion}, {"seed", 1},
      {"scenarios",
       {{{"name", "graph_z200"}, {"model", {{"model", "graph"}, {"family", "z"}, {"size", 200}, {"margin", 3}}},
         {"tasks", {"admissibility", "identities", "degree"}}},
        {{"name", "graph_z2_24"},
         {"model", {{"model", "graph"}, {"family", "z2"}, {"nx", 24}, {"ny", 24}, {"margin", 2}}},
         {"tasks", {"admissibility", "identities", "degree"}}},
        {{"name", "graph_four_cycle"},
         {"model", {{"model", "graph"}, {"family", "four_cycle"}, {"expect_admissible", false}}},
         {"tasks", {"admissibility"}}}}}};

  out["shift_weyl.json"] = {
      {"schema", "cmix.config"}, {"version", kConfigVersion}, {"seed", 5},
      {"scenarios",
       {{{"name", "shift_weyl64"}, {"model", {{"model", "shift"}, {"window", 64}, {"margin", 8}}},
         {"tasks", {"identities", "mixing"}}, {"schedule", {0.3, 1.0, 2.5}}}}}};
  return out;
}

}  // namespace cmix::runner
