#pragma once

#include "qhelly/bounds.hpp"
#include "qhelly/config.hpp"
#include "qhelly/selection.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace qhelly {

using Json = nlohmann::json;

// Raw (a, b) rows exactly as read or generated; normalization happens in to_polytope().
struct InstanceDocument {
  struct Row {
    Vector a;
    double b = 0.0;
  };
  int dim = 0;
  std::vector<Row> halfspaces;
  Json meta = Json::object();

  [[nodiscard]] HPolytope to_polytope(const Tolerances& tol = {}) const {
    std::vector<HalfSpace> hs;
    hs.reserve(halfspaces.size());
    for (const auto& r : halfspaces) hs.push_back(normalize_halfspace(r.a, r.b, tol));
    return HPolytope(dim, std::move(hs));
  }

  static InstanceDocument from_polytope(const HPolytope& p, Json meta = Json::object()) {
    InstanceDocument doc;
    doc.dim = p.dim();
    for (const auto& h : p.halfspaces()) doc.halfspaces.push_back({h.normal, h.offset});
    doc.meta = std::move(meta);
    return doc;
  }
};

namespace detail {

[[noreturn]] inline void bad(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline Json to_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

inline Json to_json(const Matrix& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(to_json(Vector(m.row(r).transpose())));
  return j;
}

inline Json to_json(const std::vector<Vector>& vs) {
  Json j = Json::array();
  for (const auto& v : vs) j.push_back(to_json(v));
  return j;
}

inline double number(const Json& j, ErrorKind kind, const char* what) {
  if (!j.is_number()) bad(kind, std::string("expected a number for ") + what);
  const double x = j.get<double>();
  if (!std::isfinite(x)) bad(kind, std::string("non-finite number for ") + what);
  return x;
}

inline const Json& field(const Json& j, const char* key, ErrorKind kind) {
  if (!j.is_object() || !j.contains(key)) bad(kind, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline Vector vector_from(const Json& j, ErrorKind kind, Eigen::Index expected = -1) {
  if (!j.is_array()) bad(kind, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], kind, "vector entry");
  if (expected >= 0 && v.size() != expected) bad(kind, "vector has wrong length");
  return v;
}

inline Matrix matrix_from(const Json& j, ErrorKind kind, Eigen::Index d) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != d) bad(kind, "expected a square matrix");
  Matrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) m.row(r) = vector_from(j[static_cast<std::size_t>(r)], kind, d).transpose();
  return m;
}

inline std::vector<Vector> vectors_from(const Json& j, ErrorKind kind, Eigen::Index d) {
  if (!j.is_array()) bad(kind, "expected an array of vectors");
  std::vector<Vector> out;
  for (const auto& e : j) out.push_back(vector_from(e, kind, d));
  return out;
}

inline std::vector<int> ints_from(const Json& j, ErrorKind kind) {
  if (!j.is_array()) bad(kind, "expected an array of integers");
  std::vector<int> out;
  for (const auto& e : j) {
    if (!e.is_number_integer()) bad(kind, "expected an integer");
    out.push_back(e.get<int>());
  }
  return out;
}

inline std::vector<double> doubles_from(const Json& j, ErrorKind kind) {
  if (!j.is_array()) bad(kind, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(number(e, kind, "array entry"));
  return out;
}

inline Json halfspaces_json(const HPolytope& p) {
  Json arr = Json::array();
  for (const auto& h : p.halfspaces()) arr.push_back({{"a", to_json(h.normal)}, {"b", h.offset}});
  return arr;
}

// Reads half-spaces verbatim (already normalized by the producer).
inline HPolytope halfspaces_from(const Json& j, int d, ErrorKind kind) {
  if (!j.is_array()) bad(kind, "expected a half-space array");
  std::vector<HalfSpace> hs;
  for (const auto& e : j)
    hs.push_back({vector_from(field(e, "a", kind), kind, d), number(field(e, "b", kind), kind, "offset")});
  return HPolytope(d, std::move(hs));
}

inline Json ellipsoid_json(const Ellipsoid& e) { return {{"center", to_json(e.center())}, {"shape", to_json(e.shape())}}; }

inline Ellipsoid ellipsoid_from(const Json& j, int d, ErrorKind kind) {
  try {
    return Ellipsoid(vector_from(field(j, "center", kind), kind, d), matrix_from(field(j, "shape", kind), kind, d));
  } catch (const Error& e) {
    if (e.kind() == kind) throw;
    bad(kind, std::string("invalid ellipsoid: ") + e.what());
  }
}

}  // namespace detail

inline Json tolerances_json(const Tolerances& t) {
  return {{"incidence", t.incidence},       {"dedupe", t.dedupe},
          {"spd_floor", t.spd_floor},       {"zero_normal", t.zero_normal},
          {"degenerate_radius", t.degenerate_radius}, {"contact", t.contact},
          {"solver_gap", t.solver_gap},     {"feasibility", t.feasibility},
          {"decomposition", t.decomposition}, {"weight_floor", t.weight_floor},
          {"lp_pivot", t.lp_pivot},         {"newton_cap", t.newton_cap},
          {"enumeration_cap", t.enumeration_cap}};
}

inline Tolerances tolerances_from_json(const Json& j) {
  Tolerances t;
  const auto k = ErrorKind::MalformedCertificate;
  if (!j.is_object()) detail::bad(k, "tolerances must be an object");
  auto get = [&](const char* key, double& out) {
    if (j.contains(key)) out = detail::number(j.at(key), k, key);
  };
  get("incidence", t.incidence);
  get("dedupe", t.dedupe);
  get("spd_floor", t.spd_floor);
  get("zero_normal", t.zero_normal);
  get("degenerate_radius", t.degenerate_radius);
  get("contact", t.contact);
  get("solver_gap", t.solver_gap);
  get("feasibility", t.feasibility);
  get("decomposition", t.decomposition);
  get("weight_floor", t.weight_floor);
  get("lp_pivot", t.lp_pivot);
  if (j.contains("newton_cap")) t.newton_cap = j.at("newton_cap").get<int>();
  if (j.contains("enumeration_cap")) t.enumeration_cap = j.at("enumeration_cap").get<long long>();
  return t;
}

inline Json instance_to_json(const InstanceDocument& doc) {
  Json arr = Json::array();
  for (const auto& r : doc.halfspaces) arr.push_back({{"a", detail::to_json(r.a)}, {"b", r.b}});
  return {{"dim", doc.dim}, {"halfspaces", arr}, {"meta", doc.meta}};
}

inline InstanceDocument instance_from_json(const Json& j) {
  const auto k = ErrorKind::MalformedInput;
  InstanceDocument doc;
  const auto& dim = detail::field(j, "dim", k);
  if (!dim.is_number_integer()) detail::bad(k, "dim must be an integer");
  doc.dim = dim.get<int>();
  if (doc.dim < 1 || doc.dim > kMaxDim) throw Error(ErrorKind::CapExceeded, "dim outside [1, 8]");
  const auto& hs = detail::field(j, "halfspaces", k);
  if (!hs.is_array()) detail::bad(k, "halfspaces must be an array");
  if (hs.size() > static_cast<std::size_t>(kMaxFacets)) throw Error(ErrorKind::CapExceeded, "more than 64 half-spaces");
  for (const auto& e : hs)
    doc.halfspaces.push_back({detail::vector_from(detail::field(e, "a", k), k, doc.dim),
                              detail::number(detail::field(e, "b", k), k, "b")});
  if (j.contains("meta")) doc.meta = j.at("meta");
  return doc;
}

inline Json certificate_to_json(const Certificate& c) {
  using detail::to_json;
  const auto& inst = c.instance;
  Json dec = {{"points", to_json(inst.decomposition.points)},
              {"weights", inst.decomposition.weights},
              {"sources", inst.decomposition.sources}};
  return {
      {"version", c.version},
      {"selector", c.selector},
      {"seed", c.seed},
      {"dim", c.dim()},
      {"tolerances", tolerances_json(c.tolerances)},
      {"contact_tolerance", inst.contact_tolerance},
      {"original", {{"dim", c.dim()}, {"halfspaces", detail::halfspaces_json(inst.original)}}},
      {"map", {{"linear", to_json(inst.map.linear)}, {"offset", to_json(inst.map.offset)}}},
      {"normalized", {{"dim", c.dim()}, {"halfspaces", detail::halfspaces_json(inst.normalized)}}},
      {"decomposition", dec},
      {"basis", {{"z", to_json(c.basis.z)}, {"v", to_json(c.basis.v)}, {"sources", c.basis.sources}}},
      {"s1", {{"vertices", to_json(c.s1.vertices)}, {"volume", c.s1.volume}}},
      {"e1", detail::ellipsoid_json(c.s1.e1)},
      {"u", to_json(c.s1.u)},
      {"w", to_json(c.w)},
      {"ray_t", c.ray_t},
      {"degenerate_center", c.degenerate_center},
      {"caratheodory", {{"indices", c.caratheodory.indices}, {"coefficients", c.caratheodory.coeffs}}},
      {"lambda", c.lambda},
      {"e2", detail::ellipsoid_json(c.e2)},
      {"x", to_json(c.x)},
      {"x_sources", c.x_sources},
      {"subfamily", c.subfamily},
      {"volume_f", c.volume_f},
      {"volume_g", c.volume_g},
      {"ratio", c.ratio},
      {"bound", c.bound},
  };
}

inline Certificate certificate_from_json(const Json& j) {
  using namespace detail;
  const auto k = ErrorKind::MalformedCertificate;
  try {
    Certificate c;
    const auto& dim = field(j, "dim", k);
    if (!dim.is_number_integer()) bad(k, "dim must be an integer");
    const int d = dim.get<int>();
    if (d < 1 || d > kMaxDim) bad(k, "dim outside [1, 8]");
    c.version = field(j, "version", k).get<std::string>();
    c.selector = field(j, "selector", k).get<std::string>();
    if (c.selector != "dr" && c.selector != "pivovarov") bad(k, "unknown selector");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    c.tolerances = tolerances_from_json(field(j, "tolerances", k));
    auto& inst = c.instance;
    inst.contact_tolerance = number(field(j, "contact_tolerance", k), k, "contact_tolerance");
    inst.original = halfspaces_from(field(field(j, "original", k), "halfspaces", k), d, k);
    const auto& map = field(j, "map", k);
    inst.map = {matrix_from(field(map, "linear", k), k, d), vector_from(field(map, "offset", k), k, d)};
    inst.normalized = halfspaces_from(field(field(j, "normalized", k), "halfspaces", k), d, k);
    const auto& dec = field(j, "decomposition", k);
    inst.decomposition.points = vectors_from(field(dec, "points", k), k, d);
    inst.decomposition.weights = doubles_from(field(dec, "weights", k), k);
    inst.decomposition.sources = ints_from(field(dec, "sources", k), k);
    const auto& basis = field(j, "basis", k);
    c.basis.z = vectors_from(field(basis, "z", k), k, d);
    c.basis.v = vectors_from(field(basis, "v", k), k, d);
    c.basis.sources = ints_from(field(basis, "sources", k), k);
    const auto& s1 = field(j, "s1", k);
    c.s1.vertices = vectors_from(field(s1, "vertices", k), k, d);
    c.s1.volume = number(field(s1, "volume", k), k, "s1.volume");
    c.s1.e1 = ellipsoid_from(field(j, "e1", k), d, k);
    c.s1.u = vector_from(field(j, "u", k), k, d);
    c.w = vector_from(field(j, "w", k), k, d);
    c.ray_t = number(field(j, "ray_t", k), k, "ray_t");
    c.degenerate_center = field(j, "degenerate_center", k).get<bool>();
    const auto& car = field(j, "caratheodory", k);
    c.caratheodory.indices = ints_from(field(car, "indices", k), k);
    c.caratheodory.coeffs = doubles_from(field(car, "coefficients", k), k);
    c.lambda = number(field(j, "lambda", k), k, "lambda");
    c.e2 = ellipsoid_from(field(j, "e2", k), d, k);
    c.x = vectors_from(field(j, "x", k), k, d);
    c.x_sources = ints_from(field(j, "x_sources", k), k);
    c.subfamily = ints_from(field(j, "subfamily", k), k);
    c.volume_f = number(field(j, "volume_f", k), k, "volume_f");
    c.volume_g = number(field(j, "volume_g", k), k, "volume_g");
    c.ratio = number(field(j, "ratio", k), k, "ratio");
    c.bound = number(field(j, "bound", k), k, "bound");
    return c;
  } catch (const Json::exception& e) {
    bad(k, e.what());
  } catch (const Error& e) {
    if (e.kind() == k) throw;
    bad(k, e.what());
  }
}

inline Json report_to_json(const CheckReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.items)
    checks.push_back({{"group", c.group},
                      {"name", c.name},
                      {"passed", c.passed},
                      {"slack", c.slack},
                      {"tolerance", c.tolerance},
                      {"applicable", c.applicable}});
  return {{"version", std::string(kVersion)}, {"pass", r.pass()}, {"checks", checks}};
}

inline Json read_json_file(const std::string& path, ErrorKind kind) {
  std::ifstream in(path);
  if (!in) throw Error(kind, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(kind, path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::MalformedInput, "cannot write " + path);
  out << text;
}

}  // namespace qhelly
