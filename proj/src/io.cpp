#include "mostow/io.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <json.hpp>

#include "mostow/error.hpp"

namespace mostow {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& msg) {
  throw Error(ErrorCode::SchemaError, pointer + ": " + msg);
}

const json& require(const json& root, const char* key) {
  const auto it = root.find(key);
  if (it == root.end()) schema_error(std::string("/") + key, "required field is missing");
  return *it;
}

int require_int(const json& v, const std::string& pointer) {
  if (!v.is_number_integer()) schema_error(pointer, "expected an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    schema_error(pointer, "integer out of range");
  }
  return static_cast<int>(x);
}

std::vector<int> parse_indices(const json& v, const std::string& pointer) {
  if (!v.is_array()) schema_error(pointer, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(require_int(v[i], pointer + "/" + std::to_string(i)));
  }
  return out;
}

}  // namespace

PresentationDocument parse_presentation(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, "at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!root.is_object()) schema_error("", "document must be a JSON object");
  static const std::set<std::string> known = {"schema_version", "n", "basis", "k_indices",
                                              "p_indices", "name"};
  for (const auto& item : root.items()) {
    if (!known.count(item.key())) schema_error("/" + item.key(), "unknown field");
  }

  PresentationDocument doc;
  doc.schema_version = require_int(require(root, "schema_version"), "/schema_version");
  if (doc.schema_version != kSchemaVersion) {
    schema_error("/schema_version", "unsupported version " + std::to_string(doc.schema_version) +
                                        " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  doc.n = require_int(require(root, "n"), "/n");
  if (doc.n < 1) schema_error("/n", "matrix size must be positive");

  const json& basis = require(root, "basis");
  if (!basis.is_array()) schema_error("/basis", "expected an array of row-major matrices");
  const std::size_t expected = static_cast<std::size_t>(doc.n) * doc.n;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const std::string ptr = "/basis/" + std::to_string(i);
    const json& m = basis[i];
    if (!m.is_array()) schema_error(ptr, "expected a flat array of numbers");
    if (m.size() != expected) {
      schema_error(ptr, "expected n*n = " + std::to_string(expected) + " entries, got " +
                            std::to_string(m.size()));
    }
    std::vector<double> flat;
    flat.reserve(expected);
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (!m[j].is_number()) schema_error(ptr + "/" + std::to_string(j), "expected a number");
      const double x = m[j].get<double>();
      if (!std::isfinite(x)) schema_error(ptr + "/" + std::to_string(j), "non-finite entry");
      flat.push_back(x);
    }
    doc.basis.push_back(std::move(flat));
  }

  doc.k_indices = parse_indices(require(root, "k_indices"), "/k_indices");
  doc.p_indices = parse_indices(require(root, "p_indices"), "/p_indices");
  const int d = static_cast<int>(doc.basis.size());
  std::vector<int> seen(d, 0);
  for (const auto& [indices, ptr] : {std::pair{&doc.k_indices, std::string("/k_indices")},
                                     std::pair{&doc.p_indices, std::string("/p_indices")}}) {
    for (std::size_t j = 0; j < indices->size(); ++j) {
      const int idx = (*indices)[j];
      const std::string at = ptr + "/" + std::to_string(j);
      if (idx < 0 || idx >= d) {
        schema_error(at, "index " + std::to_string(idx) + " outside [0," + std::to_string(d) + ")");
      }
      if (seen[idx]++) schema_error(at, "index " + std::to_string(idx) + " listed twice");
    }
  }
  for (int i = 0; i < d; ++i) {
    if (!seen[i]) {
      schema_error("/p_indices", "basis element " + std::to_string(i) +
                                     " is in neither k_indices nor p_indices");
    }
  }

  if (const auto it = root.find("name"); it != root.end()) {
    if (!it->is_string()) schema_error("/name", "expected a string");
    doc.name = it->get<std::string>();
  }
  return doc;
}

std::string emit_presentation(const PresentationDocument& doc) {
  json root = json::object();
  root["schema_version"] = doc.schema_version;
  root["n"] = doc.n;
  json basis = json::array();
  for (const auto& m : doc.basis) {
    json flat = json::array();
    for (double x : m) flat.push_back(x);
    basis.push_back(std::move(flat));
  }
  root["basis"] = std::move(basis);
  root["k_indices"] = doc.k_indices;
  root["p_indices"] = doc.p_indices;
  if (doc.name) root["name"] = *doc.name;
  return root.dump(2) + "\n";
}

CartanSplit to_split(const PresentationDocument& doc) {
  CartanSplit split;
  split.g.n = doc.n;
  for (const auto& flat : doc.basis) {
    Matrix m(doc.n, doc.n);
    for (int i = 0; i < doc.n; ++i) {
      for (int j = 0; j < doc.n; ++j) m(i, j) = flat[static_cast<std::size_t>(i) * doc.n + j];
    }
    split.g.basis.push_back(std::move(m));
  }
  split.k_idx = doc.k_indices;
  split.p_idx = doc.p_indices;
  return split;
}

PresentationDocument from_split(const CartanSplit& split, std::optional<std::string> name) {
  PresentationDocument doc;
  doc.n = split.g.n;
  for (const Matrix& m : split.g.basis) {
    std::vector<double> flat;
    for (int i = 0; i < m.rows(); ++i) {
      for (int j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
    }
    doc.basis.push_back(std::move(flat));
  }
  doc.k_indices = split.k_idx;
  doc.p_indices = split.p_idx;
  doc.name = std::move(name);
  return doc;
}

namespace {

Matrix e(int n, int i, int j) { return elementary(n, i, j); }

Matrix antisym(int n, int i, int j) { return e(n, i, j) - e(n, j, i); }
Matrix sym(int n, int i, int j) { return e(n, i, j) + e(n, j, i); }

CartanSplit full_sl(int n) {
  CartanSplit s;
  s.g.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      s.k_idx.push_back(s.g.dim());
      s.g.basis.push_back(antisym(n, i, j));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      s.p_idx.push_back(s.g.dim());
      s.g.basis.push_back(sym(n, i, j));
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    s.p_idx.push_back(s.g.dim());
    s.g.basis.push_back(e(n, i, i) - e(n, i + 1, i + 1));
  }
  return s;
}

CatalogEntry entry(std::string name, std::string description, const CartanSplit& s,
                   bool semisimple = true) {
  CatalogEntry c;
  c.name = name;
  c.description = std::move(description);
  c.document = from_split(s, std::move(name));
  c.semisimple = semisimple;
  return c;
}

std::vector<CatalogEntry> build_catalog() {
  std::vector<CatalogEntry> out;
  out.push_back(entry("sl2-full", "sl(2,R) with k = so(2), p = traceless symmetric", full_sl(2)));
  out.push_back(entry("sl3-full", "sl(3,R) with k = so(3), p = traceless symmetric", full_sl(3)));

  CartanSplit block;
  block.g.n = 3;
  block.g.basis = {antisym(3, 0, 1), e(3, 0, 0) - e(3, 1, 1), sym(3, 0, 1)};
  block.k_idx = {0};
  block.p_idx = {1, 2};
  out.push_back(entry("sl2-block-in-sl3", "sl(2,R) acting on the first two coordinates of R^3", block));

  CartanSplit so21;
  so21.g.n = 3;
  so21.g.basis = {antisym(3, 0, 1), sym(3, 0, 2), sym(3, 1, 2)};
  so21.k_idx = {0};
  so21.p_idx = {1, 2};
  out.push_back(entry("so21-in-sl3", "so(2,1) preserving diag(1,1,-1)", so21));

  CartanSplit so3;
  so3.g.n = 3;
  so3.g.basis = {antisym(3, 0, 1), antisym(3, 0, 2), antisym(3, 1, 2)};
  so3.k_idx = {0, 1, 2};
  out.push_back(entry("so3-in-sl3", "compact so(3); k = g, p = 0", so3));

  CartanSplit irr;
  irr.g.n = 3;
  const Matrix h = 2.0 * e(3, 0, 0) - 2.0 * e(3, 2, 2);
  const Matrix raise = std::numbers::sqrt2 * (e(3, 0, 1) + e(3, 1, 2));
  const Matrix lower = raise.transpose();
  irr.g.basis = {raise - lower, h, raise + lower};
  irr.k_idx = {0};
  irr.p_idx = {1, 2};
  out.push_back(entry("sl2-irreducible-in-sl3",
                      "image of the 3-dimensional irreducible representation of sl(2,R)", irr));

  CartanSplit solv;
  solv.g.n = 2;
  solv.g.basis = {e(2, 0, 0) - e(2, 1, 1), e(2, 0, 1)};
  solv.p_idx = {0, 1};
  out.push_back(entry("solvable-2d", "span{H, E} in sl(2,R); not semisimple (negative case)", solv,
                      false));
  return out;
}

}  // namespace

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = build_catalog();
  return entries;
}

const CatalogEntry* find_catalog_entry(std::string_view name) {
  for (const CatalogEntry& c : catalog()) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace mostow
