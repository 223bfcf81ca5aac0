#include <algorithm>
#include <fstream>
#include <sstream>

#include "egjms/cli.hpp"
#include "egjms/error.hpp"

namespace egjms {

using nlohmann::json;

OperatorOptions GeometrySpec::operator_options() const {
  OperatorOptions o;
  o.conformally_flat_ambient = conformally_flat;
  return o;
}

namespace {

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
  int line = 1, column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

std::string strip_location(const std::string& what) {
  const auto pos = what.rfind(" at line ");
  return pos == std::string::npos ? what : what.substr(0, pos);
}

Expr parse_field(const json& value, const std::string& field) {
  if (value.is_number()) return Expr::constant(value.get<double>());
  if (!value.is_string()) throw SpecError(field + ": expected an expression string");
  try {
    return parse_expression(value.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(field + ": " + strip_location(e.what()), e.line(), e.column());
  }
}

int get_int(const json& doc, const char* key) {
  if (!doc.contains(key)) throw SpecError(std::string("missing field '") + key + "'");
  const json& v = doc.at(key);
  if (!v.is_number_integer()) throw SpecError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

void check_variables(const Expr& e, const std::string& field, int max_x, int max_u) {
  if (e.max_x_index() > max_x)
    throw SpecError(field + ": uses x" + std::to_string(e.max_x_index()) + " but only x1..x" + std::to_string(max_x) +
                    " are defined");
  if (e.max_u_index() > max_u)
    throw SpecError(field + (max_u == 0 ? ": u variables are only defined for graph submanifolds"
                                        : ": uses u" + std::to_string(e.max_u_index()) + " beyond the codimension"));
}

MetricChart parse_metric(const json& m, int n, bool graph, int k) {
  if (!m.is_array() || static_cast<int>(m.size()) != n) throw SpecError("metric must have n rows");
  std::vector<std::vector<Expr>> rows(n, std::vector<Expr>(n));
  std::vector<std::vector<bool>> given(n, std::vector<bool>(n, false));
  const int max_u = graph ? n - k : 0;
  for (int i = 0; i < n; ++i) {
    const json& row = m[i];
    if (!row.is_array()) throw SpecError("metric row " + std::to_string(i + 1) + " must be an array");
    const int len = static_cast<int>(row.size());
    int start;
    if (len == n)
      start = 0;
    else if (len == n - i)
      start = i;
    else
      throw SpecError("metric row " + std::to_string(i + 1) + " must have " + std::to_string(n) + " or " +
                      std::to_string(n - i) + " entries");
    for (int j = start; j < n; ++j) {
      const json& v = row[j - start];
      if (v.is_null() && j < i) continue;
      const std::string field = "metric[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) + "]";
      rows[i][j] = parse_field(v, field);
      check_variables(rows[i][j], field, n, max_u);
      given[i][j] = true;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      if (!given[i][j]) {
        rows[i][j] = rows[j][i];
      } else if (rows[i][j].to_string() != rows[j][i].to_string()) {
        throw SpecError("metric entries (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") and (" +
                        std::to_string(j + 1) + "," + std::to_string(i + 1) + ") differ");
      }
    }
  MetricChart chart = MetricChart::from_rows(rows);
  if (graph) chart.u_offset = k;
  return chart;
}

std::vector<Expr> parse_list(const json& arr, std::size_t expected, const std::string& name, int max_x) {
  if (!arr.is_array() || arr.size() != expected)
    throw SpecError(name + " must have " + std::to_string(expected) + " entries");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string field = name + "[" + std::to_string(i + 1) + "]";
    Expr e = parse_field(arr[i], field);
    check_variables(e, field, max_x, 0);
    out.push_back(std::move(e));
  }
  return out;
}

GeometrySpec from_json(const json& doc, const std::string& name) {
  if (!doc.is_object()) throw SpecError("geometry must be a JSON object");
  static const std::vector<std::string> known = {"name", "n",     "k",   "metric",          "embedding",
                                                 "graph", "lambda", "omega", "box", "conformally_flat"};
  for (const auto& [key, _] : doc.items())
    if (std::find(known.begin(), known.end(), key) == known.end()) throw SpecError("unknown field '" + key + "'");

  GeometrySpec s;
  s.name = doc.contains("name") ? doc.at("name").get<std::string>() : name;
  s.n = get_int(doc, "n");
  s.k = get_int(doc, "k");
  if (s.n < 2 || s.n > 16) throw SpecError("n must lie in 2..16");
  if (s.k < 1 || s.k >= s.n) throw SpecError("k must satisfy 1 <= k <= n-1");
  const bool has_emb = doc.contains("embedding"), has_graph = doc.contains("graph");
  if (has_emb == has_graph) throw SpecError("exactly one of 'embedding' and 'graph' is required");
  if (!doc.contains("metric")) throw SpecError("missing field 'metric'");
  s.metric = parse_metric(doc.at("metric"), s.n, has_graph, s.k);
  if (has_emb) {
    s.embedding = Embedding{s.k, s.n, parse_list(doc.at("embedding"), s.n, "embedding", s.k)};
  } else {
    s.embedding = Embedding::graph(s.k, parse_list(doc.at("graph"), s.n - s.k, "graph", s.k));
  }
  s.embedding.validate();
  if (doc.contains("lambda")) {
    if (!doc.at("lambda").is_number()) throw SpecError("lambda must be a number");
    s.lambda = doc.at("lambda").get<double>();
  }
  if (doc.contains("omega")) {
    Expr w = parse_field(doc.at("omega"), "omega");
    check_variables(w, "omega", s.n, has_graph ? s.n - s.k : 0);
    s.omega = w;
  }
  if (doc.contains("box")) {
    const json& b = doc.at("box");
    if (!b.is_array() || static_cast<int>(b.size()) != s.k) throw SpecError("box needs one [lo, hi] pair per x");
    for (const json& p : b) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        throw SpecError("box entries must be [lo, hi] pairs of numbers");
      const double lo = p[0].get<double>(), hi = p[1].get<double>();
      if (!(lo < hi)) throw SpecError("box entries need lo < hi");
      s.box.emplace_back(lo, hi);
    }
  } else {
    s.box.assign(static_cast<std::size_t>(s.k), {-0.5, 0.5});
  }
  if (doc.contains("conformally_flat")) {
    if (!doc.at("conformally_flat").is_boolean()) throw SpecError("conformally_flat must be true or false");
    s.conformally_flat = doc.at("conformally_flat").get<bool>();
  }
  return s;
}

std::string diagonal_metric(int n, const std::string& factor) {
  std::string rows = "[";
  for (int i = 0; i < n; ++i) {
    rows += i ? ",[" : "[";
    for (int j = i; j < n; ++j) rows += std::string(j > i ? "," : "") + "\"" + (i == j ? factor : "0") + "\"";
    rows += "]";
  }
  return rows + "]";
}

std::string stereo_factor(int n) {
  std::string s = "4/(1";
  for (int i = 1; i <= n; ++i) s += "+x" + std::to_string(i) + "^2";
  return s + ")^2";
}

std::string box(int k, double r) {
  std::ostringstream o;
  o << "[";
  for (int i = 0; i < k; ++i) o << (i ? "," : "") << "[" << -r << "," << r << "]";
  o << "]";
  return o.str();
}

struct Builtin {
  const char* name;
  std::string json_text;  // empty for generated geometries
};

const std::vector<Builtin>& builtins() {
  static const std::vector<Builtin> list = [] {
    std::vector<Builtin> b;
    b.push_back({"euclidean3", R"j({"n":3,"k":2,"metric":)j" + diagonal_metric(3, "1") +
                                   R"j(,"embedding":["x1","x2","0"],"lambda":0,"box":)j" + box(2, 1.0) + "}"});
    b.push_back({"sphere3", R"j({"n":3,"k":2,"metric":)j" + diagonal_metric(3, stereo_factor(3)) +
                                R"j(,"embedding":["x1","x2","0"],"lambda":1,"box":)j" + box(2, 0.5) + "}"});
    b.push_back({"sphere5", R"j({"n":5,"k":4,"metric":)j" + diagonal_metric(5, stereo_factor(5)) +
                                R"j(,"embedding":["x1","x2","x3","x4","0"],"lambda":1,"box":)j" + box(4, 0.4) + "}"});
    b.push_back({"equator-s2-in-s3",
                 R"j({"n":3,"k":2,"metric":)j" + diagonal_metric(3, stereo_factor(3)) +
                     R"j(,"embedding":["2*x1/(1+x1^2+x2^2)","2*x2/(1+x1^2+x2^2)","(x1^2+x2^2-1)/(1+x1^2+x2^2)"],)j"
                     R"j("lambda":1,"box":)j" +
                     box(2, 0.5) + "}"});
    b.push_back({"great-circle-s1-in-s3", R"j({"n":3,"k":1,"metric":)j" + diagonal_metric(3, stereo_factor(3)) +
                                              R"j(,"embedding":["x1","0","0"],"lambda":1,"box":)j" + box(1, 0.8) +
                                              "}"});
    b.push_back({"clifford-torus",
                 R"j({"n":3,"k":2,"metric":)j" + diagonal_metric(3, stereo_factor(3)) +
                     R"j(,"embedding":["cos(x1)/(sqrt(2)-sin(x2))","sin(x1)/(sqrt(2)-sin(x2))","cos(x2)/(sqrt(2)-sin(x2))"],)j"
                     R"j("lambda":1,"box":)j" +
                     box(2, 1.0) + "}"});
    b.push_back({"small-sphere-umbilic",
                 R"j({"n":4,"k":3,"metric":)j" + diagonal_metric(4, stereo_factor(4)) +
                     R"j(,"embedding":["x1/(1+x1^2+x2^2+x3^2)","x2/(1+x1^2+x2^2+x3^2)","x3/(1+x1^2+x2^2+x3^2)",)j"
                     R"j("(x1^2+x2^2+x3^2-1)/(2*(1+x1^2+x2^2+x3^2))"],"conformally_flat":true,"box":)j" +
                     box(3, 0.6) + "}"});
    b.push_back({"perturbed-random", ""});
    return b;
  }();
  return list;
}

constexpr std::uint64_t kPerturbedSeed = 20240;

}  // namespace

GeometrySpec parse_geometry(std::string_view text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte);
    std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ParseError("malformed geometry JSON (" + msg + ")", line, column);
  }
  try {
    return from_json(doc, name);
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed geometry: ") + e.what());
  }
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& b : builtins()) out.emplace_back(b.name);
  return out;
}

std::optional<GeometrySpec> builtin_geometry(std::string_view name) {
  for (const auto& b : builtins()) {
    if (name != b.name) continue;
    if (!b.json_text.empty()) return parse_geometry(b.json_text, b.name);
    GeometrySpec s;
    s.name = b.name;
    s.n = 5;
    s.k = 3;
    PerturbedGeometry pg = perturbed_geometry(kPerturbedSeed, s.n, s.k);
    s.metric = std::move(pg.chart);
    s.embedding = std::move(pg.embedding);
    s.box.assign(3, {-0.5, 0.5});
    return s;
  }
  return std::nullopt;
}

GeometrySpec resolve_geometry(const std::string& name_or_path) {
  if (auto b = builtin_geometry(name_or_path)) return *b;
  std::ifstream in(name_or_path, std::ios::binary);
  if (!in) throw SpecError("'" + name_or_path + "' is neither a built-in geometry nor a readable file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_geometry(buf.str(), name_or_path);
}

}  // namespace egjms
