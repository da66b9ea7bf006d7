#include "fgw/io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace fgw {

namespace {

using nlohmann::json;
constexpr int kSchemaVersion = 1;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) rows.push_back(m(i, j));
  return rows;
}

Matrix matrix_from_json(const json& a, int rows, int cols) {
  if (!a.is_array() || static_cast<int>(a.size()) != rows * cols)
    fail(ErrorKind::ParseError, "matrix payload has wrong length");
  Matrix m(rows, cols);
  int k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = a[k++].get<double>();
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
}

Vector parse_vector(const std::string& field) {
  std::vector<double> vals;
  std::stringstream ss(field);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    double v;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      fail(ErrorKind::ParseError, "bad number in input column: " + tok);
    }
    while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos])))
      ++pos;
    if (pos != tok.size())
      fail(ErrorKind::ParseError, "bad number in input column: " + tok);
    vals.push_back(v);
  }
  if (vals.empty()) fail(ErrorKind::ParseError, "empty input column");
  return Eigen::Map<Vector>(vals.data(), static_cast<int>(vals.size()));
}

bool looks_numeric(const std::string& field) {
  return field.find_first_not_of("0123456789+-.eE, \t") == std::string::npos;
}

LabeledGraph as_labeled(const RelaxedGraph& g, const std::string& where) {
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      if (g.C(i, j) != 0.0 && g.C(i, j) != 1.0)
        fail(ErrorKind::NonBinaryEntry, where + ": target graph not discrete");
  return LabeledGraph{g.C, g.F};
}

}  // namespace

std::string serialize_graph(const RelaxedGraph& g) {
  json doc;
  doc["version"] = kSchemaVersion;
  doc["n"] = g.n();
  doc["d"] = g.d();
  doc["C"] = matrix_to_json(g.C);
  doc["F"] = matrix_to_json(g.F);
  return doc.dump();
}

RelaxedGraph deserialize_graph(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    fail(ErrorKind::ParseError, "malformed graph document");
  if (!doc.contains("version") || !doc.contains("n") || !doc.contains("d") ||
      !doc.contains("C") || !doc.contains("F"))
    fail(ErrorKind::ParseError, "graph document missing required fields");
  if (doc["version"].get<int>() != kSchemaVersion)
    fail(ErrorKind::SchemaVersionMismatch,
         "unsupported graph document version");
  int n = doc["n"].get<int>();
  int d = doc["d"].get<int>();
  if (n < 1 || d < 1) fail(ErrorKind::ParseError, "invalid dimensions");
  Matrix C = matrix_from_json(doc["C"], n, n);
  Matrix F = matrix_from_json(doc["F"], n, d);
  return RelaxedGraph{C, F};
}

void save_graph(const RelaxedGraph& g, const std::filesystem::path& path) {
  write_file(path, serialize_graph(g) + "\n");
}

RelaxedGraph load_graph(const std::filesystem::path& path) {
  return deserialize_graph(read_file(path));
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "graphs", ec);
  std::ostringstream manifest;
  manifest << "input\tgraph_path\n";
  for (int i = 0; i < ds.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "graphs/g%05d.fgwg", i);
    save_graph(relax(ds.graphs[i]), dir / name);
    for (int k = 0; k < ds.inputs[i].size(); ++k) {
      if (k) manifest << ',';
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", ds.inputs[i](k));
      manifest << buf;
    }
    manifest << '\t' << name << '\n';
  }
  write_file(dir / "manifest.tsv", manifest.str());
}

Dataset load_dataset(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) fail(ErrorKind::IoError, "cannot open " + manifest.string());
  auto base = manifest.parent_path();
  Dataset ds;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("input", 0) == 0) continue;  // header
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      fail(ErrorKind::ParseError, "manifest line missing tab: " + line);
    std::string input_col = line.substr(0, tab);
    std::string graph_col = line.substr(tab + 1);
    Vector x;
    if (looks_numeric(input_col)) {
      x = parse_vector(input_col);
    } else {
      x = parse_vector(read_file(base / input_col));
    }
    RelaxedGraph g = load_graph(base / graph_col);
    ds.inputs.push_back(std::move(x));
    ds.graphs.push_back(as_labeled(g, graph_col));
  }
  if (ds.size() == 0) fail(ErrorKind::ParseError, "empty dataset manifest");
  return ds;
}

std::vector<std::vector<RelaxedGraph>> load_candidate_sets(
    const std::filesystem::path& manifest, int num_inputs) {
  std::ifstream in(manifest);
  if (!in) fail(ErrorKind::IoError, "cannot open " + manifest.string());
  auto base = manifest.parent_path();
  std::vector<std::vector<RelaxedGraph>> sets(num_inputs);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("input_id", 0) == 0) continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      fail(ErrorKind::ParseError, "candidate line missing tab: " + line);
    int id = -1;
    try {
      id = std::stoi(line.substr(0, tab));
    } catch (const std::exception&) {
      fail(ErrorKind::ParseError, "bad input id: " + line);
    }
    if (id < 0 || id >= num_inputs)
      fail(ErrorKind::ParseError, "input id out of range: " + line);
    sets[id].push_back(load_graph(base / line.substr(tab + 1)));
  }
  return sets;
}

}  // namespace fgw
