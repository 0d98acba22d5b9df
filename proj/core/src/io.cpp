#include "mlwsbm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mlwsbm {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::domain_error("cannot parse number '" + s + "' in " + context);
  }
}

void zero_diagonal(Eigen::MatrixXd& m, const std::string& path, std::ostream* warnings) {
  bool warned = false;
  for (int i = 0; i < m.rows(); ++i) {
    if (m(i, i) != 0.0) {
      if (!warned && warnings)
        *warnings << "warning: " << path << ": nonzero diagonal forced to 0\n";
      warned = true;
      m(i, i) = 0.0;
    }
  }
}

Eigen::MatrixXd load_dense_csv(const std::string& path, std::ostream* warnings) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& c : cells) row.push_back(parse_double(c, path));
    if (!rows.empty() && row.size() != rows[0].size())
      throw std::domain_error(path + ": ragged CSV at line " +
                              std::to_string(rows.size() + 1));
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n == 0 || static_cast<int>(rows[0].size()) != n)
    throw std::domain_error(path + ": dense CSV must be a nonempty square matrix");
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-9)
        throw std::domain_error(path + ": asymmetric dense input at pair (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
      m(j, i) = m(i, j);
    }
  }
  zero_diagonal(m, path, warnings);
  return m;
}

Eigen::MatrixXd load_edge_list(const std::string& path, std::optional<int> n_opt,
                               std::ostream* warnings) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open " + path);
  struct Edge {
    int i, j;
    double w;
  };
  std::vector<Edge> edges;
  int max_index = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    Edge e{};
    if (!(ss >> e.i >> e.j >> e.w))
      throw std::domain_error(path + ": malformed edge at line " + std::to_string(line_no));
    if (e.i < 0 || e.j < 0)
      throw std::domain_error(path + ": negative vertex index at line " +
                              std::to_string(line_no));
    max_index = std::max(max_index, std::max(e.i, e.j));
    edges.push_back(e);
  }
  const int n = n_opt.value_or(max_index + 1);
  if (n <= 0) throw std::domain_error(path + ": empty edge list and no vertex count");
  if (max_index >= n)
    throw std::domain_error(path + ": vertex index " + std::to_string(max_index) +
                            " out of range for n=" + std::to_string(n));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : edges) {
    const auto key = std::minmax(e.i, e.j);
    if (e.i != e.j && !seen.insert({key.first, key.second}).second)
      throw std::domain_error(path + ": duplicate unordered pair (" +
                              std::to_string(key.first) + "," +
                              std::to_string(key.second) + ")");
    m(e.i, e.j) = e.w;
    m(e.j, e.i) = e.w;
  }
  zero_diagonal(m, path, warnings);
  return m;
}

}  // namespace

Eigen::MatrixXd load_adjacency(const std::string& path, AdjacencyFormat format,
                               std::optional<int> n, std::ostream* warnings) {
  switch (format) {
    case AdjacencyFormat::DenseCsv: return load_dense_csv(path, warnings);
    case AdjacencyFormat::EdgeListTsv: return load_edge_list(path, n, warnings);
  }
  throw std::logic_error("unreachable");
}

void write_dense_csv(const std::string& path, const Eigen::MatrixXd& matrix) {
  std::ofstream out(path);
  if (!out) throw std::domain_error("cannot write " + path);
  char buf[64];
  for (int i = 0; i < matrix.rows(); ++i) {
    for (int j = 0; j < matrix.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", matrix(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

std::vector<int> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::domain_error("cannot open " + path);
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      labels.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw std::domain_error(path + ": malformed label '" + line + "'");
    }
    if (labels.back() < 1)
      throw std::domain_error(path + ": labels must be 1-based positive integers");
  }
  if (labels.empty()) throw std::domain_error(path + ": empty label file");
  return labels;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path);
  if (!out) throw std::domain_error("cannot write " + path);
  for (int l : labels) out << l << '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::domain_error("cannot write " + path);
  out << content;
}

}  // namespace mlwsbm
