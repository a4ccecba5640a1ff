#include "mare/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mare/error.hpp"

namespace mare::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

Matrix nested_to_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    bad(what + " must be an array of " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      bad(what + " row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) bad(what + " entries must be numbers");
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

Eigen::Index positive_int(const json& j, const char* key) {
  if (!j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) bad(std::string("\"") + key + "\" must be a positive integer");
  return static_cast<Eigen::Index>(v.get<long long>());
}

void write_number(std::ostringstream& out, double x) {
  if (!std::isfinite(x)) {
    out << "null";
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  out << s;
}

void write(std::ostringstream& out, const json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out << "{}";
        return;
      }
      out << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out << ',';
        first = false;
        newline(depth + 1);
        out << json(it.key()).dump() << (indent < 0 ? ":" : ": ");
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out << '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out << "[]";
        return;
      }
      // Numeric rows stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_primitive(); });
      out << '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out << (flat ? ", " : ",");
        first = false;
        if (!flat) newline(depth + 1);
        write(out, v, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out << ']';
      return;
    }
    case json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out << j.dump();
      return;
  }
}

}  // namespace

MareProblem problem_from_json(const json& j) {
  if (!j.is_object()) bad("problem must be a JSON object");
  static const std::set<std::string> known{"name", "n", "m", "A", "B", "C", "D"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) bad("unknown field \"" + it.key() + "\"");
  }
  std::string name;
  if (j.contains("name")) {
    if (!j.at("name").is_string()) bad("\"name\" must be a string");
    name = j.at("name").get<std::string>();
  }
  const Eigen::Index n = positive_int(j, "n");
  const Eigen::Index m = positive_int(j, "m");
  for (const char* key : {"A", "B", "C", "D"}) {
    if (!j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  }
  Matrix a = nested_to_matrix(j.at("A"), m, m, "A");
  Matrix b = nested_to_matrix(j.at("B"), m, n, "B");
  Matrix c = nested_to_matrix(j.at("C"), n, m, "C");
  Matrix d = nested_to_matrix(j.at("D"), n, n, "D");
  return MareProblem(std::move(a), std::move(b), std::move(c), std::move(d), std::move(name));
}

json rows_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json problem_to_json(const MareProblem& p) {
  json j = json::object();
  if (!p.name().empty()) j["name"] = p.name();
  j["n"] = p.n();
  j["m"] = p.m();
  j["A"] = rows_to_json(p.a());
  j["B"] = rows_to_json(p.b());
  j["C"] = rows_to_json(p.c());
  j["D"] = rows_to_json(p.d());
  return j;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad(path + ": " + e.what());
  }
}

MareProblem load_problem(const std::string& path) { return problem_from_json(read_json_file(path)); }

void save_problem(const MareProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) bad("cannot write " + path);
  out << dump(problem_to_json(p)) << '\n';
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_object()) bad("matrix must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "rows" && it.key() != "cols" && it.key() != "entries") bad("unknown field \"" + it.key() + "\"");
  }
  const Eigen::Index rows = positive_int(j, "rows");
  const Eigen::Index cols = positive_int(j, "cols");
  if (!j.contains("entries")) bad("missing field \"entries\"");
  return nested_to_matrix(j.at("entries"), rows, cols, "entries");
}

json matrix_to_json(const Matrix& m) {
  json j = json::object();
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["entries"] = rows_to_json(m);
  return j;
}

Matrix load_matrix(const std::string& path) { return matrix_from_json(read_json_file(path)); }

void save_matrix(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) bad("cannot write " + path);
  out << dump(matrix_to_json(m)) << '\n';
}

std::string dump(const json& j, int indent) {
  std::ostringstream out;
  write(out, j, indent, 0);
  return out.str();
}

}  // namespace mare::io
