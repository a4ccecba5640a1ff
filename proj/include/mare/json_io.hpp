#pragma once

#include <string>

#include "json.hpp"
#include "mare/linalg.hpp"
#include "mare/problem.hpp"

namespace mare::io {

using json = nlohmann::json;

/// Parses the problem format {"name"?, "n", "m", "A", "B", "C", "D"};
/// unknown keys are rejected. Throws Error(InvalidInput) on malformed input.
MareProblem problem_from_json(const json& j);
json problem_to_json(const MareProblem& p);

MareProblem load_problem(const std::string& path);
void save_problem(const MareProblem& p, const std::string& path);

/// {"rows": r, "cols": c, "entries": [[...], ...]}
Matrix matrix_from_json(const json& j);
json matrix_to_json(const Matrix& m);
Matrix load_matrix(const std::string& path);
void save_matrix(const Matrix& m, const std::string& path);

/// Nested arrays of rows.
json rows_to_json(const Matrix& m);

/// Serializes with every floating value printed to 17 significant digits;
/// non-finite values become null.
std::string dump(const json& j, int indent = 2);

json read_json_file(const std::string& path);

}  // namespace mare::io
