#pragma once

#include "lexv/bundle.hpp"
#include "lexv/errors.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace lexv {

using json = nlohmann::json;

class FormatError : public Error {
 public:
  using Error::Error;
};

// Expressions serialize as nested arrays with an operator head:
//   ["and", ["=>", "a", "b"], [">=", "x", "111.09"]]
// Strings are variable names unless they parse as a decimal; JSON integers
// are Int literals; decimals travel as strings.
json expr_to_json(const Expr& e);
Expr expr_from_json(const json& j);

json value_to_json(const Value& v);
Value value_from_json(const json& j, Sort sort);

json assignment_to_json(const Assignment& a);
/// Sorts come from `env`; names missing from env are rejected.
Assignment assignment_from_json(const json& j, const SortEnv& env);

/// Canonical bundle document. Fact literals are written as explicit SOFT
/// constraints, so bundle_from_json(bundle_to_json(b)) == b.
json bundle_to_json(const ConstraintBundle& b);
/// Parses a bundle document and expands `facts{}` into SOFT constraints.
/// Structural problems throw FormatError; semantic ones are left to
/// validate_bundle.
ConstraintBundle bundle_from_json(const json& j);

ConstraintBundle load_bundle(const std::filesystem::path& p);
void save_bundle(const ConstraintBundle& b, const std::filesystem::path& p);

json read_json_file(const std::filesystem::path& p);

/// JSON Schema (draft-07) describing the bundle document.
const json& bundle_schema();

}  // namespace lexv
