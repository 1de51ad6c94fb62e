#pragma once

#include "lexv/bundle.hpp"
#include "lexv/errors.hpp"
#include "lexv/json.hpp"

#include <optional>
#include <string>

namespace lexv {

enum class ModifyAction { Toggle, FixValue, InjectParameter, SetWeight, SetKind };

std::string_view action_name(ModifyAction a);

struct ModifyRequest {
  std::string target;  // constraint id or variable name
  ModifyAction action = ModifyAction::Toggle;
  json value;                      // FIX_VALUE, INJECT_PARAMETER
  std::string name;                // INJECT_PARAMETER (defaults to target)
  std::optional<Sort> sort;        // INJECT_PARAMETER
  std::optional<long> weight;      // SET_WEIGHT, SET_KIND to soft
  std::optional<Kind> kind;        // SET_KIND
  std::optional<long> expected_version;
};

/// Request that cannot apply to the bundle (unknown target, sort mismatch,
/// malformed action); maps to HTTP 400.
class ModifyError : public Error {
 public:
  using Error::Error;
};

/// Parses `{target, action, value?, name?, sort?, weight?, kind?,
/// expected_version}`; throws FormatError.
ModifyRequest modify_request_from_json(const json& j);
json to_json(const ModifyRequest& r);

/// Returns the edited copy. TOGGLE flips the literal of a Boolean fact
/// (addressed by its constraint id or by the variable) and otherwise flips a
/// constraint between HARD and SOFT, demoting with weight 1. FIX_VALUE
/// replaces the facts on a variable with one pin. INJECT_PARAMETER declares
/// a variable (if needed) and fixes it with a HARD constraint. Throws
/// ModifyError, or InvalidBundle when the result fails validation.
ConstraintBundle apply_modify(const ConstraintBundle& b, const ModifyRequest& r);

}  // namespace lexv
