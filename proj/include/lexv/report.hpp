#pragma once

#include "lexv/json.hpp"
#include "lexv/maxsmt.hpp"
#include "lexv/verification.hpp"

namespace lexv {

// Wire format of engine results, shared by the CLI, the store and the
// service. Numbers in models are exact decimal strings.

json to_json(const Verdict& v);
json to_json(const IllegalTermReport& r);
/// `trace` lines are attached when given.
json to_json(const CorrectionResult& r, const std::vector<std::string>& trace = {});

}  // namespace lexv
