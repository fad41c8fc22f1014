#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "odsgraph/causal.hpp"
#include "odsgraph/collapsibility.hpp"
#include "odsgraph/exact.hpp"
#include "odsgraph/simulate.hpp"

namespace odsg {

using Json = nlohmann::ordered_json;

inline constexpr const char* kReportSchema = "odsgraph.report/v1";

/// {"schema": ..., "command": ...}; callers append the rest.
Json report_header(const std::string& command);

Json names_json(const VariableTable& vars, NodeSet set);
Json to_json(const VariableTable& vars, const CiQuery& q);
Json to_json(const VariableTable& vars, const Verdict& v);
Json to_json(const VariableTable& vars, const ConditionCheck& c);
Json to_json(const VariableTable& vars, const CausalVerdict& v);
Json to_json(const VariableTable& vars, const Assignment& a);
Json to_json(const VariableTable& vars, const OddsRatioReport& r);
Json to_json(const VariableTable& vars, const EmpiricalOr& r);
Json to_json(const VariableTable& vars, const OrEqualityReport& r);
Json to_json(const Provenance& p);

}  // namespace odsg
