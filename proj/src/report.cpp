#include "odsgraph/report.hpp"

namespace odsg {

Json report_header(const std::string& command) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  return j;
}

Json names_json(const VariableTable& vars, NodeSet set) {
  Json arr = Json::array();
  for (const auto& n : vars.names(set)) arr.push_back(n);
  return arr;
}

Json to_json(const VariableTable& vars, const CiQuery& q) {
  Json j;
  j["a"] = names_json(vars, q.a);
  j["b"] = names_json(vars, q.b);
  j["given"] = names_json(vars, q.z);
  j["statement"] = format(vars, q);
  return j;
}

namespace {

Json queries(const VariableTable& vars, const std::vector<CiQuery>& qs) {
  Json arr = Json::array();
  for (const auto& q : qs) arr.push_back(to_json(vars, q));
  return arr;
}

}  // namespace

Json to_json(const VariableTable& vars, const Verdict& v) {
  Json j;
  j["satisfied"] = v.satisfied;
  j["criterion"] = v.criterion ? Json(std::string(to_string(*v.criterion))) : Json(nullptr);
  j["witnesses"] = queries(vars, v.witnesses);
  Json ordering = Json::array();
  for (const auto& step : v.ordering) {
    Json s;
    s["block"] = names_json(vars, step.block);
    s["condition"] = std::string(to_string(step.condition));
    ordering.push_back(std::move(s));
  }
  j["ordering"] = std::move(ordering);
  return j;
}

Json to_json(const VariableTable& vars, const ConditionCheck& c) {
  Json j;
  j["holds"] = c.holds;
  j["witnesses"] = queries(vars, c.witnesses);
  j["failures"] = queries(vars, c.failures);
  return j;
}

Json to_json(const VariableTable& vars, const CausalVerdict& v) {
  Json j;
  j["testable"] = v.testable;
  j["estimable_cor"] = v.estimable_cor;
  j["sufficient_set"] = names_json(vars, v.sufficient_set);
  j["z_set"] = names_json(vars, v.z_set);
  j["swapped"] = v.swapped;
  j["witnesses"] = queries(vars, v.witnesses);
  j["failures"] = queries(vars, v.failures);
  j["assumptions_flagged"] = v.assumptions_flagged;
  return j;
}

Json to_json(const VariableTable& vars, const Assignment& a) {
  Json j = Json::object();
  for (auto [v, s] : a) j[vars.name(v)] = vars[v].states.at(s);
  return j;
}

Json to_json(const VariableTable& vars, const OddsRatioReport& r) {
  Json j;
  j["y"] = vars.name(r.y);
  j["x"] = vars.name(r.x);
  j["y_category"] = vars[r.y].states.at(r.y_category);
  j["x_category"] = vars[r.x].states.at(r.x_category);
  j["y_reference"] = vars[r.y].states.at(r.y_reference);
  j["x_reference"] = vars[r.x].states.at(r.x_reference);
  j["context"] = to_json(vars, r.context);
  j["value"] = r.value;
  j["log_value"] = r.log_value;
  return j;
}

Json to_json(const VariableTable& vars, const EmpiricalOr& r) {
  Json j = to_json(vars, r.report);
  j["log_se"] = r.log_se;
  j["cells"] = {r.cells[0], r.cells[1], r.cells[2], r.cells[3]};
  return j;
}

Json to_json(const VariableTable& vars, const OrEqualityReport& r) {
  Json rows = Json::array();
  for (const auto& c : r.rows) {
    Json row;
    row["claim"] = c.claim;
    row["full_context"] = to_json(vars, c.full_context);
    row["reduced_context"] = to_json(vars, c.reduced_context);
    row["full_or"] = c.full_or;
    row["reduced_or"] = c.reduced_or;
    row["log_difference"] = c.log_difference;
    rows.push_back(std::move(row));
  }
  Json j;
  j["max_log_difference"] = r.max_log_difference;
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const Provenance& p) {
  Json j;
  j["regime"] = std::string(to_string(p.regime));
  j["seed"] = p.seed;
  j["n_requested"] = p.n_requested;
  j["n_rejected"] = p.n_rejected;
  j["threads"] = p.threads;
  return j;
}

}  // namespace odsg
