#pragma once

#include <string>

#include <doctest.h>

#include "odsgraph/formats.hpp"
#include "random_models.hpp"

namespace odsg::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(ODSG_FIXTURES) + "/paper/" + name + ".graph";
}

inline Dag fixture_dag(const std::string& name) { return build_dag(load_graph(fixture_path(name))); }

inline UndirectedGraph fixture_ug(const std::string& name) {
  return build_undirected(load_graph(fixture_path(name)));
}

inline NodeSet ids(const VariableTable& vars, std::initializer_list<const char*> names) {
  NodeSet s;
  for (const char* n : names) s.insert(vars.at(n));
  return s;
}

template <typename F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an odsg::Error");
  return ErrorCode::invalid_argument;
}

}  // namespace odsg::testing
