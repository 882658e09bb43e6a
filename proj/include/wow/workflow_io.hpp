#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wow/patterns.hpp"

namespace wow {

using ordered_json = nlohmann::ordered_json;

// Workflow definition file: sections `abstract_tasks` and `workflow_inputs`.
// Schema is documented in the README; this is the only on-disk workflow form.

inline ordered_json to_json(const ComputeSpec& c) {
  switch (c.kind) {
    case ComputeSpec::Kind::zero: return {{"kind", "zero"}};
    case ComputeSpec::Kind::constant:
      return {{"kind", "constant"}, {"seconds", c.seconds}};
    case ComputeSpec::Kind::uniform:
      return {{"kind", "uniform"}, {"min", c.min_s}, {"max", c.max_s}};
  }
  return {};
}

inline ComputeSpec compute_from_json(const nlohmann::json& j) {
  ComputeSpec c;
  const std::string kind = j.value("kind", "zero");
  if (kind == "zero") {
    c.kind = ComputeSpec::Kind::zero;
  } else if (kind == "constant") {
    c.kind = ComputeSpec::Kind::constant;
    c.seconds = j.at("seconds").get<double>();
  } else if (kind == "uniform") {
    c.kind = ComputeSpec::Kind::uniform;
    c.min_s = j.at("min").get<double>();
    c.max_s = j.at("max").get<double>();
  } else {
    throw std::invalid_argument("unknown compute_time kind: " + kind);
  }
  return c;
}

inline ordered_json to_json(const OutputSizeSpec& o) {
  switch (o.kind) {
    case OutputSizeSpec::Kind::uniform:
      return {{"kind", "uniform"}, {"min", o.min_bytes}, {"max", o.max_bytes}};
    case OutputSizeSpec::Kind::sum_of_inputs: return {{"kind", "sum_of_inputs"}};
    case OutputSizeSpec::Kind::constant:
      return {{"kind", "constant"}, {"bytes", o.bytes}};
  }
  return {};
}

inline OutputSizeSpec output_from_json(const nlohmann::json& j) {
  OutputSizeSpec o;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") {
    o.kind = OutputSizeSpec::Kind::uniform;
    o.min_bytes = j.at("min").get<std::int64_t>();
    o.max_bytes = j.at("max").get<std::int64_t>();
  } else if (kind == "sum_of_inputs") {
    o.kind = OutputSizeSpec::Kind::sum_of_inputs;
  } else if (kind == "constant") {
    o.kind = OutputSizeSpec::Kind::constant;
    o.bytes = j.at("bytes").get<std::int64_t>();
  } else {
    throw std::invalid_argument("unknown output_size kind: " + kind);
  }
  return o;
}

inline ordered_json to_json(const EdgeSpec& e) {
  switch (e.mapping) {
    case MappingKind::one_to_one: return {{"to", e.to}, {"mapping", "one_to_one"}};
    case MappingKind::all_to_each: return {{"to", e.to}, {"mapping", "all_to_each"}};
    case MappingKind::group_floor:
      return {{"to", e.to}, {"mapping", "group_floor"}, {"divisor", e.divisor}};
  }
  return {};
}

inline EdgeSpec edge_from_json(const nlohmann::json& j) {
  EdgeSpec e;
  e.to = j.at("to").get<std::string>();
  const std::string mapping = j.value("mapping", "all_to_each");
  if (mapping == "one_to_one") {
    e.mapping = MappingKind::one_to_one;
  } else if (mapping == "all_to_each") {
    e.mapping = MappingKind::all_to_each;
  } else if (mapping == "group_floor") {
    e.mapping = MappingKind::group_floor;
    e.divisor = j.at("divisor").get<int>();
  } else {
    throw std::invalid_argument("unknown edge mapping: " + mapping);
  }
  return e;
}

inline ordered_json to_json(const AbstractWorkflow& aw) {
  ordered_json tasks = ordered_json::array();
  for (const AbstractTaskSpec& t : aw.tasks) {
    ordered_json jt;
    jt["id"] = t.name;
    jt["instances"] = t.instances;
    jt["output_size"] = to_json(t.output);
    jt["compute_time"] = to_json(t.compute);
    jt["cpus"] = t.cpus;
    jt["mem"] = t.mem;
    ordered_json succ = ordered_json::array();
    for (const EdgeSpec& e : t.successors) succ.push_back(to_json(e));
    jt["successors"] = std::move(succ);
    if (!t.workflow_inputs.empty()) jt["workflow_inputs"] = t.workflow_inputs;
    tasks.push_back(std::move(jt));
  }
  ordered_json out;
  out["abstract_tasks"] = std::move(tasks);
  if (!aw.inputs.empty()) {
    ordered_json inputs = ordered_json::array();
    for (const WorkflowInputSpec& in : aw.inputs)
      inputs.push_back({{"id", in.name}, {"size", in.size}});
    out["workflow_inputs"] = std::move(inputs);
  }
  return out;
}

inline AbstractWorkflow workflow_from_json(const nlohmann::json& j) {
  AbstractWorkflow aw;
  for (const auto& jt : j.at("abstract_tasks")) {
    AbstractTaskSpec t;
    t.name = jt.at("id").get<std::string>();
    t.instances = jt.value("instances", 1);
    t.output = output_from_json(jt.at("output_size"));
    if (jt.contains("compute_time")) t.compute = compute_from_json(jt.at("compute_time"));
    t.cpus = jt.value("cpus", 1);
    t.mem = jt.value("mem", static_cast<std::int64_t>(4LL * 1000 * 1000 * 1000));
    if (jt.contains("successors"))
      for (const auto& je : jt.at("successors")) t.successors.push_back(edge_from_json(je));
    if (jt.contains("workflow_inputs"))
      for (const auto& ji : jt.at("workflow_inputs"))
        t.workflow_inputs.push_back(ji.get<std::string>());
    aw.tasks.push_back(std::move(t));
  }
  if (j.contains("workflow_inputs"))
    for (const auto& ji : j.at("workflow_inputs"))
      aw.inputs.push_back({ji.at("id").get<std::string>(), ji.at("size").get<std::int64_t>()});
  return aw;
}

inline void save_workflow(const AbstractWorkflow& aw, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write workflow file: " + path);
  out << to_json(aw).dump(2) << '\n';
}

inline AbstractWorkflow load_workflow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read workflow file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("workflow file " + path + ": " + e.what());
  }
  return workflow_from_json(j);
}

}  // namespace wow
