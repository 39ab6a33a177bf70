#include "ccopf/grid_case.hpp"

#include <queue>
#include <string>
#include <vector>

namespace ccopf {

int GridCase::bus_index(int id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == id) return static_cast<int>(i);
  return -1;
}

int GridCase::generator_at_bus(int id) const {
  for (std::size_t k = 0; k < generators.size(); ++k)
    if (generators[k].bus == id) return static_cast<int>(k);
  return -1;
}

int GridCase::slack_generator() const { return generator_at_bus(slack_bus); }

double GridCase::total_demand() const {
  double s = 0.0;
  for (const auto& b : buses) s += b.demand;
  return s;
}

namespace {

bool graph_connected(const GridCase& gc, std::vector<int>& unreached) {
  const int n = static_cast<int>(gc.buses.size());
  if (n == 0) return true;
  std::vector<std::vector<int>> adj(n);
  for (const auto& br : gc.branches) {
    int u = gc.bus_index(br.from_bus);
    int v = gc.bus_index(br.to_bus);
    if (u < 0 || v < 0) continue;  // reported separately
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        q.push(v);
      }
  }
  for (int i = 0; i < n; ++i)
    if (!seen[i]) unreached.push_back(gc.buses[i].id);
  return unreached.empty();
}

}  // namespace

std::vector<Violation> validate_case(const GridCase& gc) {
  std::vector<Violation> out;
  auto add = [&out](std::string inv, std::string det) {
    out.push_back({std::move(inv), std::move(det)});
  };

  if (gc.buses.empty()) add("empty case", "no buses");
  if (gc.base_mva <= 0.0) add("nonpositive base", "base_mva " + std::to_string(gc.base_mva));

  if (gc.declared_slack_ids.size() > 1) {
    std::string ids;
    for (int id : gc.declared_slack_ids) ids += (ids.empty() ? "" : ", ") + std::to_string(id);
    add("multiple slack buses", "buses " + ids);
  } else if (gc.declared_slack_ids.empty() && gc.bus_index(gc.slack_bus) < 0) {
    add("missing slack bus", "no slack declared");
  }
  if (gc.bus_index(gc.slack_bus) < 0) {
    add("unknown slack bus", "bus " + std::to_string(gc.slack_bus));
  } else if (gc.generator_at_bus(gc.slack_bus) < 0) {
    add("slack bus without generator", "bus " + std::to_string(gc.slack_bus));
  }

  for (std::size_t i = 0; i < gc.buses.size(); ++i)
    for (std::size_t j = i + 1; j < gc.buses.size(); ++j)
      if (gc.buses[i].id == gc.buses[j].id)
        add("duplicate bus id", "bus " + std::to_string(gc.buses[i].id));

  for (std::size_t e = 0; e < gc.branches.size(); ++e) {
    const auto& br = gc.branches[e];
    const std::string tag = "branch " + std::to_string(e + 1);
    if (gc.bus_index(br.from_bus) < 0)
      add("branch references missing bus", tag + " from_bus " + std::to_string(br.from_bus));
    if (gc.bus_index(br.to_bus) < 0)
      add("branch references missing bus", tag + " to_bus " + std::to_string(br.to_bus));
    if (br.from_bus == br.to_bus) add("branch self-loop", tag);
    if (!(br.susceptance > 0.0)) add("nonpositive susceptance", tag);
    if (!(br.angle_limit > 0.0)) add("nonpositive angle limit", tag);
  }

  std::vector<int> unreached;
  if (!gc.buses.empty() && !graph_connected(gc, unreached)) {
    for (int id : unreached) add("disconnected bus", "bus " + std::to_string(id));
  }

  double cap = 0.0;
  for (std::size_t k = 0; k < gc.generators.size(); ++k) {
    const auto& g = gc.generators[k];
    const std::string tag = "generator " + std::to_string(k + 1);
    if (gc.bus_index(g.bus) < 0) add("generator at missing bus", tag + " bus " + std::to_string(g.bus));
    if (g.p_min > g.p_max) add("p_min exceeds p_max", tag);
    if (!(g.ramp_limit > 0.0)) add("nonpositive ramp limit", tag);
    for (std::size_t l = k + 1; l < gc.generators.size(); ++l)
      if (gc.generators[l].bus == g.bus)
        add("multiple generators on bus", "bus " + std::to_string(g.bus));
    cap += g.p_max;
  }
  if (gc.generators.empty()) add("empty case", "no generators");

  if (!gc.generators.empty() && cap < gc.total_demand())
    add("insufficient generation capacity",
        "sum p_max " + std::to_string(cap) + " < demand " + std::to_string(gc.total_demand()));

  return out;
}

}  // namespace ccopf
