#pragma once

#include <string>
#include <vector>

namespace ccopf {

struct Bus {
  int id = 0;
  double demand = 0.0;  // MW
  bool operator==(const Bus&) const = default;
};

struct Branch {
  int from_bus = 0;
  int to_bus = 0;
  double susceptance = 0.0;   // per-unit, > 0
  double angle_limit = 0.0;   // radians, > 0
  bool operator==(const Branch&) const = default;
};

struct Generator {
  int bus = 0;
  double p_min = 0.0;       // MW
  double p_max = 0.0;       // MW
  double ramp_limit = 0.0;  // MW per step, > 0
  double cost_linear = 0.0; // currency / MWh
  double cost_const = 0.0;  // currency
  bool operator==(const Generator&) const = default;
};

// Parsed and validated grid model. Powers are MW, susceptances per-unit on
// base_mva, angles radians. Exactly one slack bus, hosting a generator;
// at most one generator per bus (parsers merge co-located units).
struct GridCase {
  std::string name;
  double base_mva = 1.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;
  int slack_bus = 0;

  // Every slack declaration seen by the parser. Normally == {slack_bus};
  // more than one entry is a validation failure.
  std::vector<int> declared_slack_ids;

  int bus_index(int id) const;        // -1 when the id is unknown
  int generator_at_bus(int id) const; // -1 when the bus has no generator
  int slack_generator() const;        // index into generators
  double total_demand() const;        // MW

  bool operator==(const GridCase&) const = default;
};

struct Violation {
  std::string invariant;  // stable slug, e.g. "multiple slack buses"
  std::string detail;     // offending element
  bool operator==(const Violation&) const = default;
};

// Checks every GridCase invariant; returns violations in a fixed order
// (slack, buses, branches, connectivity, generators, capacity).
std::vector<Violation> validate_case(const GridCase& gc);

}  // namespace ccopf
