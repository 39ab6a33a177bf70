#include "ccopf/case_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "ccopf/errors.hpp"
#include "detail_fmt.hpp"

namespace ccopf {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw parse_error("parse error at line " + std::to_string(line) + ": " + what);
}

double to_double(std::string_view tok, int line) {
  try {
    std::size_t pos = 0;
    std::string s(tok);
    double v = std::stod(s, &pos);
    if (pos != s.size()) fail(line, "trailing characters in number '" + s + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + std::string(tok) + "'");
  }
}

int to_int(std::string_view tok, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    fail(line, "expected an integer, got '" + std::string(tok) + "'");
  return v;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// --- canonical format -----------------------------------------------------

// A record line is a sequence of key=value tokens; order free, all keys of
// the section required.
std::map<std::string, std::string, std::less<>> parse_record(std::string_view body, int line) {
  std::map<std::string, std::string, std::less<>> kv;
  for (auto tok : split_ws(body)) {
    auto eq = tok.find('=');
    if (eq == std::string_view::npos) fail(line, "expected key=value, got '" + std::string(tok) + "'");
    auto key = std::string(trim(tok.substr(0, eq)));
    auto val = std::string(trim(tok.substr(eq + 1)));
    if (key.empty() || val.empty()) fail(line, "empty key or value in '" + std::string(tok) + "'");
    if (!kv.emplace(key, val).second) fail(line, "duplicate field '" + key + "'");
  }
  return kv;
}

std::string need(const std::map<std::string, std::string, std::less<>>& kv,
                 const char* key, int line) {
  auto it = kv.find(key);
  if (it == kv.end()) fail(line, std::string("missing field '") + key + "'");
  return it->second;
}

GridCase parse_canonical(std::string_view text) {
  GridCase gc;
  bool saw_slack = false;
  bool saw_base = false;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      section = std::string(trim(s.substr(1, s.size() - 2)));
      if (section != "buses" && section != "branches" && section != "generators")
        fail(line, "unknown section '" + section + "'");
      continue;
    }
    if (section.empty()) {
      auto toks = split_ws(s);
      std::string key, val;
      if (toks.size() == 3 && toks[1] == "=") {
        key = std::string(toks[0]);
        val = std::string(toks[2]);
      } else if (toks.size() == 1 && toks[0].find('=') != std::string_view::npos) {
        auto eq = toks[0].find('=');
        key = std::string(trim(toks[0].substr(0, eq)));
        val = std::string(trim(toks[0].substr(eq + 1)));
      } else if (toks.size() == 2) {
        key = std::string(toks[0]);
        val = std::string(toks[1]);
      } else {
        fail(line, "expected 'key = value'");
      }
      if (key == "name") {
        gc.name = val;
      } else if (key == "base_mva") {
        gc.base_mva = to_double(val, line);
        saw_base = true;
      } else if (key == "slack_bus") {
        int id = to_int(val, line);
        gc.declared_slack_ids.push_back(id);
        if (!saw_slack) gc.slack_bus = id;
        saw_slack = true;
      } else {
        fail(line, "unknown top-level key '" + key + "'");
      }
      continue;
    }
    auto kv = parse_record(s, line);
    if (section == "buses") {
      Bus b;
      b.id = to_int(need(kv, "id", line), line);
      b.demand = to_double(need(kv, "demand", line), line);
      gc.buses.push_back(b);
    } else if (section == "branches") {
      Branch br;
      br.from_bus = to_int(need(kv, "from_bus", line), line);
      br.to_bus = to_int(need(kv, "to_bus", line), line);
      br.susceptance = to_double(need(kv, "susceptance", line), line);
      br.angle_limit = to_double(need(kv, "angle_limit", line), line);
      gc.branches.push_back(br);
    } else {
      Generator g;
      g.bus = to_int(need(kv, "bus", line), line);
      g.p_min = to_double(need(kv, "p_min", line), line);
      g.p_max = to_double(need(kv, "p_max", line), line);
      g.ramp_limit = to_double(need(kv, "ramp_limit", line), line);
      g.cost_linear = to_double(need(kv, "cost_linear", line), line);
      g.cost_const = to_double(need(kv, "cost_const", line), line);
      gc.generators.push_back(g);
    }
  }
  if (!saw_slack) throw parse_error("parse error: missing 'slack_bus' key");
  if (!saw_base) throw parse_error("parse error: missing 'base_mva' key");
  return gc;
}

// --- MATPOWER-style subset -------------------------------------------------

struct Table {
  std::vector<std::vector<double>> rows;
  std::vector<int> lines;  // source line of each row
};

// Reads `mpc.<name> = [ ... ];` matrix blocks. Only bus/branch/gen/gencost
// and baseMVA are consumed; everything else is skipped.
class MatpowerScanner {
 public:
  explicit MatpowerScanner(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    std::string pending;  // table currently being filled
    while (std::getline(in, raw)) {
      ++line;
      std::string_view s = raw;
      if (auto pc = s.find('%'); pc != std::string_view::npos) s = s.substr(0, pc);
      s = trim(s);
      if (s.empty()) continue;
      if (pending.empty()) {
        auto eq = s.find('=');
        if (s.rfind("mpc.", 0) == 0 && eq != std::string_view::npos) {
          std::string key(trim(s.substr(4, eq - 4)));
          std::string_view rhs = trim(s.substr(eq + 1));
          if (key == "baseMVA") {
            std::string_view num = rhs;
            if (!num.empty() && num.back() == ';') num = trim(num.substr(0, num.size() - 1));
            base_mva = to_double(num, line);
            saw_base = true;
          } else if (key == "bus" || key == "branch" || key == "gen" || key == "gencost") {
            if (rhs.empty() || rhs.front() != '[') fail(line, "expected '[' after mpc." + key);
            pending = key;
            rhs = trim(rhs.substr(1));
            if (!rhs.empty()) consume_rows(pending, rhs, line, pending);
          }
        }
        continue;
      }
      consume_rows(pending, s, line, pending);
    }
    if (!pending.empty()) throw parse_error("parse error: unterminated table mpc." + pending);
  }

  Table bus, branch, gen, gencost;
  double base_mva = 1.0;
  bool saw_base = false;

 private:
  void consume_rows(const std::string& key, std::string_view s, int line, std::string& pending) {
    // A line may close the table with '];'.
    bool closes = false;
    if (auto close = s.find(']'); close != std::string_view::npos) {
      closes = true;
      s = trim(s.substr(0, close));
    }
    if (!s.empty()) {
      for (auto row_text : split_rows(s)) {
        auto toks = split_ws(row_text);
        if (toks.empty()) continue;
        std::vector<double> row;
        row.reserve(toks.size());
        for (auto t : toks) row.push_back(to_double(t, line));
        table(key).rows.push_back(std::move(row));
        table(key).lines.push_back(line);
      }
    }
    if (closes) pending.clear();
  }

  static std::vector<std::string_view> split_rows(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      if (i == s.size() || s[i] == ';') {
        auto piece = trim(s.substr(start, i - start));
        if (!piece.empty()) out.push_back(piece);
        start = i + 1;
      }
    }
    return out;
  }

  Table& table(const std::string& key) {
    if (key == "bus") return bus;
    if (key == "branch") return branch;
    if (key == "gen") return gen;
    return gencost;
  }
};

double col(const std::vector<double>& row, std::size_t c, int line, const char* what) {
  if (c >= row.size()) fail(line, std::string("row too short, need column ") +
                                      std::to_string(c + 1) + " (" + what + ")");
  return row[c];
}

GridCase parse_matpower(std::string_view text) {
  MatpowerScanner scan(text);
  if (!scan.saw_base) throw parse_error("parse error: missing mpc.baseMVA");
  if (scan.bus.rows.empty()) throw parse_error("parse error: missing mpc.bus table");
  if (scan.gen.rows.empty()) throw parse_error("parse error: missing mpc.gen table");

  GridCase gc;
  gc.base_mva = scan.base_mva;

  for (std::size_t i = 0; i < scan.bus.rows.size(); ++i) {
    const auto& row = scan.bus.rows[i];
    int line = scan.bus.lines[i];
    Bus b;
    b.id = static_cast<int>(col(row, 0, line, "BUS_I"));
    int type = static_cast<int>(col(row, 1, line, "BUS_TYPE"));
    b.demand = col(row, 2, line, "PD");
    if (type == 3) gc.declared_slack_ids.push_back(b.id);
    gc.buses.push_back(b);
  }
  if (gc.declared_slack_ids.empty())
    throw validation_error("validation error: missing slack bus (no type-3 bus)");
  gc.slack_bus = gc.declared_slack_ids.front();

  for (std::size_t i = 0; i < scan.branch.rows.size(); ++i) {
    const auto& row = scan.branch.rows[i];
    int line = scan.branch.lines[i];
    if (row.size() > 10 && col(row, 10, line, "BR_STATUS") == 0.0) continue;
    Branch br;
    br.from_bus = static_cast<int>(col(row, 0, line, "F_BUS"));
    br.to_bus = static_cast<int>(col(row, 1, line, "T_BUS"));
    double x = col(row, 3, line, "BR_X");
    if (x == 0.0) fail(line, "zero branch reactance");
    br.susceptance = 1.0 / x;
    double angmax_deg = col(row, 12, line, "ANGMAX");
    if (!(angmax_deg > 0.0) || angmax_deg >= 360.0)
      fail(line, "ANGMAX must lie in (0, 360) degrees for the DC model");
    br.angle_limit = angmax_deg * kPi / 180.0;
    gc.branches.push_back(br);
  }

  std::vector<std::size_t> active;  // gen rows in service
  for (std::size_t i = 0; i < scan.gen.rows.size(); ++i) {
    const auto& row = scan.gen.rows[i];
    int line = scan.gen.lines[i];
    if (row.size() > 7 && col(row, 7, line, "GEN_STATUS") == 0.0) continue;
    Generator g;
    g.bus = static_cast<int>(col(row, 0, line, "GEN_BUS"));
    g.p_max = col(row, 8, line, "PMAX");
    g.p_min = col(row, 9, line, "PMIN");
    g.ramp_limit = col(row, 16, line, "RAMP_AGC");
    gc.generators.push_back(g);
    active.push_back(i);
  }

  if (!scan.gencost.rows.empty() && scan.gencost.rows.size() != scan.gen.rows.size())
    throw parse_error("parse error: mpc.gencost row count differs from mpc.gen");
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (scan.gencost.rows.empty()) break;
    const auto& row = scan.gencost.rows[active[k]];
    int line = scan.gencost.lines[active[k]];
    int model = static_cast<int>(col(row, 0, line, "MODEL"));
    if (model != 2) fail(line, "only polynomial gencost (MODEL=2) is supported");
    int ncost = static_cast<int>(col(row, 3, line, "NCOST"));
    if (ncost == 2) {
      gc.generators[k].cost_linear = col(row, 4, line, "c1");
      gc.generators[k].cost_const = col(row, 5, line, "c0");
    } else if (ncost == 3) {
      if (col(row, 4, line, "c2") != 0.0)
        fail(line, "quadratic cost term unsupported (linear cost model only)");
      gc.generators[k].cost_linear = col(row, 5, line, "c1");
      gc.generators[k].cost_const = col(row, 6, line, "c0");
    } else {
      fail(line, "NCOST must be 2 or 3");
    }
  }
  return gc;
}

// Merges multiple generators on one bus: limits and ramps add, the linear
// cost is capacity-weighted so the merged unit prices energy the same way
// the fleet did at full output.
void merge_colocated_generators(GridCase& gc) {
  std::vector<Generator> merged;
  std::vector<char> used(gc.generators.size(), 0);
  for (std::size_t k = 0; k < gc.generators.size(); ++k) {
    if (used[k]) continue;
    Generator acc = gc.generators[k];
    double weight = std::abs(acc.p_max);
    double cost_acc = acc.cost_linear * weight;
    double plain_acc = acc.cost_linear;
    int count = 1;
    for (std::size_t l = k + 1; l < gc.generators.size(); ++l) {
      if (used[l] || gc.generators[l].bus != acc.bus) continue;
      const auto& g = gc.generators[l];
      acc.p_min += g.p_min;
      acc.p_max += g.p_max;
      acc.ramp_limit += g.ramp_limit;
      acc.cost_const += g.cost_const;
      cost_acc += g.cost_linear * std::abs(g.p_max);
      weight += std::abs(g.p_max);
      plain_acc += g.cost_linear;
      ++count;
      used[l] = 1;
    }
    if (count > 1) acc.cost_linear = weight > 0.0 ? cost_acc / weight : plain_acc / count;
    merged.push_back(acc);
  }
  gc.generators = std::move(merged);
}

}  // namespace

GridCase parse_case(std::string_view text, CaseFormat format) {
  GridCase gc = format == CaseFormat::Canonical ? parse_canonical(text) : parse_matpower(text);
  merge_colocated_generators(gc);
  auto violations = validate_case(gc);
  if (!violations.empty()) {
    std::string msg = "validation error: ";
    for (std::size_t i = 0; i < violations.size(); ++i) {
      if (i) msg += "; ";
      msg += violations[i].invariant + " (" + violations[i].detail + ")";
    }
    throw validation_error(msg);
  }
  return gc;
}

std::string serialize_case(const GridCase& gc) {
  std::ostringstream out;
  if (!gc.name.empty()) out << "name = " << gc.name << "\n";
  out << "base_mva = " << detail::fmt_double(gc.base_mva) << "\n";
  out << "slack_bus = " << gc.slack_bus << "\n\n";
  out << "[buses]\n";
  for (const auto& b : gc.buses)
    out << "id=" << b.id << " demand=" << detail::fmt_double(b.demand) << "\n";
  out << "\n[branches]\n";
  for (const auto& br : gc.branches)
    out << "from_bus=" << br.from_bus << " to_bus=" << br.to_bus
        << " susceptance=" << detail::fmt_double(br.susceptance)
        << " angle_limit=" << detail::fmt_double(br.angle_limit) << "\n";
  out << "\n[generators]\n";
  for (const auto& g : gc.generators)
    out << "bus=" << g.bus << " p_min=" << detail::fmt_double(g.p_min) << " p_max=" << detail::fmt_double(g.p_max)
        << " ramp_limit=" << detail::fmt_double(g.ramp_limit) << " cost_linear=" << detail::fmt_double(g.cost_linear)
        << " cost_const=" << detail::fmt_double(g.cost_const) << "\n";
  return out.str();
}

GridCase load_case(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open case file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto fmt = path.extension() == ".m" ? CaseFormat::MatpowerSubset : CaseFormat::Canonical;
  GridCase gc = parse_case(buf.str(), fmt);
  if (gc.name.empty()) gc.name = path.stem().string();
  return gc;
}

}  // namespace ccopf
