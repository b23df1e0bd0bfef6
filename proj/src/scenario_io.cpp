#include "rsir/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rsir {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_num(const std::string& tok, const std::string& where) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number: '" + tok + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "table k:v k:v ..." | "zero" | "constant X"
CurveModel parse_curve(const std::vector<std::string>& toks, const std::string& where) {
  CurveModel m;
  if (toks.empty()) throw ConfigError(where + ": empty value");
  if (toks[0] == "zero") {
    if (toks.size() != 1) throw ConfigError(where + ": 'zero' takes no arguments");
    m.form = "zero";
  } else if (toks[0] == "constant") {
    if (toks.size() != 2) throw ConfigError(where + ": 'constant' takes one value");
    m.form = "constant";
    m.value = parse_num(toks[1], where);
  } else if (toks[0] == "table") {
    m.form = "table";
    for (std::size_t i = 1; i < toks.size(); ++i) {
      auto c = toks[i].find(':');
      if (c == std::string::npos)
        throw ConfigError(where + ": table entries are key:value, got '" + toks[i] + "'");
      m.table.keys.push_back(parse_num(toks[i].substr(0, c), where));
      m.table.values.push_back(parse_num(toks[i].substr(c + 1), where));
    }
    if (m.table.keys.empty()) throw ConfigError(where + ": empty table");
    for (std::size_t i = 0; i + 1 < m.table.keys.size(); ++i)
      if (m.table.keys[i + 1] <= m.table.keys[i])
        throw ConfigError(where + ": table keys must increase");
  } else {
    throw ConfigError(where + ": expected zero | constant | table");
  }
  return m;
}

TableData curve_as_table(const CurveModel& c) {
  if (c.form == "table") return c.table;
  TableData t;
  t.keys = {0.0};
  t.values = {c.form == "constant" ? c.value : 0.0};
  return t;
}

double eval_linear(const TableData& t, double x) {
  if (t.keys.empty()) return 0.0;
  if (x <= t.keys.front()) return t.values.front();
  if (x >= t.keys.back()) return t.values.back();
  auto it = std::upper_bound(t.keys.begin(), t.keys.end(), x);
  std::size_t i = static_cast<std::size_t>(it - t.keys.begin()) - 1;
  double w = (x - t.keys[i]) / (t.keys[i + 1] - t.keys[i]);
  return (1.0 - w) * t.values[i] + w * t.values[i + 1];
}

std::string curve_to_string(const CurveModel& c) {
  if (c.form == "zero") return "zero";
  if (c.form == "constant") return "constant " + fmt(c.value);
  std::string out = "table";
  for (std::size_t i = 0; i < c.table.keys.size(); ++i)
    out += " " + fmt(c.table.keys[i]) + ":" + fmt(c.table.values[i]);
  return out;
}

std::string table_to_string(const TableData& t) {
  std::string out = "table";
  for (std::size_t i = 0; i < t.keys.size(); ++i)
    out += " " + fmt(t.keys[i]) + ":" + fmt(t.values[i]);
  return out;
}

RateModel parse_rate(const std::vector<std::string>& toks, const std::string& where) {
  RateModel m;
  if (toks.empty()) throw ConfigError(where + ": empty value");
  if (toks[0] == "constant") {
    if (toks.size() != 2) throw ConfigError(where + ": 'constant' takes one value");
    m.form = "constant";
    m.value = parse_num(toks[1], where);
    return m;
  }
  if (toks[0] == "table") {
    CurveModel c = parse_curve(toks, where);
    m.form = "table";
    m.age_table = c.table;
    return m;
  }
  if (toks[0] == "product") {
    // product t0:v t0:v ... x a0:v a1:v ...
    auto sep = std::find(toks.begin(), toks.end(), "x");
    if (sep == toks.end())
      throw ConfigError(where + ": product form needs 'x' between the two tables");
    std::vector<std::string> left{toks.begin() + 1, sep}, right{sep + 1, toks.end()};
    left.insert(left.begin(), "table");
    right.insert(right.begin(), "table");
    m.form = "product";
    m.time_factor = parse_curve(left, where).table;
    m.age_factor = parse_curve(right, where).table;
    return m;
  }
  throw ConfigError(where + ": expected constant | table | product");
}

std::string rate_to_string(const RateModel& m) {
  if (m.form == "constant") return "constant " + fmt(m.value);
  if (m.form == "table") {
    CurveModel c;
    c.form = "table";
    c.table = m.age_table;
    return curve_to_string(c);
  }
  std::string out = "product";
  for (std::size_t i = 0; i < m.time_factor.keys.size(); ++i)
    out += " " + fmt(m.time_factor.keys[i]) + ":" + fmt(m.time_factor.values[i]);
  out += " x";
  for (std::size_t i = 0; i < m.age_factor.keys.size(); ++i)
    out += " " + fmt(m.age_factor.keys[i]) + ":" + fmt(m.age_factor.values[i]);
  return out;
}

}  // namespace

ScenarioFileModel parse_scenario_text(const std::string& text,
                                      const std::string& source_name) {
  ScenarioFileModel m;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;

  while (std::getline(is, line)) {
    ++lineno;
    std::string where = source_name + ":" + std::to_string(lineno);
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "grid" && section != "kernel" && section != "rates" &&
          section != "data" && section != "policy" && section != "solver" &&
          section != "optimize")
        throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    auto toks = split_ws(val);
    auto num = [&] {
      if (toks.size() != 1) throw ConfigError(where + ": expected a single number");
      return parse_num(toks[0], where);
    };
    auto numlist = [&] {
      std::vector<double> out;
      for (const auto& t : toks) out.push_back(parse_num(t, where));
      return out;
    };

    if (section == "grid") {
      if (key == "age_max") m.grid.age_max = num();
      else if (key == "cells_per_unit_age") m.grid.cells_per_unit_age = static_cast<int>(num());
      else if (key == "horizon") m.grid.horizon = num();
      else throw ConfigError(where + ": unknown key '" + key + "' in [grid]");
    } else if (section == "kernel") {
      if (key == "form") {
        if (toks.size() != 1 || (toks[0] != "constant" && toks[0] != "separable" &&
                                 toks[0] != "tabulated"))
          throw ConfigError(where + ": form is constant | separable | tabulated");
        m.kernel.form = toks[0];
      } else if (key == "value") m.kernel.value = num();
      else if (key == "scale") m.kernel.scale = num();
      else if (key == "phi") m.kernel.phi = parse_curve(toks, where).table;
      else if (key == "psi") m.kernel.psi = parse_curve(toks, where).table;
      else if (key == "ages") m.kernel.ages = numlist();
      else if (key == "ages_prime") m.kernel.ages_prime = numlist();
      else if (key.rfind("row_", 0) == 0) {
        std::size_t idx = static_cast<std::size_t>(parse_num(key.substr(4), where));
        if (idx != m.kernel.rows.size() + 1)
          throw ConfigError(where + ": kernel rows must be row_1, row_2, ... in order");
        m.kernel.rows.push_back(numlist());
      } else if (key == "lambda_inf") m.kernel.lambda_inf = num();
      else if (key == "lambda_lip") m.kernel.lambda_lip = num();
      else throw ConfigError(where + ": unknown key '" + key + "' in [kernel]");
    } else if (section == "rates") {
      if (key == "d_S") m.rates.d_S = parse_rate(toks, where);
      else if (key == "d_I") m.rates.d_I = parse_rate(toks, where);
      else if (key == "d_R") m.rates.d_R = parse_rate(toks, where);
      else if (key == "r_I") m.rates.r_I = parse_rate(toks, where);
      else if (key == "rate_lip") m.rates.rate_lip = num();
      else if (key == "rate_l1") m.rates.rate_l1 = num();
      else if (key == "rate_inf") m.rates.rate_inf = num();
      else throw ConfigError(where + ": unknown key '" + key + "' in [rates]");
    } else if (section == "data") {
      if (key == "S_o") m.S_o = parse_curve(toks, where);
      else if (key == "I_o") m.I_o = parse_curve(toks, where);
      else if (key == "R_o") m.R_o = parse_curve(toks, where);
      else if (key == "S_b") m.S_b = parse_curve(toks, where);
      else if (key == "I_b") m.I_b = parse_curve(toks, where);
      else if (key == "R_b") m.R_b = parse_curve(toks, where);
      else throw ConfigError(where + ": unknown key '" + key + "' in [data]");
    } else if (section == "policy") {
      if (key == "variant") {
        if (toks.size() != 1 || (toks[0] != "none" && toks[0] != "age" && toks[0] != "time"))
          throw ConfigError(where + ": variant is none | age | time");
        m.policy.variant = toks[0];
      } else if (key == "ages") m.policy.ages = numlist();
      else if (key == "times") m.policy.times = numlist();
      else if (key.rfind("eta_", 0) == 0 || key.rfind("nu_", 0) == 0) {
        std::size_t idx = static_cast<std::size_t>(
            parse_num(key.substr(key.find('_') + 1), where));
        if (idx != m.policy.controls.size() + 1)
          throw ConfigError(where + ": controls must appear in order (" + key + ")");
        m.policy.controls.push_back(parse_curve(toks, where).table);
      } else throw ConfigError(where + ": unknown key '" + key + "' in [policy]");
    } else if (section == "solver") {
      if (key == "solver_tol") m.solver.solver_tol = num();
      else if (key == "fp_tol") m.solver.fp_tol = num();
      else if (key == "pos_tol") m.solver.pos_tol = num();
      else if (key == "max_iter") m.solver.max_iter = static_cast<int>(num());
      else if (key == "window_initial") m.solver.window_initial = num();
      else if (key == "blowup_factor") m.solver.blowup_factor = num();
      else if (key == "allow_signed_rates") m.solver.allow_signed_rates = num() != 0;
      else if (key == "output_stride") m.solver.output_stride = static_cast<int>(num());
      else if (key == "threads") m.solver.threads = static_cast<int>(num());
      else throw ConfigError(where + ": unknown key '" + key + "' in [solver]");
    } else if (section == "optimize") {
      if (key == "direction") {
        if (toks.size() != 1 || (toks[0] != "min_cost" && toks[0] != "min_effect"))
          throw ConfigError(where + ": direction is min_cost | min_effect");
        m.optimize.direction = toks[0];
      } else if (key == "cap") m.optimize.cap = num();
      else if (key == "cost_variant") {
        static const char* variants[] = {"age_susceptible", "age_whole",
                                         "time_susceptible", "time_whole"};
        if (toks.size() != 1 ||
            std::find(std::begin(variants), std::end(variants), toks[0]) == std::end(variants))
          throw ConfigError(where + ": unknown cost_variant '" + val + "'");
        m.optimize.cost_variant = toks[0];
      } else if (key == "bins") m.optimize.bins = static_cast<int>(num());
      else if (key == "budget") m.optimize.budget = static_cast<int>(num());
      else if (key == "seed") m.optimize.seed = static_cast<std::uint64_t>(num());
      else throw ConfigError(where + ": unknown key '" + key + "' in [optimize]");
    } else {
      throw ConfigError(where + ": key outside any section");
    }
  }
  // resolve defaults so that the model is total and echoes verbatim
  if (m.kernel.form == "separable") {
    if (m.kernel.phi.keys.empty()) m.kernel.phi = TableData{{0.0}, {1.0}};
    if (m.kernel.psi.keys.empty()) m.kernel.psi = TableData{{0.0}, {1.0}};
  }
  return m;
}

ScenarioFileModel parse_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

std::string serialize_scenario(const ScenarioFileModel& m) {
  std::ostringstream os;
  os << "[grid]\n";
  os << "age_max = " << fmt(m.grid.age_max) << "\n";
  os << "cells_per_unit_age = " << m.grid.cells_per_unit_age << "\n";
  os << "horizon = " << fmt(m.grid.horizon) << "\n\n";

  os << "[kernel]\n";
  os << "form = " << m.kernel.form << "\n";
  if (m.kernel.form == "constant") os << "value = " << fmt(m.kernel.value) << "\n";
  if (m.kernel.form == "separable") {
    os << "scale = " << fmt(m.kernel.scale) << "\n";
    os << "phi = " << table_to_string(m.kernel.phi) << "\n";
    os << "psi = " << table_to_string(m.kernel.psi) << "\n";
  }
  if (m.kernel.form == "tabulated") {
    auto list = [&](const std::vector<double>& v) {
      std::string out;
      for (double x : v) out += (out.empty() ? "" : " ") + fmt(x);
      return out;
    };
    os << "ages = " << list(m.kernel.ages) << "\n";
    os << "ages_prime = " << list(m.kernel.ages_prime) << "\n";
    for (std::size_t r = 0; r < m.kernel.rows.size(); ++r)
      os << "row_" << r + 1 << " = " << list(m.kernel.rows[r]) << "\n";
  }
  os << "lambda_inf = " << fmt(m.kernel.lambda_inf) << "\n";
  os << "lambda_lip = " << fmt(m.kernel.lambda_lip) << "\n\n";

  os << "[rates]\n";
  os << "d_S = " << rate_to_string(m.rates.d_S) << "\n";
  os << "d_I = " << rate_to_string(m.rates.d_I) << "\n";
  os << "d_R = " << rate_to_string(m.rates.d_R) << "\n";
  os << "r_I = " << rate_to_string(m.rates.r_I) << "\n";
  os << "rate_lip = " << fmt(m.rates.rate_lip) << "\n";
  os << "rate_l1 = " << fmt(m.rates.rate_l1) << "\n";
  os << "rate_inf = " << fmt(m.rates.rate_inf) << "\n\n";

  os << "[data]\n";
  os << "S_o = " << curve_to_string(m.S_o) << "\n";
  os << "I_o = " << curve_to_string(m.I_o) << "\n";
  os << "R_o = " << curve_to_string(m.R_o) << "\n";
  os << "S_b = " << curve_to_string(m.S_b) << "\n";
  os << "I_b = " << curve_to_string(m.I_b) << "\n";
  os << "R_b = " << curve_to_string(m.R_b) << "\n\n";

  os << "[policy]\n";
  os << "variant = " << m.policy.variant << "\n";
  auto list = [&](const std::vector<double>& v) {
    std::string out;
    for (double x : v) out += (out.empty() ? "" : " ") + fmt(x);
    return out;
  };
  if (m.policy.variant == "age") os << "ages = " << list(m.policy.ages) << "\n";
  if (m.policy.variant == "time") os << "times = " << list(m.policy.times) << "\n";
  for (std::size_t j = 0; j < m.policy.controls.size(); ++j) {
    const char* prefix = m.policy.variant == "age" ? "eta_" : "nu_";
    os << prefix << j + 1 << " = " << table_to_string(m.policy.controls[j]) << "\n";
  }
  os << "\n[solver]\n";
  os << "solver_tol = " << fmt(m.solver.solver_tol) << "\n";
  os << "fp_tol = " << fmt(m.solver.fp_tol) << "\n";
  os << "pos_tol = " << fmt(m.solver.pos_tol) << "\n";
  os << "max_iter = " << m.solver.max_iter << "\n";
  os << "window_initial = " << fmt(m.solver.window_initial) << "\n";
  os << "blowup_factor = " << fmt(m.solver.blowup_factor) << "\n";
  os << "allow_signed_rates = " << (m.solver.allow_signed_rates ? 1 : 0) << "\n";
  os << "output_stride = " << m.solver.output_stride << "\n";
  os << "threads = " << m.solver.threads << "\n\n";

  os << "[optimize]\n";
  os << "direction = " << m.optimize.direction << "\n";
  os << "cap = " << fmt(m.optimize.cap) << "\n";
  os << "cost_variant = " << m.optimize.cost_variant << "\n";
  os << "bins = " << m.optimize.bins << "\n";
  os << "budget = " << m.optimize.budget << "\n";
  os << "seed = " << m.optimize.seed << "\n";
  return os.str();
}

namespace {

std::function<double(double, double)> rate_fn(const RateModel& m) {
  if (m.form == "constant") {
    double v = m.value;
    return [v](double, double) { return v; };
  }
  if (m.form == "table") {
    TableData t = m.age_table;
    return [t](double, double a) { return eval_linear(t, a); };
  }
  TableData tf = m.time_factor, af = m.age_factor;
  return [tf, af](double t, double a) { return eval_linear(tf, t) * eval_linear(af, a); };
}

TimeSeries boundary_series(const CurveModel& c) {
  TableData t = curve_as_table(c);
  return TimeSeries(t.keys, t.values, TimeSeries::Mode::PiecewiseLinear);
}

}  // namespace

Scenario build_scenario(const ScenarioFileModel& m) {
  std::vector<double> interfaces;
  if (m.policy.variant == "age") interfaces = m.policy.ages;
  auto grid = std::make_shared<Grid>(m.grid.age_max, m.grid.cells_per_unit_age,
                                     m.grid.horizon, interfaces);

  Scenario sc{.grid = grid,
              .kernel = {},
              .rates = {},
              .policy = AgeTriggeredPolicy{},
              .S_o = GridFunction::zero(grid),
              .I_o = GridFunction::zero(grid),
              .R_o = GridFunction::zero(grid),
              .S_b = {},
              .I_b = {},
              .R_b = {},
              .config = {}};

  // kernel
  if (m.kernel.form == "constant") {
    const double v = m.kernel.value;
    sc.kernel.lambda = [v](double, double) { return v; };
    sc.kernel.separable = true;
    sc.kernel.phi = [v](double) { return v; };
    sc.kernel.psi = [](double) { return 1.0; };
  } else if (m.kernel.form == "separable") {
    const double scale = m.kernel.scale;
    TableData phi = m.kernel.phi, psi = m.kernel.psi;
    sc.kernel.separable = true;
    sc.kernel.phi = [scale, phi](double a) { return scale * eval_linear(phi, a); };
    sc.kernel.psi = [psi](double ap) { return eval_linear(psi, ap); };
    auto lf = sc.kernel.phi;
    auto lg = sc.kernel.psi;
    sc.kernel.lambda = [lf, lg](double a, double ap) { return lf(a) * lg(ap); };
  } else {
    const auto& k = m.kernel;
    if (k.ages.size() < 2 || k.ages_prime.size() < 2 || k.rows.size() != k.ages.size())
      throw ConfigError("tabulated kernel needs ages, ages_prime and one row per age");
    for (const auto& r : k.rows)
      if (r.size() != k.ages_prime.size())
        throw ConfigError("tabulated kernel rows must match ages_prime");
    auto ages = k.ages;
    auto agesp = k.ages_prime;
    auto rows = k.rows;
    sc.kernel.lambda = [ages, agesp, rows](double a, double ap) {
      auto locate = [](const std::vector<double>& v, double x) {
        if (x <= v.front()) return std::pair<std::size_t, double>{0, 0.0};
        if (x >= v.back()) return std::pair<std::size_t, double>{v.size() - 2, 1.0};
        auto it = std::upper_bound(v.begin(), v.end(), x);
        std::size_t i = static_cast<std::size_t>(it - v.begin()) - 1;
        return std::pair<std::size_t, double>{i, (x - v[i]) / (v[i + 1] - v[i])};
      };
      auto [i, wa] = locate(ages, a);
      auto [j, wb] = locate(agesp, ap);
      return (1 - wa) * ((1 - wb) * rows[i][j] + wb * rows[i][j + 1]) +
             wa * ((1 - wb) * rows[i + 1][j] + wb * rows[i + 1][j + 1]);
    };
  }
  sc.kernel.Lambda_inf = m.kernel.lambda_inf;
  sc.kernel.Lambda_L = m.kernel.lambda_lip;

  sc.rates.d_S = rate_fn(m.rates.d_S);
  sc.rates.d_I = rate_fn(m.rates.d_I);
  sc.rates.d_R = rate_fn(m.rates.d_R);
  sc.rates.r_I = rate_fn(m.rates.r_I);
  sc.rates.R_L = m.rates.rate_lip;
  sc.rates.R_1 = m.rates.rate_l1;
  sc.rates.R_inf = m.rates.rate_inf;

  auto sample_curve = [&](const CurveModel& c) {
    if (c.form == "zero") return GridFunction::zero(grid);
    if (c.form == "constant") {
      const double v = c.value;
      return GridFunction::sample(grid, [v](double) { return v; });
    }
    TableData t = c.table;
    return GridFunction::sample(grid, [t](double a) { return eval_linear(t, a); });
  };
  sc.S_o = sample_curve(m.S_o);
  sc.I_o = sample_curve(m.I_o);
  sc.R_o = sample_curve(m.R_o);
  sc.S_b = boundary_series(m.S_b);
  sc.I_b = boundary_series(m.I_b);
  sc.R_b = boundary_series(m.R_b);

  if (m.policy.variant == "age") {
    AgeTriggeredPolicy p;
    p.ages = m.policy.ages;
    if (m.policy.controls.size() != p.ages.size())
      throw ConfigError("age policy: need one eta_j table per vaccination age");
    for (const auto& t : m.policy.controls)
      p.eta.emplace_back(t.keys, t.values, TimeSeries::Mode::PiecewiseConstant);
    sc.policy = std::move(p);
  } else if (m.policy.variant == "time") {
    TimeTriggeredPolicy p;
    p.times = m.policy.times;
    if (m.policy.controls.size() != p.times.size())
      throw ConfigError("time policy: need one nu_k table per vaccination time");
    for (const auto& t : m.policy.controls) {
      TimeSeries s(t.keys, t.values, TimeSeries::Mode::PiecewiseConstant);
      p.nu.push_back([s](double a) { return s(a); });
    }
    sc.policy = std::move(p);
  } else {
    sc.policy = AgeTriggeredPolicy{};  // no vaccination ages
  }

  sc.config.solver_tol = m.solver.solver_tol;
  sc.config.fp_tol = m.solver.fp_tol;
  sc.config.pos_tol = m.solver.pos_tol;
  sc.config.max_iter = m.solver.max_iter;
  sc.config.window_initial = m.solver.window_initial;
  sc.config.blowup_factor = m.solver.blowup_factor;
  sc.config.allow_signed_rates = m.solver.allow_signed_rates;
  sc.config.output_stride = m.solver.output_stride;
  sc.config.threads = m.solver.threads;
  return sc;
}

Scenario parse_scenario(const std::string& path) {
  return build_scenario(parse_scenario_file(path));
}

OptimizationProblem build_problem(const ScenarioFileModel& m) {
  OptimizationProblem p;
  p.base = build_scenario(m);
  p.direction = m.optimize.direction == "min_cost" ? Direction::MinCostSubjectToEffect
                                                   : Direction::MinEffectSubjectToCost;
  p.cap = m.optimize.cap;
  if (m.optimize.cost_variant == "age_susceptible") p.cost_variant = CostVariant::AgeSusceptible;
  else if (m.optimize.cost_variant == "age_whole") p.cost_variant = CostVariant::AgeWhole;
  else if (m.optimize.cost_variant == "time_susceptible") p.cost_variant = CostVariant::TimeSusceptible;
  else p.cost_variant = CostVariant::TimeWhole;
  p.bins = m.optimize.bins;
  return p;
}

namespace {

struct CsvWriter {
  explicit CsvWriter(const std::string& path) : f(path, std::ios::binary) {
    if (!f) throw ConfigError("cannot open output file: " + path);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) f << ",";
      f << cells[i];
    }
    f << "\n";
  }
  std::ofstream f;
};

void state_rows(CsvWriter& w, const SIRState& s, const std::string& tstr) {
  const Grid& g = s.S.grid();
  for (int j = 0; j < g.segments(); ++j) {
    auto vs = s.S.segment(j);
    auto vi = s.I.segment(j);
    auto vr = s.R.segment(j);
    for (int i = 0; i < g.segment_nodes(j); ++i) {
      std::string side;
      if (j > 0 && i == 0) side = "+";
      if (j + 1 < g.segments() && i == g.segment_nodes(j) - 1) side = "-";
      w.row({tstr, fmt(g.node_age(j, i)), side, fmt(vs[i]), fmt(vi[i]), fmt(vr[i])});
    }
  }
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& tr, int stride) {
  CsvWriter w(path);
  w.row({"t", "a", "side", "S", "I", "R"});
  stride = std::max(1, stride);
  const int last = tr.steps();
  for (int k = 0; k <= last; k += stride) state_rows(w, tr.states[k], fmt(tr.states[k].time));
  if (last % stride != 0) state_rows(w, tr.states[last], fmt(tr.states[last].time));
}

void write_summary_csv(const std::string& path, const Trajectory& tr) {
  CsvWriter w(path);
  w.row({"t", "L1_S", "L1_I", "L1_R", "TV_S", "TV_I", "TV_R", "mass_total"});
  for (const auto& s : tr.states)
    w.row({fmt(s.time), fmt(s.S.l1()), fmt(s.I.l1()), fmt(s.R.l1()), fmt(s.S.tv()),
           fmt(s.I.tv()), fmt(s.R.tv()), fmt(s.total_mass())});
}

void write_profile_csv(const std::string& path, const SIRState& s) {
  CsvWriter w(path);
  w.row({"t", "a", "side", "S", "I", "R"});
  state_rows(w, s, fmt(s.time));
}

void write_history_csv(const std::string& path, const std::vector<EvalRecord>& history) {
  CsvWriter w(path);
  std::vector<std::string> head{"index", "cost", "effect", "objective", "feasible",
                                "failed"};
  const int d = history.empty() ? 0 : history.front().control.size();
  for (int i = 0; i < d; ++i) head.push_back("x" + std::to_string(i));
  w.row(head);
  for (const auto& r : history) {
    std::vector<std::string> cells{std::to_string(r.index), fmt(r.cost), fmt(r.effect),
                                   fmt(r.objective), r.feasible ? "1" : "0",
                                   r.failed ? "1" : "0"};
    for (double x : r.control.v) cells.push_back(fmt(x));
    w.row(cells);
  }
}

void write_control_csv(const std::string& path, const ControlVector& best, int bins,
                       double best_cost, double best_effect, bool feasible) {
  CsvWriter w(path);
  w.row({"control_index", "bin", "value"});
  for (int i = 0; i < best.size(); ++i)
    w.row({std::to_string(i / bins + 1), std::to_string(i % bins), fmt(best.v[i])});
  w.row({"# cost", fmt(best_cost), ""});
  w.row({"# effect", fmt(best_effect), ""});
  w.row({"# feasible", feasible ? "1" : "0", ""});
}

}  // namespace rsir
