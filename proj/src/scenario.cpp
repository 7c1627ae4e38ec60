#include "backstep/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "backstep/errors.hpp"

namespace backstep {

namespace {

std::string trim(std::string_view s) {
  const char* ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;  // from_chars rejects a leading '+'
  auto [p, ec] = std::from_chars(first, last, v);
  if (first == last || ec != std::errc() || p != last)
    throw ConfigError(where + ": \"" + text + "\" is not a number");
  return v;
}

int parse_int(const std::string& text, const std::string& where) {
  int v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last)
    throw ConfigError(where + ": \"" + text + "\" is not an integer");
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = trim(std::string_view(text).substr(start, comma - start));
    if (item.empty()) throw ConfigError(where + ": empty list entry");
    out.push_back(parse_double(item, where));
    start = comma + 1;
  }
  return out;
}

// key -> raw value, with duplicate/unknown detection handled by the caller
// via the schema set.
std::map<std::string, std::string> read_pairs(const std::string& text,
                                              const std::string& source_name) {
  std::map<std::string, std::string> pairs;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string str = trim(line);
    if (str.empty()) continue;
    const auto eq = str.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(str).substr(0, eq));
    const std::string value = trim(std::string_view(str).substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": expected key = value");
    if (!pairs.emplace(key, value).second)
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": duplicate key \"" + key +
                        "\"");
  }
  return pairs;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Broadcast a 1-entry list to n, or require exactly n entries.
std::vector<double> sized(std::vector<double> v, int n, const std::string& key) {
  if (static_cast<int>(v.size()) == 1) return std::vector<double>(n, v[0]);
  if (static_cast<int>(v.size()) != n)
    throw ConfigError(key + " needs " + std::to_string(n) + " entries (or a single broadcast value)");
  return v;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
  auto pairs = read_pairs(text, source_name);
  auto take = [&](const std::string& key) -> std::string {
    auto it = pairs.find(key);
    if (it == pairs.end()) return "";
    std::string v = it->second;
    pairs.erase(it);
    return v;
  };
  auto require = [&](const std::string& key) {
    std::string v = take(key);
    if (v.empty()) throw ConfigError(source_name + ": missing required key \"" + key + "\"");
    return v;
  };

  Scenario sc;
  sc.plant_kind = take("plant");
  if (sc.plant_kind.empty()) sc.plant_kind = "example";
  if (sc.plant_kind != "example" && sc.plant_kind != "expressions")
    throw ConfigError(source_name + ": plant must be \"example\" or \"expressions\"");

  if (sc.plant_kind == "example") {
    sc.n = 2;
    const std::string n_text = take("n");
    if (!n_text.empty() && parse_int(n_text, "n") != 2)
      throw ConfigError(source_name + ": the builtin plant has n = 2");
    if (!take("k_c").empty())
      throw ConfigError(source_name + ": k_c is fixed by the builtin plant");
  } else {
    sc.n = parse_int(require("n"), "n");
    if (sc.n < 2 || sc.n > 14) throw ConfigError(source_name + ": n must be in 2..14");
    sc.k_c = parse_list(require("k_c"), "k_c");
    if (static_cast<int>(sc.k_c.size()) != sc.n)
      throw ConfigError(source_name + ": k_c needs n entries");
    for (int i = 1; i <= sc.n; ++i) sc.f_exprs.push_back(require("f" + std::to_string(i)));
  }
  // Disturbances are allowed for either plant kind.
  {
    bool any = false;
    for (int i = 1; i <= sc.n; ++i) {
      const std::string d = take("d" + std::to_string(i));
      sc.d_exprs.push_back(d);
      any = any || !d.empty();
    }
    if (!any) sc.d_exprs.clear();
    const std::string db = take("d_bound");
    if (!db.empty()) {
      if (sc.d_exprs.empty())
        throw ConfigError(source_name + ": d_bound given without disturbance terms");
      sc.d_bound = sized(parse_list(db, "d_bound"), sc.n, "d_bound");
    }
  }

  sc.ref_expr = require("ref");

  const int n = sc.n;
  sc.K = parse_list(require("K"), "K");
  if (static_cast<int>(sc.K.size()) != n + 1)
    throw ConfigError(source_name + ": K needs n+1 entries");
  sc.k_b = parse_list(require("k_b"), "k_b");
  if (static_cast<int>(sc.k_b.size()) != n)
    throw ConfigError(source_name + ": k_b needs n entries");
  sc.sigma = sized(parse_list(require("sigma"), "sigma"), n, "sigma");
  sc.gamma = sized(parse_list(require("gamma"), "gamma"), n, "gamma");
  sc.beta = sized(parse_list(require("beta"), "beta"), n, "beta");
  sc.upsilon = sized(parse_list(require("upsilon"), "upsilon"), n, "upsilon");
  sc.filter_tau = sized(parse_list(require("filter_tau"), "filter_tau"), n, "filter_tau");
  sc.kappa = parse_double(require("kappa"), "kappa");

  sc.tau = parse_double(require("tau"), "tau");
  const std::string lam = take("lambda");
  sc.lambda = lam.empty() ? 2.0 / sc.tau : parse_double(lam, "lambda");
  const std::string h_text = take("h");
  if (!h_text.empty()) sc.h = parse_double(h_text, "h");
  sc.T = parse_double(require("T"), "T");

  sc.x0 = parse_list(require("x0"), "x0");
  if (static_cast<int>(sc.x0.size()) != n) throw ConfigError(source_name + ": x0 needs n entries");
  sc.delta0 = sized(parse_list(require("delta0"), "delta0"), n, "delta0");
  sc.theta0 = sized(parse_list(require("theta0"), "theta0"), n, "theta0");
  const std::string u0 = take("u0");
  if (!u0.empty()) sc.u0 = parse_double(u0, "u0");
  const std::string chi0 = take("chi0");
  if (!chi0.empty()) {
    sc.chi0 = parse_double(chi0, "chi0");
    sc.chi0_given = true;
  }

  const std::string counts = take("fls_counts");
  if (!counts.empty()) sc.fls_counts = parse_int(counts, "fls_counts");
  if (sc.fls_counts < 2) throw ConfigError(source_name + ": fls_counts must be at least 2");
  const std::string wr = take("fls_w_range");
  if (!wr.empty()) sc.fls_w_range = parse_double(wr, "fls_w_range");
  if (!(sc.fls_w_range > 0.0)) throw ConfigError(source_name + ": fls_w_range must be positive");
  const std::string stride = take("stride");
  if (!stride.empty()) sc.stride = parse_int(stride, "stride");
  if (sc.stride < 1) throw ConfigError(source_name + ": stride must be >= 1");

  if (!pairs.empty())
    throw ConfigError(source_name + ": unknown key \"" + pairs.begin()->first + "\"");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_file(path), path);
}

SimConfig build_sim_config(const Scenario& sc) {
  SimConfig cfg;
  if (sc.plant_kind == "example")
    cfg.plant = example_plant();
  else
    cfg.plant = plant_from_expressions(sc.n, sc.f_exprs, {}, sc.k_c, {}, sc.T);
  if (!sc.d_exprs.empty()) attach_disturbances(cfg.plant, sc.d_exprs, sc.d_bound, sc.T);

  cfg.ref = ReferenceSignal::from_expression(sc.ref_expr, sc.T);

  cfg.gains.K = sc.K;
  cfg.gains.k_b = sc.k_b;
  cfg.gains.sigma = sc.sigma;
  cfg.gains.gamma = sc.gamma;
  cfg.gains.beta = sc.beta;
  cfg.gains.upsilon = sc.upsilon;
  cfg.gains.filter_tau = sc.filter_tau;
  cfg.gains.kappa = sc.kappa;
  cfg.gains.lambda = sc.lambda;

  // Fuzzy grids: state dimensions over the constraint box, the reference
  // derivative over its sampled range, filter derivatives over a
  // configurable symmetric range.
  auto sym = [](double half) {
    const double r = std::max(half, 1e-6);
    return std::pair<double, double>(-r, r);
  };
  for (int stage = 1; stage <= sc.n; ++stage) {
    std::vector<std::pair<double, double>> ranges;
    for (int d = 0; d < stage; ++d) ranges.push_back(sym(cfg.plant.k_c[d]));
    ranges.push_back(stage == 1 ? sym(cfg.ref.dy_sup) : sym(sc.fls_w_range));
    cfg.bases.push_back(
        make_grid_basis(ranges, std::vector<int>(ranges.size(), sc.fls_counts)));
  }

  cfg.tau = sc.tau;
  cfg.h = sc.h;
  cfg.T = sc.T;
  cfg.x0 = sc.x0;
  cfg.adapt0.delta_hat = sc.delta0;
  cfg.adapt0.theta_hat = sc.theta0;
  cfg.u0 = sc.u0;
  cfg.chi0 = sc.chi0;
  cfg.chi0_is_default = !sc.chi0_given;
  return cfg;
}

GridSpec parse_grid(const std::string& text, const std::string& source_name, int n) {
  auto pairs = read_pairs(text, source_name);
  GridSpec g;
  for (int j = 1; j <= n - 1; ++j) {
    const std::string key = "K" + std::to_string(j);
    auto it = pairs.find(key);
    if (it == pairs.end())
      throw ConfigError(source_name + ": missing candidate list \"" + key + "\"");
    g.K_grid.push_back(parse_list(it->second, key));
    pairs.erase(it);
  }
  for (int j = 2; j <= n; ++j) {
    const std::string key = "kb" + std::to_string(j);
    auto it = pairs.find(key);
    if (it == pairs.end())
      throw ConfigError(source_name + ": missing candidate list \"" + key + "\"");
    g.kb_grid.push_back(parse_list(it->second, key));
    pairs.erase(it);
  }
  if (auto it = pairs.find("init_fraction"); it != pairs.end()) {
    g.init_fraction = parse_double(it->second, "init_fraction");
    pairs.erase(it);
  }
  if (auto it = pairs.find("threads"); it != pairs.end()) {
    g.threads = parse_int(it->second, "threads");
    pairs.erase(it);
  }
  if (!pairs.empty())
    throw ConfigError(source_name + ": unknown key \"" + pairs.begin()->first + "\"");
  return g;
}

GridSpec load_grid(const std::string& path, int n) { return parse_grid(read_file(path), path, n); }

FeasibilityProblem build_feasibility_problem(const Scenario& sc, const GridSpec& grid) {
  FeasibilityProblem p;
  p.base = build_sim_config(sc);
  p.K_grid = grid.K_grid;
  p.kb_grid = grid.kb_grid;
  p.init_fraction = grid.init_fraction;
  p.threads = grid.threads;
  return p;
}

}  // namespace backstep
