#include "backstep/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include <json.hpp>

#include "backstep/errors.hpp"

namespace backstep {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write \"" + path + "\"");
  return out;
}

void append_num(std::string& row, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  row += buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out, int stride) {
  if (stride < 1) throw ConfigError("stride must be >= 1");
  const int n = traj.n;

  std::string row = "t";
  for (int i = 1; i <= n; ++i) row += ",x" + std::to_string(i);
  for (int i = 1; i <= n + 1; ++i) row += ",z" + std::to_string(i);
  row += ",u,u_delayed,chi,v";
  for (int i = 1; i <= n; ++i) row += ",alpha" + std::to_string(i);
  for (int i = 1; i <= n; ++i) row += ",delta_hat" + std::to_string(i);
  for (int i = 1; i <= n; ++i) row += ",theta_hat" + std::to_string(i);
  row += ",Vs\n";
  out << row;

  for (std::size_t k = 0; k < traj.samples(); k += stride) {
    row.clear();
    append_num(row, traj.t[k]);
    for (int i = 0; i < n; ++i) {
      row += ',';
      append_num(row, traj.x[i][k]);
    }
    for (int i = 0; i <= n; ++i) {
      row += ',';
      append_num(row, traj.z[i][k]);
    }
    row += ',';
    append_num(row, traj.u[k]);
    row += ',';
    append_num(row, traj.u_delayed[k]);
    row += ',';
    append_num(row, traj.chi[k]);
    row += ',';
    append_num(row, traj.v[k]);
    for (int i = 0; i < n; ++i) {
      row += ',';
      append_num(row, traj.alpha[i][k]);
    }
    for (int i = 0; i < n; ++i) {
      row += ',';
      append_num(row, traj.delta_hat[i][k]);
    }
    for (int i = 0; i < n; ++i) {
      row += ',';
      append_num(row, traj.theta_hat[i][k]);
    }
    row += ',';
    append_num(row, traj.Vs[k]);
    row += '\n';
    out << row;
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path, int stride) {
  auto out = open_out(path);
  write_trajectory_csv(traj, out, stride);
}

void print_constraint_report(const ConstraintReport& rep, std::ostream& out) {
  out << "constraint check: " << (rep.pass ? "PASS" : "FAIL") << "\n";
  for (const auto& e : rep.entries) {
    char line[160];
    std::snprintf(line, sizeof line, "  [%s] %-28s  attained %.6g  limit %.6g\n",
                  e.pass ? "ok" : "VIOLATED", e.name.c_str(), e.value, e.bound);
    out << line;
  }
}

void print_prereq_report(const PrereqReport& rep, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof line, "prerequisites (A0 = %.6f): %s\n", rep.A0,
                rep.pass ? "PASS" : "FAIL");
  out << line;
  for (const auto& e : rep.entries) {
    std::snprintf(line, sizeof line, "  [%s] %-24s  value %.6g  limit %.6g\n",
                  e.pass ? "ok" : "VIOLATED", e.name.c_str(), e.value, e.bound);
    out << line;
  }
}

void print_feasibility_result(const FeasibilityResult& res, std::ostream& out) {
  out << "feasible candidates: ";
  std::size_t feasible = 0;
  for (const auto& c : res.evaluated) feasible += c.feasible ? 1 : 0;
  out << feasible << " of " << res.evaluated.size() << "\n";
  for (const auto& c : res.evaluated) {
    out << (c.feasible ? "  feasible  " : "  infeasible") << "  sigma = (";
    for (std::size_t i = 0; i < c.sigma.size(); ++i) {
      char num[32];
      std::snprintf(num, sizeof num, "%s%.6g", i ? ", " : "", c.sigma[i]);
      out << num;
    }
    char tail[160];
    if (c.feasible)
      std::snprintf(tail, sizeof tail, ")  N = %.6g", c.N);
    else
      std::snprintf(tail, sizeof tail, ")  %s", c.violated.c_str());
    out << tail << "\n";
  }
  out << "best: N = ";
  char num[32];
  std::snprintf(num, sizeof num, "%.6g", res.best.N);
  out << num << " at sigma = (";
  for (std::size_t i = 0; i < res.best.sigma.size(); ++i) {
    std::snprintf(num, sizeof num, "%s%.6g", i ? ", " : "", res.best.sigma[i]);
    out << num;
  }
  out << ")\n";
}

std::string constraint_report_json(const ConstraintReport& rep, const PrereqReport& prereq) {
  nlohmann::json j;
  j["pass"] = rep.pass;
  j["x_sup"] = rep.x_sup;
  j["z_sup"] = rep.z_sup;
  j["margin_min"] = rep.margin_min;
  j["rho"] = rep.rho;
  auto entries = nlohmann::json::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"name", e.name}, {"value", e.value}, {"bound", e.bound}, {"pass", e.pass}});
  j["entries"] = entries;
  j["prerequisites"]["A0"] = prereq.A0;
  j["prerequisites"]["pass"] = prereq.pass;
  auto pre = nlohmann::json::array();
  for (const auto& e : prereq.entries)
    pre.push_back({{"name", e.name}, {"value", e.value}, {"bound", e.bound}, {"pass", e.pass}});
  j["prerequisites"]["entries"] = pre;
  return j.dump(2);
}

std::string feasibility_result_json(const FeasibilityResult& res) {
  nlohmann::json j;
  auto cand = [](const CandidateResult& c) {
    nlohmann::json e;
    e["sigma"] = c.sigma;
    e["feasible"] = c.feasible;
    e["N"] = c.N;
    if (!c.rho.empty()) e["rho"] = c.rho;
    if (!c.violated.empty()) e["violated"] = c.violated;
    return e;
  };
  j["best"] = cand(res.best);
  auto all = nlohmann::json::array();
  for (const auto& c : res.evaluated) all.push_back(cand(c));
  j["evaluated"] = all;
  return j.dump(2);
}

void write_plot_script(const Trajectory& traj, const std::string& csv_name,
                       const std::string& path) {
  const int n = traj.n;
  // 1-based CSV column indices.
  const int col_t = 1;
  const int col_x = 2;          // x1..xn
  const int col_z = n + 2;      // z1..z{n+1}
  const int col_u = 2 * n + 3;
  const int col_ud = 2 * n + 4;
  const int col_v = 2 * n + 6;
  const int col_dh = 3 * n + 7;  // delta_hat1..n
  const int col_th = 4 * n + 7;  // theta_hat1..n

  auto out = open_out(path);
  out << "# gnuplot script; expects " << csv_name << " alongside\n";
  out << "set datafile separator ','\n";
  out << "set key autotitle columnhead\n";
  out << "set grid\n";
  out << "set term pngcairo size 900,560\n\n";

  char buf[256];

  out << "set output 'tracking.png'\n";
  out << "set title 'output vs reference'\n";
  std::snprintf(buf, sizeof buf,
                "plot '%s' u %d:%d t 'y' w l lw 2, '' u %d:($%d-$%d) t 'y_d' w l lw 2, %g t "
                "'k_c1' w l lt 0, %g notitle w l lt 0\n\n",
                csv_name.c_str(), col_t, col_x, col_t, col_x, col_z, traj.k_c[0], -traj.k_c[0]);
  out << buf;

  out << "set output 'states.png'\n";
  out << "set title 'remaining states and their constraint boxes'\n";
  out << "plot ";
  for (int i = 1; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%s'%s' u %d:%d t 'x%d' w l lw 2, %g t 'k_c%d' w l lt 0, %g "
                  "notitle w l lt 0",
                  i > 1 ? ", " : "", csv_name.c_str(), col_t, col_x + i, i + 1, traj.k_c[i], i + 1,
                  -traj.k_c[i]);
    out << buf;
  }
  out << "\n\n";

  out << "set output 'coordinates.png'\n";
  out << "set title 'tracking coordinates and barriers'\n";
  out << "plot ";
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf,
                  "%s'%s' u %d:%d t 'z%d' w l lw 2, %g t 'k_b%d' w l lt 0, %g notitle w l lt 0",
                  i > 0 ? ", " : "", csv_name.c_str(), col_t, col_z + i, i + 1, traj.k_b[i], i + 1,
                  -traj.k_b[i]);
    out << buf;
  }
  out << "\n\n";

  out << "set output 'command.png'\n";
  out << "set title 'input-filter command'\n";
  std::snprintf(buf, sizeof buf, "plot '%s' u %d:%d t 'v' w l lw 2\n\n", csv_name.c_str(), col_t,
                col_v);
  out << buf;

  out << "set output 'input.png'\n";
  out << "set title 'input and delayed input'\n";
  std::snprintf(buf, sizeof buf,
                "plot '%s' u %d:%d t 'u' w l lw 2, '' u %d:%d t 'u delayed' w l lw 2\n\n",
                csv_name.c_str(), col_t, col_u, col_t, col_ud);
  out << buf;

  out << "set output 'adaptation.png'\n";
  out << "set title 'adaptive estimates'\n";
  out << "plot ";
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%s'%s' u %d:%d t 'delta\\_hat%d' w l lw 2, '' u %d:%d t "
                  "'theta\\_hat%d' w l lw 2",
                  i > 0 ? ", " : "", csv_name.c_str(), col_t, col_dh + i, i + 1, col_t, col_th + i,
                  i + 1);
    out << buf;
  }
  out << "\n";
}

}  // namespace backstep
