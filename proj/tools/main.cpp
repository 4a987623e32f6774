// ubw1 command line: unbalanced W1 transport, profile reconstruction, flows,
// and the two-Dirac lab. Exit codes: 0 ok, 2 validation error, 1 numerical
// failure. All numeric output uses 17 significant digits; infinities print
// as inf/-inf.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ubw1/ubw1.h"

namespace {

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void fail_status(ubw1_status st) {
  bool validation = st == UBW1_ERR_PARSE || st == UBW1_ERR_INVALID_ARGUMENT ||
                    st == UBW1_ERR_UNKNOWN_NAME || st == UBW1_ERR_NEGATIVE_MASS ||
                    st == UBW1_ERR_MASS_MISMATCH || st == UBW1_ERR_SPACE_MISMATCH ||
                    st == UBW1_ERR_EMPTY_SPACE || st == UBW1_ERR_IO;
  if (validation)
    throw CliError{2, std::string(ubw1_status_name(st)) + ": " + ubw1_last_error()};
  throw CliError{1, std::string("{\"error\":\"") + ubw1_status_name(st) +
                        "\",\"message\":\"" + ubw1_last_error() + "\"}"};
}

void check(ubw1_status st) {
  if (st != UBW1_OK) fail_status(st);
}

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// scalar answers always show a decimal point
std::string fmt_scalar(double v) {
  std::string s = fmt17(v);
  if (s.find_first_of(".einf") == std::string::npos) s += ".0";
  return s;
}

std::vector<double> parse_range(const std::string& text) {
  double a, b;
  int n;
  char c1, c2;
  std::istringstream in(text);
  if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1)
    throw CliError{2, "ParseError: grid must be a:b:n, got '" + text + "'"};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw CliError{2, "IoError: cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw CliError{2, "IoError: cannot write '" + path + "'"};
  out << content;
}

// RFC-4180 rows with a leading provenance comment block
void write_csv(const std::string& path, const std::vector<std::string>& provenance,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  for (const auto& line : provenance) text += "# " + line + "\r\n";
  for (size_t c = 0; c < columns.size(); ++c) text += (c ? "," : "") + columns[c];
  text += "\r\n";
  for (const auto& row : rows) {
    for (size_t c = 0; c < row.size(); ++c) text += (c ? "," : "") + row[c];
    text += "\r\n";
  }
  if (path == "-")
    std::fputs(text.c_str(), stdout);
  else
    write_file(path, text);
}

using DiscPtr = std::unique_ptr<ubw1_disc, decltype(&ubw1_disc_free)>;
using DynPtr = std::unique_ptr<ubw1_dyn, decltype(&ubw1_dyn_free)>;
using MeasPtr = std::unique_ptr<ubw1_measure, decltype(&ubw1_measure_free)>;
using SolPtr = std::unique_ptr<ubw1_solution, decltype(&ubw1_solution_free)>;
using RepPtr = std::unique_ptr<ubw1_report, decltype(&ubw1_report_free)>;

DiscPtr load_disc(const std::string& model, const std::string& model_file) {
  ubw1_disc* d = nullptr;
  if (!model_file.empty())
    check(ubw1_disc_from_json(read_file(model_file).c_str(), &d));
  else if (!model.empty())
    check(ubw1_disc_create(model.c_str(), &d));
  else
    throw CliError{2, "InvalidArgument: pass --model or --model-file"};
  return DiscPtr(d, &ubw1_disc_free);
}

MeasPtr load_measure(const std::string& path) {
  ubw1_measure* m = nullptr;
  check(ubw1_measure_from_json(read_file(path).c_str(), &m));
  return MeasPtr(m, &ubw1_measure_free);
}

const char* regime_str(int r) {
  switch (r) {
    case 0: return "interior";
    case 1: return "boundary_a0";
    case 2: return "boundary_b0";
    case 3: return "boundary_other";
  }
  return "?";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unbalanced Wasserstein-1 transport toolbox"};
  app.require_subcommand(1);

  auto* disc_cmd = app.add_subcommand("disc", "static mass-change models");
  disc_cmd->require_subcommand(1);
  auto* disc_eval = disc_cmd->add_subcommand("eval", "evaluate c_S(m0, m1)");
  std::string de_model, de_model_file;
  double de_m0 = 1.0, de_m1 = 1.0;
  disc_eval->add_option("--model", de_model, "catalog model name");
  disc_eval->add_option("--model-file", de_model_file, "custom model JSON");
  disc_eval->add_option("--m0", de_m0, "first mass")->required();
  disc_eval->add_option("--m1", de_m1, "second mass")->required();

  auto* flow_cmd = app.add_subcommand("flow", "flow map of a dynamic profile");
  std::string fl_hd;
  double fl_t = 1.0, fl_z = 0.0;
  flow_cmd->add_option("--hd", fl_hd, "dynamic model (exact|tv|pwl(..)|hellinger|js)");
  flow_cmd->add_option("--t", fl_t, "time");
  flow_cmd->add_option("--z", fl_z, "initial level");
  auto* flow_table = flow_cmd->add_subcommand("table", "tabulate F_t over a grid");
  std::string ft_hd, ft_grid = "-1:3:65", ft_out = "-";
  std::vector<double> ft_times;
  flow_table->add_option("--hd", ft_hd, "dynamic model")->required();
  flow_table->add_option("--grid", ft_grid, "z grid a:b:n");
  flow_table->add_option("--t", ft_times, "times (repeatable)");
  flow_table->add_option("--out", ft_out, "output CSV path");

  auto* rec_cmd = app.add_subcommand("reconstruct", "recover h_D = q[h_S]");
  std::string rc_model, rc_model_file, rc_grid = "-4:4:257", rc_out = "-";
  double rc_tol = 1e-7;
  int rc_max_iter = 100000;
  rec_cmd->add_option("--model", rc_model, "catalog model name");
  rec_cmd->add_option("--model-file", rc_model_file, "custom model JSON");
  rec_cmd->add_option("--grid", rc_grid, "z grid a:b:n");
  rec_cmd->add_option("--tol", rc_tol, "iteration tolerance");
  rec_cmd->add_option("--max-iter", rc_max_iter, "iteration cap");
  rec_cmd->add_option("--out", rc_out, "output CSV path");

  auto* dec_cmd = app.add_subcommand("decide", "does a dynamic model exist?");
  std::string dc_model, dc_model_file, dc_grid = "-4:4:321";
  dec_cmd->add_option("--model", dc_model, "catalog model name");
  dec_cmd->add_option("--model-file", dc_model_file, "custom model JSON");
  dec_cmd->add_option("--grid", dc_grid, "reconstruction grid a:b:n");

  auto* solve_cmd = app.add_subcommand("solve", "static unbalanced transport");
  std::string sv_rho0, sv_rho1, sv_model, sv_model_file, sv_out = "-";
  int sv_cuts = 65;
  solve_cmd->add_option("--rho0", sv_rho0, "first measure JSON")->required();
  solve_cmd->add_option("--rho1", sv_rho1, "second measure JSON")->required();
  solve_cmd->add_option("--model", sv_model, "catalog model name");
  solve_cmd->add_option("--model-file", sv_model_file, "custom model JSON");
  solve_cmd->add_option("--cuts", sv_cuts, "supporting-point budget");
  solve_cmd->add_option("--out", sv_out, "solution JSON path");

  auto* dirac_cmd = app.add_subcommand("dirac", "two-Dirac transport");
  std::string dr_model, dr_model_file;
  double dr_L = 1.0, dr_m00 = 1.0, dr_m0L = 0.0, dr_m10 = 0.0, dr_m1L = 1.0;
  dirac_cmd->add_option("--model", dr_model, "catalog model name");
  dirac_cmd->add_option("--model-file", dr_model_file, "custom model JSON");
  dirac_cmd->add_option("--L", dr_L, "site distance");
  dirac_cmd->add_option("--m00", dr_m00, "rho0 mass at site 0");
  dirac_cmd->add_option("--m0L", dr_m0L, "rho0 mass at site L");
  dirac_cmd->add_option("--m10", dr_m10, "rho1 mass at site 0");
  dirac_cmd->add_option("--m1L", dr_m1L, "rho1 mass at site L");
  auto* phase_cmd = dirac_cmd->add_subcommand("phase", "phase diagram sweep");
  std::string ph_model, ph_model_file, ph_Lgrid = "0.1:5:50",
              ph_rgrid = "0.05:20:80", ph_out = "-";
  phase_cmd->add_option("--model", ph_model, "catalog model name");
  phase_cmd->add_option("--model-file", ph_model_file, "custom model JSON");
  phase_cmd->add_option("--Lgrid", ph_Lgrid, "L grid a:b:n");
  phase_cmd->add_option("--ratiogrid", ph_rgrid, "mass-ratio grid a:b:n");
  phase_cmd->add_option("--out", ph_out, "output CSV path");

  auto* dyn_cmd = app.add_subcommand("dynamic", "assemble a dynamic optimizer");
  std::string dy_sol, dy_hd, dy_out = "-";
  int dy_steps = 128;
  dyn_cmd->add_option("--from-solution", dy_sol, "solution JSON from solve")->required();
  dyn_cmd->add_option("--hd", dy_hd, "dynamic model")->required();
  dyn_cmd->add_option("--steps", dy_steps, "time steps");
  dyn_cmd->add_option("--out", dy_out, "trajectory CSV path");

  auto* sc_cmd = app.add_subcommand("sc", "semi-coupling cost");
  std::string sc_model, sc_model_file;
  double sc_dx = 1.0, sc_m0 = 1.0, sc_m1 = 1.0;
  sc_cmd->add_option("--model", sc_model, "catalog model name");
  sc_cmd->add_option("--model-file", sc_model_file, "custom model JSON");
  sc_cmd->add_option("--dx", sc_dx, "separation");
  sc_cmd->add_option("--m0", sc_m0, "departing mass");
  sc_cmd->add_option("--m1", sc_m1, "arriving mass");

  auto* selftest_cmd = app.add_subcommand("selftest", "run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (disc_eval->parsed()) {
      auto d = load_disc(de_model, de_model_file);
      double v;
      check(ubw1_disc_cs(d.get(), de_m0, de_m1, &v));
      std::printf("%s\n", fmt_scalar(v).c_str());
      return 0;
    }

    if (flow_table->parsed()) {
      ubw1_dyn* dyn = nullptr;
      check(ubw1_dyn_create(ft_hd.c_str(), &dyn));
      DynPtr d(dyn, &ubw1_dyn_free);
      if (ft_times.empty()) ft_times = {1.0};
      auto grid = parse_range(ft_grid);
      std::vector<std::string> cols = {"z"};
      for (double t : ft_times) cols.push_back("F_" + fmt17(t));
      std::vector<std::vector<std::string>> rows;
      for (double z : grid) {
        std::vector<std::string> row = {fmt17(z)};
        for (double t : ft_times) {
          double v;
          int fp;
          check(ubw1_dyn_flow(d.get(), t, z, &v, &fp));
          row.push_back(fmt17(v));
        }
        rows.push_back(std::move(row));
      }
      write_csv(ft_out, {"ubw1 flow table", "hd = " + ft_hd, "grid = " + ft_grid},
                cols, rows);
      return 0;
    }

    if (flow_cmd->parsed()) {
      if (fl_hd.empty()) throw CliError{2, "InvalidArgument: pass --hd"};
      ubw1_dyn* dyn = nullptr;
      check(ubw1_dyn_create(fl_hd.c_str(), &dyn));
      DynPtr d(dyn, &ubw1_dyn_free);
      double v;
      int fp;
      check(ubw1_dyn_flow(d.get(), fl_t, fl_z, &v, &fp));
      std::printf("%s\n", fmt_scalar(v).c_str());
      return 0;
    }

    if (rec_cmd->parsed()) {
      auto d = load_disc(rc_model, rc_model_file);
      auto grid = parse_range(rc_grid);
      ubw1_report* rp = nullptr;
      check(ubw1_reconstruct(d.get(), grid.data(), (int)grid.size(), rc_tol,
                             rc_max_iter, &rp));
      RepPtr rep(rp, &ubw1_report_free);
      int n = ubw1_report_size(rep.get());
      std::vector<double> z(n), q(n);
      check(ubw1_report_rows(rep.get(), z.data(), q.data(), nullptr, nullptr));
      int exists = 0;
      ubw1_dyn* wit = nullptr;
      ubw1_status st = ubw1_report_decide(rep.get(), 257, &exists, &wit);
      DynPtr witness(wit, &ubw1_dyn_free);
      std::vector<std::vector<std::string>> rows;
      for (int i = 0; i < n; ++i) {
        double cd = std::nan("");
        if (st == UBW1_OK && exists && witness)
          ubw1_dyn_cd(witness.get(), 1.0, z[i], &cd);
        rows.push_back({fmt17(z[i]), fmt17(q[i]), fmt17(cd)});
      }
      write_csv(rc_out,
                {"ubw1 reconstruct",
                 "model = " + (rc_model_file.empty() ? rc_model : rc_model_file),
                 "grid = " + rc_grid, "tol = " + fmt17(rc_tol),
                 "max_iter = " + std::to_string(rc_max_iter)},
                {"z", "q", "cd"}, rows);
      return 0;
    }

    if (dec_cmd->parsed()) {
      auto d = load_disc(dc_model, dc_model_file);
      auto grid = parse_range(dc_grid);
      ubw1_report* rp = nullptr;
      check(ubw1_reconstruct(d.get(), grid.data(), (int)grid.size(), 1e-7, 100000,
                             &rp));
      RepPtr rep(rp, &ubw1_report_free);
      int exists = 0;
      ubw1_dyn* wit = nullptr;
      check(ubw1_report_decide(rep.get(), 257, &exists, &wit));
      DynPtr witness(wit, &ubw1_dyn_free);
      int nec = 0, suf = 0;
      char* details = nullptr;
      check(ubw1_disc_check_conditions(d.get(), &nec, &suf, &details));
      ubw1_string_free(details);
      if (exists)
        std::printf("YES\n");
      else
        std::printf("NO (q[h_S] not concave)\n");
      std::printf("necessary_ok=%s sufficient_ok=%s\n", nec ? "yes" : "no",
                  suf ? "yes" : "no");
      return 0;
    }

    if (solve_cmd->parsed()) {
      auto r0 = load_measure(sv_rho0);
      auto r1 = load_measure(sv_rho1);
      auto d = load_disc(sv_model, sv_model_file);
      ubw1_solution* sol = nullptr;
      check(ubw1_solve_static(r0.get(), r1.get(), d.get(), sv_cuts, &sol));
      SolPtr sp(sol, &ubw1_solution_free);
      char* js = nullptr;
      check(ubw1_solution_to_json(sp.get(), &js));
      std::string text = js;
      ubw1_string_free(js);
      if (sv_out == "-")
        std::printf("%s\n", text.c_str());
      else
        write_file(sv_out, text + "\n");
      double p, du, g;
      check(ubw1_solution_values(sp.get(), &p, &du, &g));
      std::fprintf(stderr, "value bracket [%s, %s], gap %s\n", fmt17(du).c_str(),
                   fmt17(p).c_str(), fmt17(g).c_str());
      return 0;
    }

    if (phase_cmd->parsed()) {
      auto d = load_disc(ph_model, ph_model_file);
      auto Ls = parse_range(ph_Lgrid);
      auto rs = parse_range(ph_rgrid);
      std::vector<std::vector<std::string>> rows;
      for (double L : Ls)
        for (double r : rs) {
          double a, b, val;
          int regime;
          check(ubw1_dirac_solve(d.get(), L, 1.0, 0.0, 0.0, r, &a, &b, nullptr,
                                 nullptr, nullptr, &regime, &val));
          rows.push_back({fmt17(L), fmt17(r), regime_str(regime)});
        }
      write_csv(ph_out,
                {"ubw1 dirac phase",
                 "model = " + (ph_model_file.empty() ? ph_model : ph_model_file),
                 "Lgrid = " + ph_Lgrid, "ratiogrid = " + ph_rgrid},
                {"L", "ratio", "regime"}, rows);
      return 0;
    }

    if (dirac_cmd->parsed()) {
      auto d = load_disc(dr_model, dr_model_file);
      double a, b, al, be, sI, val;
      int regime;
      check(ubw1_dirac_solve(d.get(), dr_L, dr_m00, dr_m0L, dr_m10, dr_m1L, &a,
                             &b, &al, &be, &sI, &regime, &val));
      std::printf("a=%s b=%s value=%s regime=%s\n", fmt_scalar(a).c_str(),
                  fmt_scalar(b).c_str(), fmt_scalar(val).c_str(),
                  regime_str(regime));
      if (!std::isnan(al))
        std::printf("alpha=%s beta=%s s=%s\n", fmt_scalar(al).c_str(),
                    fmt_scalar(be).c_str(), fmt_scalar(sI).c_str());
      return 0;
    }

    if (dyn_cmd->parsed()) {
      std::string sol_text = read_file(dy_sol);
      ubw1_solution* sol = nullptr;
      check(ubw1_solution_from_json(sol_text.c_str(), &sol));
      SolPtr sp(sol, &ubw1_solution_free);
      ubw1_dyn* dyn = nullptr;
      check(ubw1_dyn_create(dy_hd.c_str(), &dyn));
      DynPtr dp(dyn, &ubw1_dyn_free);
      // the static model tag travels in the solution JSON
      std::string model;
      auto pos = sol_text.find("\"model\": \"");
      if (pos != std::string::npos) {
        pos += 10;
        model = sol_text.substr(pos, sol_text.find('"', pos) - pos);
      }
      auto d = load_disc(model, "");
      ubw1_dynopt* opt = nullptr;
      check(ubw1_assemble_dynamic(sp.get(), d.get(), dp.get(), dy_steps, &opt));
      std::unique_ptr<ubw1_dynopt, decltype(&ubw1_dynopt_free)> op(opt,
                                                                   &ubw1_dynopt_free);
      int np = ubw1_dynopt_points(op.get());
      int steps = ubw1_dynopt_steps(op.get());
      std::vector<std::vector<std::string>> rows;
      std::vector<double> masses(steps + 1), rates(steps);
      for (int x = 0; x < np; ++x) {
        double cost;
        check(ubw1_dynopt_trajectory(op.get(), x, masses.data(), rates.data(), &cost));
        for (int k = 0; k <= steps; ++k) {
          double t = static_cast<double>(k) / steps;
          double zeta = rates[std::min(k, steps - 1)];
          rows.push_back({fmt17(t), std::to_string(x), fmt17(masses[k]), fmt17(zeta)});
        }
      }
      double total, res;
      check(ubw1_dynopt_total_cost(op.get(), &total));
      check(ubw1_dynopt_residual(op.get(), 32, &res));
      write_csv(dy_out,
                {"ubw1 dynamic", "hd = " + dy_hd, "steps = " + std::to_string(dy_steps),
                 "total_cost = " + fmt17(total),
                 "continuity_residual = " + fmt17(res)},
                {"t", "point", "m", "zeta"}, rows);
      return 0;
    }

    if (sc_cmd->parsed()) {
      auto d = load_disc(sc_model, sc_model_file);
      double p, du;
      check(ubw1_semicoupling(d.get(), sc_dx, sc_m0, sc_m1, &p, &du));
      std::printf("primal=%s dual=%s\n", fmt_scalar(p).c_str(), fmt_scalar(du).c_str());
      return 0;
    }

    if (selftest_cmd->parsed()) {
      int failures = ubw1_selftest();
      return failures == 0 ? 0 : 1;
    }
  } catch (const CliError& e) {
    std::fprintf(stderr, "%s\n", e.message.c_str());
    return e.exit_code;
  }
  return 0;
}
