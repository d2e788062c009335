#include <CLI11.hpp>

#include <expparadiag/bench/runner.hpp>

#include <fstream>
#include <iostream>

using namespace expparadiag;
using namespace expparadiag::bench;

namespace {

constexpr int exit_config = 3;

std::vector<std::pair<std::string, std::string>> flag_overrides(const std::vector<std::string>& args) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string a = args[i];
    if (a.rfind("--", 0) != 0) throw config_error("unexpected argument '" + a + "'");
    a = a.substr(2);
    std::replace(a.begin(), a.end(), '-', '_');
    if (const auto eq = a.find('='); eq != std::string::npos) {
      kv.emplace_back(a.substr(0, eq), a.substr(eq + 1));
    } else if (a == "parallel_time" || a == "write_solution") {
      kv.emplace_back(a, "true");
    } else {
      if (i + 1 >= args.size()) throw config_error("flag --" + a + " needs a value");
      kv.emplace_back(a, args[++i]);
    }
  }
  return kv;
}

void print_record(const RunRecord& rec) {
  for (const auto& c : rec.cases) {
    std::cout << rec.preset;
    if (!c.label.empty()) std::cout << " [" << c.label << "]";
    if (c.spectrum) {
      std::cout << "  rho=" << c.spectrum->spectral_radius << " bound=" << c.spectrum->radius_bound
                << " max|l-1|=" << c.spectrum->max_distance_from_one
                << (c.spectrum->bound_satisfied ? " ok" : " VIOLATED") << "\n";
      continue;
    }
    const auto& e = c.report.error_history;
    std::cout << "  alpha=" << c.alpha << " iterations=" << c.report.iterations << " "
              << to_string(c.report.termination);
    if (!e.empty()) std::cout << " error=" << e.back();
    if (!std::isnan(c.exact_error)) std::cout << " exact_error=" << c.exact_error;
    std::cout << " (" << c.report.wall_seconds << " s)\n";
  }
  for (const auto& r : rec.alpha_rows)
    std::cout << "N_x=" << r.nx << " T=" << r.T << " a=" << r.a << " c=" << r.c << "  alpha_opt=" << r.alpha << "\n";
  for (const auto& r : rec.timing)
    std::cout << "s=" << r.order << " a=" << format_complex(r.a) << " N_x=" << r.nx << " N_t=" << r.nt
              << "  gmres " << r.time_gmres << " s (" << r.gmres_iterations << " it)  bicgstab " << r.time_bicgstab
              << " s (" << r.bicgstab_iterations << " it)  diff=" << r.max_difference << "\n";
  for (const auto& f : rec.files) std::cout << "wrote " << f.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential ParaDiag experiment runner"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "List the available presets");

  auto* run = app.add_subcommand("run", "Run a preset; any config key can be overridden with --key value");
  std::string preset;
  std::string config_file;
  run->add_option("preset", preset, "Preset name (see 'list')");
  run->add_option("--config", config_file, "key = value file applied before the flags")->check(CLI::ExistingFile);
  run->allow_extras();

  auto* timing = app.add_subcommand("timing", "GMRES vs BiCGStab wall time over a grid file (order,a,nx,nt)");
  std::string grid_file;
  std::string timing_out;
  int repeats = 3;
  unsigned jobs = 1;
  double timing_dt = 0.01;
  timing->add_option("grid", grid_file, "CSV rows order,a,nx,nt")->required()->check(CLI::ExistingFile);
  timing->add_option("--out", timing_out, "Output directory");
  timing->add_option("--repeats", repeats, "Best-of-n wall time")->check(CLI::PositiveNumber);
  timing->add_option("--jobs", jobs, "Worker threads for the time-parallel step");
  timing->add_option("--dt", timing_dt, "Time step");

  auto* aopt = app.add_subcommand("alpha-opt", "Optimised alpha for given coefficients");
  AlphaSearchConfig acfg;
  aopt->add_option("--a", acfg.a, "Diffusion coefficient")->required();
  aopt->add_option("--c", acfg.c, "Reaction coefficient")->required();
  aopt->add_option("--T", acfg.T, "Window length")->required();
  aopt->add_option("--nx", acfg.nx, "Interior grid points")->required();
  aopt->add_option("--length", acfg.length, "Domain length");

  auto* lip = app.add_subcommand("lipschitz", "Sampled one-sided Lipschitz check of a reaction term");
  std::string reaction = "fisher";
  double M = 0.0, lo = -1.0, hi = 1.0;
  std::size_t n = 64;
  int pairs = 1000;
  std::uint64_t seed = 0;
  lip->add_option("--reaction", reaction, "allen_cahn | fisher | exp | power<p> | linear")
      ->check(CLI::IsMember({"allen_cahn", "fisher", "exp", "power2", "power3", "power4", "power5", "linear"}));
  lip->add_option("--M", M, "Candidate constant");
  lip->add_option("--lo", lo, "Sample interval lower end");
  lip->add_option("--hi", hi, "Sample interval upper end");
  lip->add_option("--n", n, "Vector length");
  lip->add_option("--pairs", pairs, "Sampled pairs");
  lip->add_option("--seed", seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config;
  }

  try {
    if (*list) {
      std::cout << list_presets();
      return 0;
    }
    if (*run) {
      if (preset.empty() && config_file.empty()) throw config_error("run: give a preset name or --config");
      ExperimentConfig base = preset.empty() ? ExperimentConfig{} : preset_config(preset);
      if (!config_file.empty()) {
        std::ifstream is(config_file);
        apply_settings(base, parse_config(is));
      }
      const auto overrides = flag_overrides(run->remaining());
      RunRecord rec = run_config(base, overrides);
      ExperimentConfig where = base;
      apply_settings(where, overrides);
      rec.files = write_record(rec, output_dir(where));
      print_record(rec);
      return rec.exit_code();
    }
    if (*timing) {
      std::ifstream is(grid_file);
      ExperimentConfig base;
      base.name = "timing";
      base.task = Task::Timing;
      base.problem = Problem::Heat2d;
      base.c = 0.0;
      base.dt = timing_dt;
      base.repeats = repeats;
      base.jobs = jobs;
      base.parallel_time = jobs > 1;
      base.out = timing_out;
      RunRecord rec;
      rec.preset = base.name;
      rec.config_echo = base.echo();
      rec.timing = run_timing_table(parse_timing_grid(is), base);
      rec.files = write_record(rec, output_dir(base));
      print_record(rec);
      return rec.exit_code();
    }
    if (*aopt) {
      const auto r = alpha_opt_search(acfg);
      std::cout << "alpha_opt=" << format_double(r.alpha) << "\n";
      for (const auto& [x, f] : r.trace) std::cout << "  " << format_double(x) << " " << format_double(f) << "\n";
      return 0;
    }
    if (*lip) {
      Nonlinearity nl = reaction == "allen_cahn" ? Nonlinearity::allen_cahn()
                        : reaction == "fisher"   ? Nonlinearity::fisher()
                        : reaction == "exp"      ? Nonlinearity::exp_reaction()
                        : reaction == "linear"   ? Nonlinearity::linear(1.0)
                                                 : Nonlinearity::power(reaction.back() - '0');
      const double worst = one_sided_lipschitz_sample(nl, M, lo, hi, n, pairs, seed);
      std::cout << "max <N(u)-N(v),u-v> + M|u-v|^2 = " << format_double(worst) << (worst <= 0.0 ? " (holds)" : " (violated)")
                << "\n";
      return worst <= 0.0 ? 0 : 2;
    }
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const breakdown_error& e) {
    std::cerr << "breakdown: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
