#include <gtest/gtest.h>

#include <expparadiag/bench/runner.hpp>

#include <filesystem>
#include <set>
#include <sstream>

using namespace expparadiag;
using namespace expparadiag::bench;

namespace {

ExperimentConfig from_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  apply_settings(c, parse_config(is));
  return c;
}

std::string strip_last_column(const std::string& csv) {
  std::istringstream is(csv);
  std::string out, line;
  while (std::getline(is, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("expparadiag_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Bench, ComplexParsing) {
  EXPECT_EQ(parse_complex("0.5"), cplx(0.5, 0.0));
  EXPECT_EQ(parse_complex("i"), cplx(0.0, 1.0));
  EXPECT_EQ(parse_complex("-i"), cplx(0.0, -1.0));
  EXPECT_EQ(parse_complex("200i"), cplx(0.0, 200.0));
  EXPECT_EQ(parse_complex("1e-5+2i"), cplx(1e-5, 2.0));
  EXPECT_EQ(parse_complex("3-0.5i"), cplx(3.0, -0.5));
  EXPECT_THROW(parse_complex("abc"), config_error);
  EXPECT_EQ(format_double(0.0001953125), "0.0001953125");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(parse_complex(format_complex(cplx(0.1, -2.5))), cplx(0.1, -2.5));
}

TEST(Bench, ConfigParsingAndEcho) {
  const auto c = from_text("# comment\nproblem = schrodinger1d\na = i\nc = 2i  # trailing\nmesh = 64\nT = 2\n"
                           "alpha = 0.001\nsolver = gmres\norder = 2\n");
  EXPECT_EQ(c.problem, Problem::Schrodinger1d);
  EXPECT_EQ(c.a, cplx(0.0, 1.0));
  EXPECT_EQ(c.c, cplx(0.0, 2.0));
  EXPECT_DOUBLE_EQ(c.h, 1.0 / 64);
  EXPECT_DOUBLE_EQ(c.dt, 1.0 / 64);
  EXPECT_FALSE(c.alpha_opt);
  EXPECT_EQ(c.steps(), 128u);
  const auto again = from_text(c.echo());
  EXPECT_EQ(again.echo(), c.echo());
}

TEST(Bench, ConfigErrors) {
  ExperimentConfig c;
  EXPECT_THROW(c.set("nonsense", "1"), config_error);
  EXPECT_THROW(c.set("solver", "cg"), config_error);
  EXPECT_THROW(c.set("tol", "small"), config_error);
  EXPECT_THROW(c.set("order", "2.5"), config_error);
  auto bad = from_text("T = 1\ndt = 0.3\n");
  EXPECT_THROW(bad.validate(), config_error);
  auto imex_linear = from_text("problem = heat1d\nsolver = imex\n");
  EXPECT_THROW(imex_linear.validate(), config_error);
  EXPECT_THROW(preset_config("no_such_preset"), config_error);
  std::istringstream missing_eq("a 0.1\n");
  EXPECT_THROW(parse_config(missing_eq), config_error);
}

TEST(Bench, SweepExpansion) {
  const auto axes = parse_sweep("a=0.1,1e-5; T=4,16,64");
  ASSERT_EQ(axes.size(), 2u);
  EXPECT_EQ(axes[1].second.size(), 3u);
  EXPECT_EQ(drop_from_sweep("a=0.1,1e-5; T=4,16,64", "a"), "T=4,16,64");
  const auto base = preset_config("fig_gmres_heat1d");
  const auto all = expand(base);
  ASSERT_EQ(all.size(), 6u);
  EXPECT_EQ(all.front().first, "a=0.1 T=4");
  EXPECT_EQ(all.back().first, "a=1e-5 T=64");
  const auto pinned = expand(base, {{"T", "2"}});
  ASSERT_EQ(pinned.size(), 2u);
  for (const auto& [label, cfg] : pinned) EXPECT_DOUBLE_EQ(cfg.T, 2.0) << label;
}

TEST(Bench, PresetCatalogueCoversEveryFigure) {
  std::set<std::string> covered;
  std::set<std::string> names;
  for (const auto& p : presets()) {
    covered.insert(p.figure);
    EXPECT_TRUE(names.insert(p.name).second) << "duplicate " << p.name;
  }
  for (const auto& id : required_figures()) EXPECT_TRUE(covered.count(id)) << id;
  EXPECT_NE(list_presets().find("table1"), std::string::npos);
}

TEST(Bench, EveryPresetExpandsAndValidates) {
  for (const auto& p : presets()) {
    const auto cfg = preset_config(p.name);
    std::size_t n = 0;
    EXPECT_NO_THROW(n = expand(cfg).size()) << p.name;
    EXPECT_GE(n, 1u) << p.name;
  }
}

TEST(Bench, ZeroAlphaIsADirectSolve) {
  auto c = from_text("problem = heat1d\nsolver = richardson\nmesh = 64\nT = 0.5\nalpha = 0\n");
  const auto r = run_case(c);
  EXPECT_TRUE(r.report.converged());
  EXPECT_EQ(r.report.iterations, 1);
}

TEST(Bench, AlphaTable) {
  const auto rows = alpha_table();
  ASSERT_EQ(rows.size(), 16u);
  for (const auto& r : rows) EXPECT_LE(r.alpha, 2e-4);
}

TEST(Bench, DeterministicOutput) {
  const auto dir1 = scratch("det1"), dir2 = scratch("det2");
  const std::vector<std::pair<std::string, std::string>> fast = {{"mesh", "32"}, {"T", "1"}};
  auto run_into = [&](const std::filesystem::path& d) {
    auto kv = fast;
    kv.emplace_back("out", d.string());
    return run_preset("fig_initial_guess_heat1d", kv);
  };
  const auto a = run_into(dir1);
  const auto b = run_into(dir2);
  ASSERT_EQ(a.files.size(), b.files.size());
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream is(p);
    return std::string(std::istreambuf_iterator<char>(is), {});
  };
  EXPECT_EQ(slurp(dir1 / "fig_initial_guess_heat1d.csv"), slurp(dir2 / "fig_initial_guess_heat1d.csv"));
  EXPECT_EQ(strip_last_column(slurp(dir1 / "fig_initial_guess_heat1d_summary.csv")),
            strip_last_column(slurp(dir2 / "fig_initial_guess_heat1d_summary.csv")));
  EXPECT_EQ(slurp(dir1 / "fig_initial_guess_heat1d.cfg"), slurp(dir2 / "fig_initial_guess_heat1d.cfg"));
  EXPECT_EQ(a.exit_code(), 0);
}

TEST(Bench, HistoryCsvShape) {
  const auto rec = run_config(preset_config("heat1d"));
  std::ostringstream os;
  write_history_csv(os, rec.preset, rec.cases);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "preset,iter,residual,error");
  int rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3) << line;
    ++rows;
  }
  EXPECT_EQ(rows, rec.cases.front().report.iterations + 1);
}

TEST(Bench, TimingGrid) {
  std::istringstream grid("order,a,nx,nt\n# small\n1,0.1,49,20\n1,0.1,49,40\n");
  const auto specs = parse_timing_grid(grid);
  ASSERT_EQ(specs.size(), 2u);
  auto base = from_text("problem = heat2d\nc = 0\ndt = 0.01\nrepeats = 1\n");
  const auto rows = run_timing_table(specs, base);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.max_difference, 1e-8);
    EXPECT_GT(r.time_gmres, 0.0);
  }
  EXPECT_TRUE(std::isnan(rows[0].ratio_gmres));
  EXPECT_FALSE(std::isnan(rows[1].ratio_gmres));
  std::ostringstream os;
  write_timing_csv(os, rows);
  const std::string csv = os.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  std::istringstream bad("1,0.1,49\n");
  EXPECT_THROW(parse_timing_grid(bad), config_error);
}

TEST(Bench, MeshIndependenceSmall) {
  auto base = from_text("problem = heat1d\nc = 0.1\nsolver = gmres\nT = 1\nsweep = mesh=16,32,64\n");
  int lo = 100, hi = 0;
  for (const auto& [label, cfg] : expand(base)) {
    const auto r = run_case(cfg, label);
    EXPECT_TRUE(r.report.converged()) << label;
    lo = std::min(lo, r.report.iterations);
    hi = std::max(hi, r.report.iterations);
  }
  EXPECT_LE(hi - lo, 1);
}

TEST(Bench, NonlinearRunReportsExactError) {
  auto c = preset_config("fig_allen_cahn");
  c.sweep.clear();
  c.nt = 20;
  c.T = 0.02;
  c.h = 1.0 / 32;
  c.tol = 1e-12;
  c.maxit = 8;
  const auto r = run_case(c);
  EXPECT_TRUE(r.report.converged());
  EXPECT_TRUE(std::isfinite(r.exact_error));
  EXPECT_LT(r.exact_error, 1e-3);
  EXPECT_EQ(r.exact_state.size(), r.final_state.size());
}

TEST(Bench, OutputDirectoryPrecedence) {
  ExperimentConfig c;
  ::setenv("EXPPARADIAG_OUT", "/tmp/from_env", 1);
  EXPECT_EQ(output_dir(c), std::filesystem::path("/tmp/from_env"));
  c.out = "/tmp/from_flag";
  EXPECT_EQ(output_dir(c), std::filesystem::path("/tmp/from_flag"));
  ::unsetenv("EXPPARADIAG_OUT");
  c.out.clear();
  EXPECT_EQ(output_dir(c), std::filesystem::path("results"));
}
