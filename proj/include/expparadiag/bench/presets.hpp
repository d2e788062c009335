#pragma once

#include "config.hpp"

namespace expparadiag::bench {

struct Preset {
  const char* name;
  /// Figure or table the preset reproduces, e.g. "fig4" or "table2".
  const char* figure;
  const char* summary;
  const char* settings;
};

// Figures are numbered in order of appearance within the experiments.
inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> list{
      {"heat1d", "fig1", "1D heat, Richardson, BDF1 (basic smoke run)",
       "problem = heat1d\na = 0.1\nsolver = richardson\nT = 1\nmesh = 128\n"},
      {"table1", "table1", "alpha_opt over (a, c) x (N_x, T)", "task = alpha_table\n"},
      {"fig_bound_heat1d", "fig1", "Richardson error vs contraction bound, (a,c)=(0.1,0)",
       "problem = heat1d\na = 0.1\nc = 0\nsolver = richardson\nT = 1\nmesh = 128\n"},
      {"fig_bound_reaction1d", "fig1", "Richardson error vs contraction bound, (a,c)=(1e-5,1)",
       "problem = heat1d\na = 1e-5\nc = 1\nsolver = richardson\nT = 1\nmesh = 128\n"},
      {"fig_pade", "fig1", "Pade2/Pade3 propagators against the exact-propagator reference",
       "problem = heat1d\nc = 0\nsolver = richardson\nT = 2\nmesh = 128\nmaxit = 30\nstagnation_ratio = 0.9\n"
       "sweep = propagator=pade2,pade3; a=0.1,0.01,0.001\n"},
      {"fig_mesh_heat1d", "fig2", "Richardson mesh independence, T=4",
       "problem = heat1d\nc = 0.1\nsolver = richardson\nT = 4\nsweep = a=0.01,1e-5; mesh=32,64,128,256\n"},
      {"fig_long_window_heat1d", "fig2", "Richardson on long windows, h=dt=1/128",
       "problem = heat1d\nc = 0.1\nsolver = richardson\nmesh = 128\nsweep = a=0.1,1e-5; T=4,16,64\n"},
      {"fig_initial_guess_heat1d", "fig3", "Richardson from different initial iterates, T=4",
       "problem = heat1d\nc = 0.1\nsolver = richardson\nT = 4\nmesh = 128\n"
       "sweep = a=0.1,1e-5; guess=zero,poly,sin_low,sin_high,exp\n"},
      {"fig_spectrum_bdf1", "fig3", "Spectrum of the preconditioned BDF1 system, N_x=63, N_t=30",
       "task = spectrum\nproblem = heat1d\nc = 0.1\nT = 0.3\nnt = 30\nh = 0.03125\nsweep = a=0.1,1e-5\n"},
      {"fig_gmres_heat1d", "fig4", "Preconditioned GMRES for growing windows, dt=0.01",
       "problem = heat1d\nc = 0.1\nsolver = gmres\nh = 0.0078125\ndt = 0.01\nsweep = a=0.1,1e-5; T=4,16,64\n"},
      {"fig_gmres_alpha_heat1d", "fig4", "Preconditioned GMRES for different alpha, T=4",
       "problem = heat1d\nsolver = gmres\nh = 0.0078125\ndt = 0.01\nT = 4\n"
       "case = a=0.1 c=0.1\ncase = a=1e-5 c=0\nsweep = alpha=1,0.1,0.01,0.001,opt\n"},
      {"fig_gmres_mesh_heat1d", "fig5", "Preconditioned GMRES mesh independence, T=4",
       "problem = heat1d\nc = 0.1\nsolver = gmres\nT = 4\nsweep = a=0.1,1e-5; mesh=32,64,128,256\n"},
      {"fig_gmres_schrodinger1d", "fig5", "Preconditioned GMRES for the 1D Schrodinger equation",
       "problem = schrodinger1d\na = i\nc = 2i\nsolver = gmres\nh = 0.0078125\ndt = 0.01\nsweep = T=1,2,4\n"},
      {"fig_schrodinger1d_profile", "fig5", "1D Schrodinger solution at T=2",
       "problem = schrodinger1d\na = i\nc = 2i\nsolver = gmres\nh = 0.0078125\ndt = 0.01\nT = 2\nwrite_solution = true\n"},
      {"fig_bdf2_alpha", "fig6", "BDF2 Richardson for different alpha, T=2",
       "problem = heat1d\na = 1e-5\nc = 0\norder = 2\nsolver = richardson\nh = 0.0078125\ndt = 0.01\nT = 2\n"
       "sweep = alpha=0.1,0.01,0.001,opt\n"},
      {"fig_bdf2_window", "fig6", "BDF2 Richardson for different windows",
       "problem = heat1d\na = 1e-5\nc = 0\norder = 2\nsolver = richardson\nh = 0.0078125\ndt = 0.01\n"
       "sweep = T=1,2,4,8\n"},
      {"fig_spectrum_bdf2", "fig6", "Spectrum of the preconditioned BDF2 system, N_x=63, N_t=30",
       "task = spectrum\nproblem = heat1d\nc = 0.1\norder = 2\nT = 0.3\nnt = 30\nh = 0.03125\nsweep = a=0.1,1e-5\n"},
      {"fig_bdf2_gmres_window", "fig7", "BDF2 preconditioned GMRES for growing windows",
       "problem = heat1d\nc = 0.1\norder = 2\nsolver = gmres\nh = 0.0078125\ndt = 0.01\n"
       "sweep = a=0.1,1e-5; T=4,16,64\n"},
      {"fig_bdf2_gmres_mesh", "fig7", "BDF2 preconditioned GMRES mesh independence, T=4",
       "problem = heat1d\nc = 0.1\norder = 2\nsolver = gmres\nT = 4\nsweep = a=0.1,1e-5; mesh=32,64,128,256\n"},
      {"fig_bdf2_gmres_alpha", "fig8", "BDF2 preconditioned GMRES for different alpha, T=4",
       "problem = heat1d\nc = 0.1\norder = 2\nsolver = gmres\nmesh = 128\nT = 4\n"
       "sweep = a=0.1,1e-5; alpha=0.1,0.01,0.001,opt\n"},
      {"fig_biharmonic_window", "fig8", "BDF2 GMRES for the biharmonic heat equation",
       "problem = biharmonic1d\na = 0\nbeta = 1e-5\norder = 2\nsolver = gmres\nh = 0.0078125\ndt = 0.05\nsweep = T=1,2,4,8\n"},
      {"fig_biharmonic_profile", "fig8", "Biharmonic heat solution at T=4",
       "problem = biharmonic1d\na = 0\nbeta = 1e-5\norder = 2\nsolver = gmres\nmesh = 128\nT = 4\nwrite_solution = true\n"},
      {"fig_heat2d_window", "fig9", "2D Richardson for different windows",
       "problem = heat2d\nsolver = richardson\nh = 0.025\ndt = 0.05\n"
       "case = a=0.1 c=0.1\ncase = a=1e-5 c=0\nsweep = T=1,2,4,8\n"},
      {"fig_heat2d_alpha", "fig9", "2D Richardson for different alpha, T=4",
       "problem = heat2d\na = 1e-5\nc = 0.1\nsolver = richardson\nh = 0.025\ndt = 0.05\nT = 4\n"
       "sweep = alpha=0.1,0.01,0.001,opt\n"},
      {"fig_heat2d_mesh", "fig9", "2D Richardson mesh independence, T=4",
       "problem = heat2d\na = 1e-5\nc = 0.1\nsolver = richardson\nT = 4\nsweep = mesh=10,20,40,80\n"},
      {"fig_gmres_bdf1_2d_window", "fig10", "2D BDF1 GMRES for different windows, dt=0.5",
       "problem = heat2d\nsolver = gmres\nh = 0.025\ndt = 0.5\n"
       "case = a=0.1 c=0.1\ncase = a=1e-5 c=0\nsweep = T=4,8,16,32\n"},
      {"fig_gmres_bdf1_2d_alpha", "fig10", "2D BDF1 GMRES for different alpha, T=4",
       "problem = heat2d\na = 1e-5\nc = 0.1\nsolver = gmres\nh = 0.025\ndt = 0.05\nT = 4\n"
       "sweep = alpha=0.1,0.01,0.001,opt\n"},
      {"fig_gmres_bdf2_2d_window", "fig11", "2D BDF2 GMRES for different windows, dt=0.5",
       "problem = heat2d\norder = 2\nsolver = gmres\nh = 0.025\ndt = 0.5\n"
       "case = a=0.1 c=0.1\ncase = a=1e-5 c=0\nsweep = T=4,8,16,32\n"},
      {"fig_gmres_bdf2_2d_alpha", "fig11", "2D BDF2 GMRES for different alpha, T=4",
       "problem = heat2d\na = 1e-5\nc = 0.1\norder = 2\nsolver = gmres\nh = 0.025\ndt = 0.05\nT = 4\n"
       "sweep = alpha=0.1,0.01,0.001,opt\n"},
      {"fig_schrodinger2d_window", "fig12", "2D Schrodinger BDF2 GMRES for different windows",
       "problem = schrodinger2d\na = i\nc = 200i\norder = 2\nsolver = gmres\nh = 0.025\ndt = 0.05\nsweep = T=1,2,4\n"},
      {"fig_schrodinger2d_alpha", "fig12", "2D Schrodinger BDF2 GMRES for different alpha, T=1",
       "problem = schrodinger2d\na = i\nc = 200i\norder = 2\nsolver = gmres\nh = 0.025\ndt = 0.05\nT = 1\n"
       "sweep = alpha=0.1,0.01,0.001,opt\n"},
      {"fig_schrodinger2d_profile", "fig12", "2D Schrodinger solution at T=1 and T=4",
       "problem = schrodinger2d\na = i\nc = 200i\norder = 2\nsolver = gmres\nh = 0.025\ndt = 0.05\nwrite_solution = true\n"
       "sweep = T=1,4\n"},
      {"table2", "table2", "GMRES vs BiCGStab wall time, 2D heat, dt=0.01 (desk scale)",
       "task = timing\nproblem = heat2d\nc = 0\ndt = 0.01\nsweep = order=1,2; a=0.1,1e-5; nx=361; nt=200,400,800\n"},
      {"fig_ade_window", "fig13", "Advection-diffusion Richardson for different windows",
       "problem = ade1d\nb = 2\nsolver = richardson\nmesh = 128\nsweep = a=0.1,1e-5; T=1,2,4\n"},
      {"fig_ade_profile", "fig13", "Advection-diffusion solution at T=3, a=1e-5",
       "problem = ade1d\na = 1e-5\nb = 2\nsolver = richardson\nmesh = 128\nT = 3\nwrite_solution = true\n"},
      {"fig_ade_spectrum", "fig13", "Advection-diffusion preconditioned spectrum, a=0.1, N_x=65, N_t=30",
       "task = spectrum\nproblem = ade1d\na = 0.1\nb = 2\nT = 0.3\nnt = 30\nnx = 65\n"},
      {"fig_ade_spectrum_low", "fig14", "Advection-diffusion preconditioned spectrum, a=1e-5",
       "task = spectrum\nproblem = ade1d\na = 1e-5\nb = 2\nT = 0.3\nnt = 30\nnx = 65\n"},
      {"fig_ade_gmres_window", "fig14", "Advection-diffusion GMRES for different windows, dt=0.01",
       "problem = ade1d\nb = 2\nsolver = gmres\nh = 0.0078125\ndt = 0.01\nsweep = a=0.1,1e-5; T=1,2,4\n"},
      {"fig_bdf34", "fig15", "BDF3 and BDF4 GMRES, dt=0.05",
       "problem = heat1d\nc = 0\nsolver = gmres\nh = 0.0078125\ndt = 0.05\nsweep = order=3,4; a=0.1,1e-5; T=2,8\n"},
      {"fig_bdf56", "fig16", "BDF5 and BDF6 GMRES, dt=0.05",
       "problem = heat1d\nc = 0\nsolver = gmres\nh = 0.0078125\ndt = 0.05\nsweep = order=5,6; a=0.1,1e-5; T=2,8\n"},
      {"fig_allen_cahn", "fig17", "Allen-Cahn manufactured solution, Newton-ParaDiag",
       "problem = allen_cahn\neps = 0.01\nsolver = newton\nh = 0.0078125\nT = 0.1\nnt = 100\nalpha = 0.005\n"
       "maxit = 10\nwrite_solution = true\nsweep = jacobian=averaged,initial\n"},
      {"fig_power_reaction", "fig18", "u_t = u_xx - u^p: Newton (averaged, initial) and IMEX",
       "problem = power_reaction\nh = 0.0078125\nT = 0.5\nnt = 500\nalpha = 0.005\n"
       "case = solver=newton jacobian=averaged\ncase = solver=newton jacobian=initial\ncase = solver=imex\n"
       "sweep = p=2,3,4,5\n"},
      {"fig_exp_reaction_window", "fig19", "u_t = a u_xx - e^u, IMEX, different windows",
       "problem = exp_reaction\na = 1\nsolver = imex\nh = 0.00390625\ndt = 0.001\nalpha = 5e-5\nsweep = T=0.25,0.5,1\n"},
      {"fig_exp_reaction_diffusion", "fig19", "u_t = a u_xx - e^u, IMEX, different a, T=1",
       "problem = exp_reaction\nsolver = imex\nh = 0.00390625\ndt = 0.001\nT = 1\nalpha = 5e-5\nsweep = a=1,0.1,0.01\n"},
      {"fig_exp_reaction_alpha", "fig19", "u_t = a u_xx - e^u, IMEX, different alpha, T=1",
       "problem = exp_reaction\na = 0.01\nsolver = imex\nh = 0.00390625\ndt = 0.001\nT = 1\n"
       "sweep = alpha=5e-5,5e-4,5e-3\n"},
      {"fig_fisher", "fig20", "Fisher equation, Newton-ParaDiag against sequential Newton",
       "problem = fisher\na = 0.1\nsolver = newton\nh = 0.0078125\nT = 0.1\nnt = 100\nalpha = 0.0005\nmaxit = 10\n"
       "write_solution = true\nsweep = jacobian=averaged,initial\n"},
      {"fig_fisher_imex_window", "fig21", "Fisher equation, IMEX, different windows",
       "problem = fisher\na = 0.01\nsolver = imex\nh = 0.0078125\ndt = 0.001\nalpha = 0.0005\nsweep = T=0.25,0.5,1\n"},
      {"fig_fisher_imex_diffusion", "fig21", "Fisher equation, IMEX, different a, T=1",
       "problem = fisher\nsolver = imex\nh = 0.0078125\ndt = 0.001\nT = 1\nalpha = 0.0005\nsweep = a=1,0.1,0.01\n"},
      {"fig_fisher_imex_alpha", "fig21", "Fisher equation, IMEX, different alpha, T=1",
       "problem = fisher\na = 0.1\nsolver = imex\nh = 0.0078125\ndt = 0.001\nT = 1\nsweep = alpha=5e-5,5e-4,5e-3\n"},
      {"fig_allen_cahn_2d", "fig22", "2D Allen-Cahn, IMEX, different eps, T=0.5",
       "problem = allen_cahn_2d\nsolver = imex\nh = 0.03333333333333333\ndt = 0.001\nT = 0.5\nalpha = 0.005\n"
       "write_solution = true\nsweep = eps=0.1,0.05,0.01\n"},
  };
  return list;
}

/// Figure and table ids the catalogue must cover.
inline std::vector<std::string> required_figures() {
  std::vector<std::string> ids{"table1", "table2"};
  for (int k = 1; k <= 22; ++k) ids.push_back("fig" + std::to_string(k));
  return ids;
}

inline const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (name == p.name) return p;
  throw config_error("unknown preset '" + name + "' (see 'list')");
}

inline ExperimentConfig preset_config(const std::string& name) {
  const Preset& p = find_preset(name);
  ExperimentConfig cfg;
  cfg.name = p.name;
  std::istringstream is(p.settings);
  apply_settings(cfg, parse_config(is));
  return cfg;
}

/// One line per preset: name, figure id, summary.
inline std::string list_presets() {
  std::ostringstream os;
  for (const auto& p : presets()) {
    os << p.name;
    for (std::size_t k = std::string(p.name).size(); k < 30; ++k) os << ' ';
    os << p.figure;
    for (std::size_t k = std::string(p.figure).size(); k < 8; ++k) os << ' ';
    os << p.summary << "\n";
  }
  return os.str();
}

}  // namespace expparadiag::bench
