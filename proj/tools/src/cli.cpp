#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "coalesce/closed_form.hpp"
#include "coalesce/error.hpp"
#include "coalesce/experiments.hpp"
#include "coalesce/spectrum.hpp"
#include "coalesce/transfer_matrix.hpp"
#include "coalesce/two_mode.hpp"
#include "coalesce/version.hpp"
#include "config.hpp"
#include "output.hpp"

namespace coalesce::cli {

namespace {

using std::numbers::pi;

struct Command {
  const char* name;
  const char* help;
  Format default_format;
};

constexpr Command kCommands[] = {
    {"spectrum", "Transmission spectrum T(k) of the membrane-in-the-middle cavity", Format::csv},
    {"peaks", "Refined transmission maxima with half widths", Format::csv},
    {"splitting", "Closed-form mode splitting and shifted peak pair", Format::json},
    {"threshold", "Coalescence threshold, closed form and numeric merge point", Format::json},
    {"sweep-x", "Resonant transmission versus membrane displacement", Format::csv},
    {"branches", "Tracked coalescing pair versus membrane displacement", Format::csv},
    {"sensitivity", "Quadratic readout coupling and its enhancement", Format::json},
    {"stack", "Effective polarizability of a uniform multilayer stack", Format::json},
    {"figures", "Figure datasets: fig1, fig2, fig3, threshold-sweep", Format::csv},
    {"report", "Summary of closed-form, two-mode and numeric quantities", Format::json},
};

const std::map<std::string, std::string>& flag_help() {
  static const std::map<std::string, std::string> help{
      {"zeta", "end-mirror polarizability"},
      {"zeta_m", "membrane polarizability"},
      {"x", "membrane displacement from the cavity centre"},
      {"k_min", "lower end of the k window"},
      {"k_max", "upper end of the k window"},
      {"points", "samples in the k window"},
      {"x_min", "lower end of the displacement grid"},
      {"x_max", "upper end of the displacement grid"},
      {"x_points", "samples in the displacement grid"},
      {"zeta_m_min", "first membrane polarizability of a sweep"},
      {"zeta_m_max", "last membrane polarizability of a sweep"},
      {"sweep_points", "samples in a polarizability sweep"},
      {"n_layers", "number of layers in a stack"},
      {"zeta_layer", "polarizability of each stack layer"},
      {"k", "probe wavenumber for stack"},
      {"spacing", "stack spacing (grid-searched when omitted)"},
      {"amplitude", "displacement amplitude for the Lamb-Dicke cap"},
      {"mass", "membrane mass in kg (enables the physical estimate)"},
      {"mech_freq", "mechanical angular frequency in rad/s"},
      {"temperature", "bath temperature in K"},
      {"wavelength", "optical wavelength in m"},
      {"grid_per_kappa", "peak-search grid points per linewidth"},
      {"refine_tol", "peak refinement tolerance in k"},
      {"threads", "worker threads, 0 for all cores"},
      {"format", "csv or json"},
      {"output_path", "write to this file instead of stdout"},
  };
  return help;
}

std::string flag_names(const std::string& key) {
  std::string dashed = key;
  std::replace(dashed.begin(), dashed.end(), '_', '-');
  if (key == "k_min") return "--k-min,--kmin";
  if (key == "k_max") return "--k-max,--kmax";
  if (key == "n_layers") return "--layers,--n-layers";
  if (key == "output_path") return "-o,--output";
  return "--" + dashed;
}

Json config_params(const RunConfig& c, Format format) {
  Json p = Json::object();
  p["version"] = kVersion;
  p["subcommand"] = c.subcommand;
  if (!c.figure.empty()) p["figure"] = c.figure;
  p["zeta"] = c.zeta;
  p["zeta_m"] = c.zeta_m;
  p["x"] = c.x;
  if (c.k_min) p["k_min"] = *c.k_min;
  if (c.k_max) p["k_max"] = *c.k_max;
  p["points"] = c.points;
  if (c.x_min) p["x_min"] = *c.x_min;
  if (c.x_max) p["x_max"] = *c.x_max;
  p["x_points"] = c.x_points;
  if (c.zeta_m_min) p["zeta_m_min"] = *c.zeta_m_min;
  if (c.zeta_m_max) p["zeta_m_max"] = *c.zeta_m_max;
  p["sweep_points"] = c.sweep_points;
  p["n_layers"] = c.n_layers;
  p["zeta_layer"] = c.zeta_layer;
  p["k"] = c.k;
  if (c.spacing) p["spacing"] = *c.spacing;
  if (c.amplitude) p["amplitude"] = *c.amplitude;
  if (c.mass) p["mass"] = *c.mass;
  p["mech_freq"] = c.mech_freq;
  p["temperature"] = c.temperature;
  p["wavelength"] = c.wavelength;
  p["grid_per_kappa"] = c.grid_per_kappa;
  p["refine_tol"] = c.refine_tol;
  p["threads"] = c.threads;
  p["format"] = format == Format::csv ? "csv" : "json";
  if (!c.output_path.empty()) p["output_path"] = c.output_path;
  return p;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

PeakSearchOptions search_options(const RunConfig& c) {
  return {c.grid_per_kappa, c.refine_tol, Parallelism{c.threads}};
}

Bracket k_window(const RunConfig& c, Bracket fallback) {
  return {c.k_min.value_or(fallback.lo), c.k_max.value_or(fallback.hi)};
}

// Window for the coalescing pair: centred on the closed-form pair centre,
// wide enough for the pair and narrow enough to exclude its neighbours.
Bracket branch_window(const RunConfig& c) {
  const double center = pair_center(c.zeta, c.zeta_m);
  const double half = std::min(0.45 * pi, std::max(0.075, 3.0 * half_splitting(c.zeta_m)));
  return k_window(c, {center - half, center + half});
}

std::vector<double> x_grid(const RunConfig& c, double default_half) {
  return linspace(c.x_min.value_or(-default_half), c.x_max.value_or(default_half), c.x_points);
}

CavitySystem membrane_system(const RunConfig& c) {
  return CavitySystem::membrane_in_middle(Polarizability{c.zeta}, Polarizability{c.zeta_m}, c.x);
}

Output table(Json params, std::vector<std::string> names, std::vector<std::vector<double>> values) {
  Output o;
  o.params = std::move(params);
  o.columns = std::move(names);
  o.values = std::move(values);
  o.is_table = true;
  return o;
}

Output from_dataset(Json params, const FigureDataset& ds) {
  ds.validate();
  Json extra = Json::object();
  for (const auto& [key, value] : ds.params) {
    std::visit([&](const auto& v) { extra[key] = v; }, value);
  }
  params["dataset"] = ds.name;
  for (const auto& [key, value] : extra.items()) params["dataset_" + key] = value;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  for (const Column& col : ds.columns) {
    names.push_back(col.name);
    values.push_back(col.values);
  }
  return table(std::move(params), std::move(names), std::move(values));
}

Output cmd_spectrum(const RunConfig& c, Json params) {
  const Bracket w = k_window(c, pair_window(c.zeta));
  const auto samples = scan_transmission(membrane_system(c), w.lo, w.hi, c.points, Parallelism{c.threads});
  std::vector<double> k, t;
  for (const auto& s : samples) {
    k.push_back(s.k);
    t.push_back(s.T);
  }
  return table(std::move(params), {"k", "T"}, {std::move(k), std::move(t)});
}

Output cmd_peaks(const RunConfig& c, Json params) {
  const Bracket w = k_window(c, pair_window(c.zeta));
  const auto peaks = find_peaks(membrane_system(c), w.lo, w.hi, search_options(c));
  std::vector<double> k, t, h;
  for (const auto& p : peaks) {
    k.push_back(p.k_peak);
    t.push_back(p.T_peak);
    h.push_back(p.hwhm);
  }
  return table(std::move(params), {"k_peak", "T_peak", "hwhm"}, {std::move(k), std::move(t), std::move(h)});
}

Output cmd_splitting(const RunConfig& c, Json params) {
  Output o;
  o.params = std::move(params);
  const ShiftedPeaks sp = peak_positions(c.zeta, c.zeta_m);
  o.record["zeta_m"] = c.zeta_m;
  o.record["mode_splitting"] = mode_splitting(c.zeta_m);
  o.record["delta"] = half_splitting(c.zeta_m);
  o.record["kappa"] = bare_linewidth(c.zeta);
  o.record["eps_plus"] = sp.eps_plus;
  o.record["eps_minus"] = sp.eps_minus;
  o.record["k_lower"] = sp.k_lower;
  o.record["k_upper"] = sp.k_upper;
  o.record["pair_gap"] = sp.pair_gap;
  return o;
}

Output cmd_threshold(const RunConfig& c, Json params) {
  Output o;
  o.params = std::move(params);
  const double star = coalescence_threshold(c.zeta);
  o.record["zeta"] = c.zeta;
  o.record["zeta_m_star"] = star;
  o.record["zeta_m_merge"] = find_merge_point(Polarizability{c.zeta}, {0.5 * star, 1.5 * star});
  o.record["discriminant"] = threshold_discriminant(c.zeta, c.zeta_m);
  o.record["below_threshold"] = threshold_discriminant(c.zeta, c.zeta_m) >= 0.0;
  if (c.n_layers >= 2) o.record["multilayer_threshold"] = multilayer_threshold(c.zeta, c.n_layers);
  return o;
}

Output cmd_sweep_x(const RunConfig& c, Json params) {
  const double list[] = {c.zeta_m};
  const auto ds = run_fig2_resonant_transmission(c.zeta, list, x_grid(c, 0.1), search_options(c));
  const std::string label = zeta_m_label(c.zeta_m);
  return table(std::move(params), {"x", "k", "T", "T_sin_law", "T_two_mode"},
               {ds.column("x").values, ds.column("k_" + label).values,
                ds.column("T_num_" + label).values, ds.column("T_sin_law_" + label).values,
                ds.column("T_two_mode_" + label).values});
}

Output cmd_branches(const RunConfig& c, Json params) {
  const auto xs = x_grid(c, 0.005);
  const Bracket w = branch_window(c);
  params["k_window"] = {w.lo, w.hi};
  const auto pts = track_branches(Polarizability{c.zeta}, Polarizability{c.zeta_m}, xs, w, search_options(c));
  std::vector<std::vector<double>> cols(5);
  for (const auto& p : pts) {
    cols[0].push_back(p.x);
    cols[1].push_back(p.k_lower);
    cols[2].push_back(p.k_upper);
    cols[3].push_back(p.T_lower);
    cols[4].push_back(p.T_upper);
  }
  return table(std::move(params), {"x", "k_lower", "k_upper", "T_lower", "T_upper"}, std::move(cols));
}

Output cmd_sensitivity(const RunConfig& c, Json params) {
  Output o;
  o.params = std::move(params);
  const TwoModeParams tm = two_mode_params(c.zeta, c.zeta_m);
  const SensitivityReport s = readout_sensitivity(c.zeta, c.zeta_m, tm.omega, c.amplitude);
  o.record["omega"] = tm.omega;
  o.record["kappa"] = tm.kappa;
  o.record["delta"] = tm.delta;
  o.record["g_m"] = tm.g_m;
  o.record["g2_base"] = s.g2_base;
  o.record["g2"] = s.g2;
  o.record["g2_curvature"] = branch_curvature(tm);
  o.record["enhancement"] = s.enhancement;
  o.record["x_small_bound"] = s.x_small_bound;
  o.record["lamb_dicke_cap"] = s.lamb_dicke_cap;
  if (c.mass) {
    const PhysicalEnhancement pe =
        physical_enhancement({*c.mass, c.mech_freq, c.temperature, c.wavelength, c.zeta_m});
    o.record["x_zpf"] = pe.x_zpf;
    o.record["x_rms"] = pe.x_rms;
    o.record["nbar"] = pe.nbar;
    o.record["eta"] = pe.eta;
    o.record["physical_lamb_dicke_cap"] = pe.lamb_dicke_cap;
  }
  return o;
}

Output cmd_stack(const RunConfig& c, Json params) {
  Output o;
  o.params = std::move(params);
  const Polarizability layer{c.zeta_layer};
  double spacing = 0.0;
  double zeta_eff = 0.0;
  if (c.spacing) {
    spacing = *c.spacing;
    zeta_eff = effective_polarizability(uniform_stack(layer, c.n_layers, spacing), c.k);
  } else {
    const StackOptimum best = optimal_uniform_spacing(layer, c.n_layers, c.k);
    spacing = best.spacing;
    zeta_eff = best.zeta_eff;
  }
  o.record["n_layers"] = c.n_layers;
  o.record["zeta_layer"] = c.zeta_layer;
  o.record["k"] = c.k;
  o.record["spacing"] = spacing;
  o.record["zeta_eff"] = zeta_eff;
  o.record["single_layer_zeta_eff"] =
      effective_polarizability(uniform_stack(layer, 1, spacing), c.k);
  if (c.n_layers >= 2) o.record["multilayer_threshold"] = multilayer_threshold(c.zeta, c.n_layers);
  return o;
}

Output cmd_figures(const RunConfig& c, Json params) {
  const Parallelism par{c.threads};
  if (c.figure == "fig1") {
    const auto list = default_fig1_zeta_m_list(c.zeta);
    return from_dataset(std::move(params),
                        run_fig1_spectra(c.zeta, list, k_window(c, pair_window(c.zeta)), c.points, par));
  }
  if (c.figure == "fig2") {
    const double list[] = {-0.5, -5.0, -50.0};
    return from_dataset(std::move(params),
                        run_fig2_resonant_transmission(c.zeta, list, x_grid(c, 0.1), search_options(c)));
  }
  if (c.figure == "fig3") {
    return from_dataset(std::move(params), run_fig3_mode_pulling(c.zeta, c.zeta_m, x_grid(c, 0.005),
                                                                 branch_window(c), search_options(c)));
  }
  const double star = coalescence_threshold(c.zeta);
  const auto grid = linspace(c.zeta_m_min.value_or(0.8 * star), c.zeta_m_max.value_or(1.4 * star),
                             c.sweep_points);
  return from_dataset(std::move(params), run_threshold_sweep(c.zeta, grid));
}

Output cmd_report(const RunConfig& c, Json params) {
  Output o;
  o.params = std::move(params);
  const ClosedFormReport cf = closed_form_report(c.zeta, c.zeta_m);
  o.record["kappa"] = cf.kappa;
  o.record["delta"] = cf.delta;
  o.record["zeta_m_star"] = cf.zeta_m_star;
  o.record["below_threshold"] = cf.pair_gap.has_value();
  o.record["eps_plus"] = optional_number(cf.eps_plus);
  o.record["eps_minus"] = optional_number(cf.eps_minus);
  o.record["pair_gap"] = optional_number(cf.pair_gap);

  const TwoModeParams tm = two_mode_params(c.zeta, c.zeta_m);
  o.record["pair_center"] = tm.omega;
  o.record["g_m"] = tm.g_m;
  o.record["two_mode_gap"] = tm.delta > tm.kappa
                                 ? Json(2.0 * std::sqrt(tm.delta * tm.delta - tm.kappa * tm.kappa))
                                 : Json(nullptr);

  const Bracket w = pair_window(c.zeta);
  const auto maxima = locate_maxima(membrane_system(c), w.lo, w.hi, search_options(c));
  o.record["numeric_peak_count"] = maxima.size();
  o.record["numeric_pair_gap"] =
      maxima.size() == 2 ? Json(maxima[1].k - maxima[0].k) : Json(nullptr);

  o.record["g2_base"] = quadratic_coupling_base(c.zeta_m, tm.omega);
  if (cf.pair_gap && tm.delta > tm.kappa && c.zeta_m != 0.0 &&
      std::abs(c.zeta_m) < std::abs(cf.zeta_m_star)) {
    const SensitivityReport s = readout_sensitivity(c.zeta, c.zeta_m, tm.omega, c.amplitude);
    o.record["g2"] = s.g2;
    o.record["enhancement"] = s.enhancement;
    o.record["x_small_bound"] = s.x_small_bound;
  } else {
    o.record["g2"] = nullptr;
    o.record["enhancement"] = nullptr;
    o.record["x_small_bound"] = nullptr;
  }
  return o;
}

Output dispatch(const RunConfig& c, Json params) {
  const std::string& s = c.subcommand;
  if (s == "spectrum") return cmd_spectrum(c, std::move(params));
  if (s == "peaks") return cmd_peaks(c, std::move(params));
  if (s == "splitting") return cmd_splitting(c, std::move(params));
  if (s == "threshold") return cmd_threshold(c, std::move(params));
  if (s == "sweep-x") return cmd_sweep_x(c, std::move(params));
  if (s == "branches") return cmd_branches(c, std::move(params));
  if (s == "sensitivity") return cmd_sensitivity(c, std::move(params));
  if (s == "stack") return cmd_stack(c, std::move(params));
  if (s == "figures") return cmd_figures(c, std::move(params));
  return cmd_report(c, std::move(params));
}

void report_error(std::ostream& err, std::string_view token, const std::string& message) {
  std::string line = message;
  std::replace(line.begin(), line.end(), '\n', ' ');
  err << "coalesce-error: " << token << ": " << line << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transmission spectra and mode coalescence in a membrane-in-the-middle cavity",
               "coalesce"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::map<std::string, std::string> flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> flag_options;
  std::string config_path;
  std::string figure;
  std::map<std::string, CLI::App*> subs;

  for (const Command& cmd : kCommands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    subs[cmd.name] = sub;
    sub->add_option("--config", config_path, "file of 'key = value' lines");
    for (const std::string& key : config_keys()) {
      CLI::Option* opt = sub->add_option(flag_names(key), flag_values[key], flag_help().at(key));
      flag_options.emplace_back(key, opt);
    }
    if (std::string_view(cmd.name) == "figures") {
      sub->add_option("figure", figure, "fig1, fig2, fig3 or threshold-sweep")
          ->required()
          ->check(CLI::IsMember({"fig1", "fig2", "fig3", "threshold-sweep"}));
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "parse_error", e.what());
    return kExitParse;
  }

  RunConfig cfg;
  Format format = Format::csv;
  try {
    cfg = default_config();
    if (!config_path.empty()) {
      for (const std::string& w : apply_entries(cfg, read_config_file(config_path))) {
        err << "coalesce-warning: unknown_key: " << w << '\n';
      }
    }
    for (const auto& [key, opt] : flag_options) {
      if (opt->count() > 0) apply_setting(cfg, key, flag_values[key]);
    }
  } catch (const ParseError& e) {
    report_error(err, e.token(), e.what());
    return kExitParse;
  }
  for (const Command& cmd : kCommands) {
    if (subs[cmd.name]->parsed()) {
      cfg.subcommand = cmd.name;
      format = cfg.format.value_or(cmd.default_format);
    }
  }
  cfg.figure = figure;

  std::string text;
  try {
    const Output o = dispatch(cfg, config_params(cfg, format));
    std::ostringstream buf;
    if (format == Format::csv) {
      write_csv(buf, o);
    } else {
      write_json(buf, o);
    }
    text = buf.str();
  } catch (const Error& e) {
    report_error(err, e.token(), e.what());
    return kExitDomain;
  }

  try {
    if (cfg.output_path.empty()) {
      out << text;
      out.flush();
    } else {
      write_atomically(cfg.output_path, text);
    }
  } catch (const std::exception& e) {
    report_error(err, "io_error", e.what());
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace coalesce::cli
