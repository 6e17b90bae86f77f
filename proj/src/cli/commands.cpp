#include "otoc/cli/commands.hpp"

#include <cmath>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "otoc/parallel.hpp"

namespace otoc::cli {

using nlohmann::ordered_json;

namespace {

OtocScanSpec otoc_spec(const RunConfig& cfg, AverageKind kind, double beta) {
  OtocScanSpec spec;
  spec.model = cfg.model;
  spec.base = cfg.model_params();
  spec.kind = kind;
  spec.time = cfg.time_grid();
  spec.beta = beta;
  spec.normalize = cfg.normalize;
  spec.use_parity = cfg.parity;
  return spec;
}

// (kind, beta) pairs: thermal kinds expand over the beta list.
std::vector<std::pair<AverageKind, double>> curves(const RunConfig& cfg) {
  std::vector<std::pair<AverageKind, double>> out;
  for (AverageKind k : cfg.kind) {
    if (k == AverageKind::otoc_thermal) {
      for (double b : cfg.betas) out.emplace_back(k, b);
    } else {
      out.emplace_back(k, 0.0);
    }
  }
  return out;
}

std::string curve_tag(AverageKind kind, double beta) {
  std::string tag = to_string(kind);
  if (kind == AverageKind::otoc_thermal) tag += "_beta" + format_double(beta);
  return tag;
}

std::string raw_unit(AverageKind kind) { return kind == AverageKind::tpc_inf ? "quanta^2" : "quanta^4"; }

void note_model(Table& t, const ModelParams& p, ModelKind model) {
  t.note("model", std::string(to_string(model)));
  t.note("eta", format_double(p.eta()));
  t.note("atoms", std::to_string(p.spin.atoms()));
  t.note("gamma", format_double(p.gamma()));
  t.note("cutoff", std::to_string(p.cutoff.n()));
  t.note("g_c", format_double(p.g_c()));
}

ResultEnvelope envelope(const RunConfig& cfg) {
  ResultEnvelope env;
  env.config = cfg;
  env.produced_at = timestamp_now();
  return env;
}

ordered_json fit_json(const PowerLawFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", f.points}};
}

}  // namespace

ResultEnvelope cmd_trace(const RunConfig& cfg) {
  ResultEnvelope env = envelope(cfg);
  const unsigned threads = cfg.worker_count();
  for (const auto& [kind, beta] : curves(cfg)) {
    const OtocScanSpec spec = otoc_spec(cfg, kind, beta);
    bool degenerate = false;
    const TimeSeries series = correlator_series(spec, cfg.ratio, EvalOptions{threads}, &degenerate);

    Table t;
    t.name = "trace_" + curve_tag(kind, beta);
    note_model(t, spec.base, cfg.model);
    t.note("kind", to_string(kind));
    if (kind == AverageKind::otoc_thermal) t.note("beta", format_double(beta));
    t.note("ratio", format_double(cfg.ratio));
    t.note("normalization", format_double(series.normalization));
    if (kind == AverageKind::otoc_equilibrium) t.note("ground_degenerate", degenerate ? "true" : "false");
    t.note("time_average", format_double(time_average(series)));
    const std::string unit = series.normalized ? "1" : raw_unit(kind);
    auto& tc = t.add("t", "1/omega0");
    auto& re = t.add("value_real", unit);
    auto& im = t.add("value_imag", unit);
    auto& flag = t.add("normalized", "flag");
    for (std::size_t i = 0; i < series.values.size(); ++i) {
      tc.values.push_back(series.grid.at(i));
      re.values.push_back(series.values[i].real());
      im.values.push_back(series.values[i].imag());
      flag.values.push_back(series.normalized ? 1.0 : 0.0);
    }
    env.tables.push_back(std::move(t));

    if (cfg.lyapunov) {
      const ExpFit fit = fit_exponential_decay(series, {cfg.fit_window[0], cfg.fit_window[1]});
      env.summaries.emplace_back("lyapunov_" + curve_tag(kind, beta),
                                 ordered_json{{"kind", to_string(kind)},
                                              {"ratio", cfg.ratio},
                                              {"lambda_l", fit.lambda_l},
                                              {"intercept", fit.intercept},
                                              {"window", {fit.window.first, fit.window.second}},
                                              {"r_squared", fit.r_squared},
                                              {"samples", fit.samples}});
    }
  }
  return env;
}

ResultEnvelope cmd_scan(const RunConfig& cfg) {
  ResultEnvelope env = envelope(cfg);
  const auto grid = CouplingGrid::range(cfg.ratio_lo, cfg.ratio_hi, cfg.ratio_step);
  const unsigned threads = cfg.worker_count();
  ordered_json minima = ordered_json::array();
  for (const auto& [kind, beta] : curves(cfg)) {
    const OtocScanSpec spec = otoc_spec(cfg, kind, beta);
    const ScanResult scan = scan_otoc(spec, grid, threads);
    const auto m = locate_extremum(grid.ratios(), scan.values, ExtremumKind::min, {grid.front(), grid.back()},
                                   cfg.refine);
    Table t;
    t.name = "scan_" + curve_tag(kind, beta);
    note_model(t, spec.base, cfg.model);
    t.note("kind", to_string(kind));
    t.note("state", scan.meta.state);
    t.note("t_f", format_double(scan.meta.t_f));
    t.note("dt", format_double(scan.meta.dt));
    t.note("ratio_min", format_double(m.ratio_m));
    t.note("min_on_boundary", m.on_boundary ? "true" : "false");
    t.add("ratio", "g/g_c").values = grid.ratios();
    t.add("value", cfg.normalize ? "1" : raw_unit(kind)).values = scan.values;
    if (kind == AverageKind::otoc_equilibrium) {
      auto& d = t.add("ground_degenerate", "flag");
      for (bool b : scan.degenerate) d.values.push_back(b ? 1.0 : 0.0);
    }
    if (cfg.timing) t.add("seconds", "s").values = scan.seconds;
    env.tables.push_back(std::move(t));
    minima.push_back({{"kind", to_string(kind)},
                      {"state", scan.meta.state},
                      {"ratio_min", m.ratio_m},
                      {"value_min", m.value_at_m},
                      {"refined", m.refined},
                      {"on_boundary", m.on_boundary}});
  }
  env.summaries.emplace_back("scan_minima", ordered_json{{"minima", minima}});
  return env;
}

ResultEnvelope cmd_scaling(const RunConfig& cfg, ResultEnvelope* partial) {
  ResultEnvelope env = envelope(cfg);
  const unsigned threads = cfg.worker_count();
  const bool rabi = cfg.model == ModelKind::rabi;
  const AverageKind kind = cfg.kind.front();
  const double beta = cfg.betas.empty() ? 0.0 : cfg.betas.front();

  struct Member {
    int atoms;
    double eta;
    double gamma;
  };
  std::vector<Member> members;
  if (rabi) {
    for (double eta : cfg.etas) members.push_back({1, eta, eta});
  } else {
    for (int n : cfg.atoms_list)
      for (double gamma : cfg.gammas) members.push_back({n, gamma / n, gamma});
  }

  Table t;
  t.name = "scaling_minima";
  t.note("model", std::string(to_string(cfg.model)));
  t.note("kind", to_string(kind));
  t.note("mode", cfg.synthetic_slope != 0.0 ? "synthetic" : "computed");
  auto& c_eta = t.add("eta", "1");
  auto& c_atoms = t.add("atoms", "1");
  auto& c_gamma = t.add("gamma", "1");
  auto& c_ratio = t.add("ratio_m", "g/g_c");
  auto& c_value = t.add("value_at_m", cfg.normalize ? "1" : raw_unit(kind));
  auto& c_boundary = t.add("on_boundary", "flag");
  auto& c_evals = t.add("evaluations", "1");

  std::vector<std::pair<double, double>> points;
  std::string unresolved;
  for (const Member& m : members) {
    ExtremumLocation loc;
    std::size_t evaluations = 0;
    const double x = rabi ? m.eta : m.gamma;
    if (cfg.synthetic_slope != 0.0) {
      loc.ratio_m = 1.0 + std::exp2(cfg.synthetic_intercept) * std::pow(x, -cfg.synthetic_slope);
    } else {
      OtocScanSpec spec = otoc_spec(cfg, kind, beta);
      spec.base.Omega = m.eta * cfg.omega0;
      spec.base.spin = SpinLength(m.atoms);
      const auto res = search_minimum(
          [&](double r) { return averaged_correlator(spec, r).value; }, cfg.minimum_search(), threads);
      loc = res.location;
      evaluations = res.ratios.size();
    }
    c_eta.values.push_back(m.eta);
    c_atoms.values.push_back(m.atoms);
    c_gamma.values.push_back(m.gamma);
    c_ratio.values.push_back(loc.ratio_m);
    c_value.values.push_back(loc.value_at_m);
    c_boundary.values.push_back(loc.on_boundary ? 1.0 : 0.0);
    c_evals.values.push_back(static_cast<double>(evaluations));
    points.emplace_back(x, loc.ratio_m);
    if (loc.on_boundary && unresolved.empty()) {
      unresolved = "minimum on the search boundary for member eta=" + format_double(m.eta) +
                   " atoms=" + std::to_string(m.atoms) + " (ratio_m=" + format_double(loc.ratio_m) + ")";
    }
  }
  env.tables.push_back(std::move(t));
  if (!unresolved.empty()) {
    if (partial) *partial = env;
    throw UnresolvedExtremum(unresolved);
  }

  const PowerLawFit fit = rabi ? fit_scaling_eta(points) : fit_scaling_gamma(points);
  ordered_json body = fit_json(fit);
  body["variable"] = rabi ? "eta" : "gamma";
  body["exponent"] = -fit.slope;
  ordered_json list = ordered_json::array();
  for (std::size_t i = 0; i < members.size(); ++i) {
    list.push_back({{"eta", members[i].eta},
                    {"atoms", members[i].atoms},
                    {"gamma", members[i].gamma},
                    {"ratio_m", points[i].second}});
  }
  body["members"] = list;
  env.summaries.emplace_back("scaling_fit", body);
  return env;
}

ResultEnvelope cmd_order_param(const RunConfig& cfg) {
  ResultEnvelope env = envelope(cfg);
  const auto grid = CouplingGrid::range(cfg.ratio_lo, cfg.ratio_hi, cfg.ratio_step);
  const unsigned threads = cfg.worker_count();
  std::vector<std::optional<double>> states;
  if (cfg.ground) states.emplace_back();
  for (double b : cfg.betas) states.emplace_back(b);

  const std::string unit = cfg.rescale ? "quanta/n" : "quanta";
  Table scan_t, chi_t, max_t;
  scan_t.name = "order_param";
  chi_t.name = "susceptibility";
  max_t.name = "susceptibility_maxima";
  for (Table* t : {&scan_t, &chi_t, &max_t}) {
    t->note("model", std::string(to_string(cfg.model)));
    t->note("atoms", std::to_string(cfg.model == ModelKind::rabi ? 1 : cfg.atoms));
    t->note("cutoff", std::to_string(cfg.cutoff));
    t->note("ground_state_beta", "inf");
    t->add("eta", "1");
    t->add("beta", "1/omega0");
  }
  scan_t.add("ratio", "g/g_c");
  scan_t.add("value", unit);
  chi_t.add("ratio", "g/g_c");
  chi_t.add("value", unit + "/omega0");
  max_t.add("temperature", "omega0");
  max_t.add("ratio_max", "g/g_c");
  max_t.add("value_max", unit + "/omega0");
  max_t.add("on_boundary", "flag");

  for (double eta : cfg.etas) {
    for (const auto& beta : states) {
      OrderScanSpec spec;
      spec.model = cfg.model;
      spec.base = cfg.model_params();
      spec.base.Omega = eta * cfg.omega0;
      spec.beta = beta;
      spec.rescale_by_cutoff = cfg.rescale;
      spec.use_parity = cfg.parity;
      const ScanResult scan = scan_order_parameter(spec, grid, threads);
      const SusceptibilityCurve chi = susceptibility(scan);
      const auto m = locate_extremum(chi.grid.ratios(), chi.values, ExtremumKind::max,
                                     {chi.grid.front(), chi.grid.back()}, cfg.refine);
      const double b = beta ? *beta : INFINITY;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        scan_t.columns[0].values.push_back(eta);
        scan_t.columns[1].values.push_back(b);
        scan_t.columns[2].values.push_back(grid.ratios()[i]);
        scan_t.columns[3].values.push_back(scan.values[i]);
      }
      for (std::size_t i = 0; i < chi.values.size(); ++i) {
        chi_t.columns[0].values.push_back(eta);
        chi_t.columns[1].values.push_back(b);
        chi_t.columns[2].values.push_back(chi.grid.ratios()[i]);
        chi_t.columns[3].values.push_back(chi.values[i]);
      }
      max_t.columns[0].values.push_back(eta);
      max_t.columns[1].values.push_back(b);
      max_t.columns[2].values.push_back(beta ? (*beta > 0 ? 1.0 / *beta : INFINITY) : 0.0);
      max_t.columns[3].values.push_back(m.ratio_m);
      max_t.columns[4].values.push_back(m.value_at_m);
      max_t.columns[5].values.push_back(m.on_boundary ? 1.0 : 0.0);
    }
  }
  env.tables = {std::move(scan_t), std::move(chi_t), std::move(max_t)};
  return env;
}

ResultEnvelope cmd_size_fit(const RunConfig& cfg) {
  ResultEnvelope env = envelope(cfg);
  const unsigned threads = cfg.worker_count();
  const AverageKind kind = cfg.kind.front();
  const double beta = cfg.betas.empty() ? 0.0 : cfg.betas.front();
  const std::size_t nn = cfg.atoms_list.size();
  std::vector<double> values(cfg.ratios.size() * nn);
  parallel_for(values.size(), threads, [&](std::size_t k) {
    OtocScanSpec spec = otoc_spec(cfg, kind, beta);
    spec.base.spin = SpinLength(cfg.atoms_list[k % nn]);
    values[k] = averaged_correlator(spec, cfg.ratios[k / nn]).value;
  });

  Table v, f;
  v.name = "size_values";
  f.name = "size_fit";
  for (Table* t : {&v, &f}) {
    t->note("model", "dicke");
    t->note("kind", to_string(kind));
    t->note("eta", format_double(cfg.eta));
    t->note("cutoff", std::to_string(cfg.cutoff));
    t->note("law", "1 - F = a N^-b + c");
    t->add("ratio", "g/g_c");
  }
  v.add("atoms", "1");
  v.add("value", "1");
  v.add("one_minus_value", "1");
  for (const char* c : {"a", "b", "c", "residual", "limit_value"}) f.add(c, "1");
  for (std::size_t r = 0; r < cfg.ratios.size(); ++r) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = 0; j < nn; ++j) {
      const double value = values[r * nn + j];
      pts.emplace_back(cfg.atoms_list[j], 1.0 - value);
      v.columns[0].values.push_back(cfg.ratios[r]);
      v.columns[1].values.push_back(cfg.atoms_list[j]);
      v.columns[2].values.push_back(value);
      v.columns[3].values.push_back(1.0 - value);
    }
    const SizeFit fit = fit_size_law(pts);
    f.columns[0].values.push_back(cfg.ratios[r]);
    f.columns[1].values.push_back(fit.a);
    f.columns[2].values.push_back(fit.b);
    f.columns[3].values.push_back(fit.c);
    f.columns[4].values.push_back(fit.residual);
    f.columns[5].values.push_back(1.0 - fit.c);
  }
  env.tables = {std::move(v), std::move(f)};
  return env;
}

ResultEnvelope cmd_cutoff_study(const RunConfig& cfg) {
  ResultEnvelope env = envelope(cfg);
  OtocScanSpec spec = otoc_spec(cfg, AverageKind::otoc_inf, 0.0);
  const CutoffStudy study = cutoff_study(spec, cfg.ratio, cfg.probes, cfg.cutoffs, cfg.worker_count());
  Table raw, fits;
  raw.name = "cutoff_raw";
  fits.name = "cutoff_fit";
  for (Table* t : {&raw, &fits}) {
    t->note("model", std::string(to_string(cfg.model)));
    t->note("eta", format_double(cfg.eta));
    t->note("ratio", format_double(cfg.ratio));
    t->add("t", "1/omega0");
  }
  raw.add("cutoff", "1");
  raw.add("raw_value", "quanta^4");
  fits.add("slope", "1");
  fits.add("intercept", "1");
  fits.add("r_squared", "1");
  fits.note("fit", "log F = slope log n + intercept (natural log)");
  ordered_json list = ordered_json::array();
  for (std::size_t p = 0; p < study.probes.size(); ++p) {
    for (const auto& row : study.rows) {
      raw.columns[0].values.push_back(study.probes[p]);
      raw.columns[1].values.push_back(row.cutoff);
      raw.columns[2].values.push_back(row.raw[p]);
    }
    fits.columns[0].values.push_back(study.probes[p]);
    fits.columns[1].values.push_back(study.fits[p].slope);
    fits.columns[2].values.push_back(study.fits[p].intercept);
    fits.columns[3].values.push_back(study.fits[p].r_squared);
    ordered_json j = fit_json(study.fits[p]);
    j["t"] = study.probes[p];
    list.push_back(j);
  }
  env.tables = {std::move(raw), std::move(fits)};
  env.summaries.emplace_back("cutoff_fit", ordered_json{{"fits", list}});
  return env;
}

ResultEnvelope dispatch(const RunConfig& cfg, ResultEnvelope* partial) {
  switch (cfg.command) {
    case Command::trace: return cmd_trace(cfg);
    case Command::scan: return cmd_scan(cfg);
    case Command::scaling: return cmd_scaling(cfg, partial);
    case Command::order_param: return cmd_order_param(cfg);
    case Command::size_fit: return cmd_size_fit(cfg);
    case Command::cutoff_study: return cmd_cutoff_study(cfg);
  }
  throw ConfigError("command", "unhandled command");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-averaged OTOC studies of the Rabi and Dicke models", "otoc-criticality"};
  std::string command, config_path;
  app.add_option("command", command, "trace | scan | scaling | order-param | size-fit | cutoff-study")->required();
  app.add_option("--config", config_path, "flat key = value file");
  std::map<std::string, std::string> flags;
  for (const auto& key : config_keys()) {
    if (key == "command") continue;
    app.add_option("--" + key, flags[key], "override '" + key + "' (default " + get_value(RunConfig{}, key) + ")");
  }

  RunConfig cfg;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "otoc-criticality: " << e.what() << "\n";
    return exit_config;
  }

  try {
    if (!config_path.empty()) cfg = load_config_file(config_path);
    cfg.command = parse_command(command);
    for (const auto& key : config_keys()) {
      if (key != "command" && app.count("--" + key) > 0) set_value(cfg, key, flags[key]);
    }
    validate(cfg);
  } catch (const Error& e) {
    err << "otoc-criticality: " << e.what() << "\n";
    return exit_config;
  }

  ResultEnvelope partial;
  partial.config = cfg;
  try {
    const ResultEnvelope env = dispatch(cfg, &partial);
    for (const auto& path : write_envelope(env)) out << path.string() << "\n";
    return exit_ok;
  } catch (const UnresolvedExtremum& e) {
    write_envelope(partial);
    err << "otoc-criticality: " << e.what() << "\n";
    return exit_unresolved;
  } catch (const ConfigError& e) {
    err << "otoc-criticality: " << e.what() << "\n";
    return exit_config;
  } catch (const ParameterError& e) {
    err << "otoc-criticality: " << e.what() << "\n";
    return exit_config;
  } catch (const Error& e) {
    err << "otoc-criticality: " << e.what() << "\n";
    return exit_numerical;
  }
}

}  // namespace otoc::cli
