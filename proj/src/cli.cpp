#include "factorgroup/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "factorgroup/ospe.hpp"
#include "factorgroup/panel_io.hpp"
#include "factorgroup/refit.hpp"
#include "factorgroup/report.hpp"
#include "factorgroup/version.hpp"

namespace factorgroup {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  int threads = 1;
  std::uint64_t seed = 1;
  int k_bar = 0;
  int folds = 20;
  int cv_mode = 2;
  bool paper_grid = false;
  std::string format = "csv";
};

struct ModelArgs {
  std::string r = "auto";
  std::string lambda = "cv";
};

int parse_r(const std::string& text) {
  if (text == "auto") return 0;
  int value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || value < 1) {
    throw UsageError("--r expects 'auto' or a positive integer, got '" + text + "'");
  }
  return value;
}

std::optional<double> parse_lambda(const std::string& text) {
  if (text == "cv") return std::nullopt;
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !(value >= 0.0) || !std::isfinite(value)) {
    throw UsageError("--lambda expects 'cv' or a nonnegative number, got '" + text + "'");
  }
  return value;
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size()) {
      throw UsageError(flag + " expects a comma-separated list of numbers, got '" + text + "'");
    }
    values.push_back(value);
  }
  return values;
}

PipelineOptions pipeline_options(const Globals& g, const ModelArgs& m, int threads) {
  PipelineOptions options;
  options.r = parse_r(m.r);
  options.lambda = parse_lambda(m.lambda);
  options.cv_mode = g.cv_mode == 1 ? CvMode::CV1 : CvMode::CV2;
  options.folds = g.folds;
  options.paper_grid = g.paper_grid;
  options.k_bar = g.k_bar;
  options.threads = threads;
  return options;
}

OutputFormat output_format(const Globals& g) {
  return g.format == "md" ? OutputFormat::Markdown : OutputFormat::CSV;
}

std::string describe(const Globals& g, const ModelArgs& m) {
  std::ostringstream s;
  s << "r=" << m.r << ";lambda=" << m.lambda << ";k_bar=" << g.k_bar << ";folds=" << g.folds
    << ";cv_mode=" << g.cv_mode << ";paper_grid=" << g.paper_grid << ";format=" << g.format;
  return s.str();
}

template <typename Fn>
void with_output(const std::string& path, std::ostream& out, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  fn(file);
  file.flush();
  if (!file) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

struct GridPoint {
  Scenario scenario;
  Index t;
  Index n;
  double kappa;
};

std::vector<GridPoint> design_grid_points() {
  std::vector<GridPoint> points;
  const double kappas[] = {0.5, 0.8, 1.0};
  for (Index t : {200, 150, 100})
    for (Index n : {150, 120, 90})
      for (double k : kappas) points.push_back({Scenario::S1, t, n, k});
  for (Index t : {150, 100})
    for (Index n : {200, 160, 120})
      for (double k : kappas) points.push_back({Scenario::S2, t, n, k});
  return points;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Penalized PCA for factor models with latent groups", "factorgroup"};
  app.set_version_flag("--version", std::string("factorgroup ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  if (const char* env = std::getenv("FACTOR_GROUP_THREADS"); env != nullptr && *env != '\0') {
    int value = 0;
    const std::string text(env);
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || value < 1) {
      err << "error: FACTOR_GROUP_THREADS must be a positive integer, got '" << text << "'\n";
      return 1;
    }
    g.threads = value;
  }
  app.add_option("--threads", g.threads, "worker threads (default: $FACTOR_GROUP_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "base RNG seed")->capture_default_str();
  app.add_option("--k-bar", g.k_bar, "largest group count considered (0: min(15, N))")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--folds", g.folds, "cross-validation folds")->check(CLI::Range(2, 1000000))->capture_default_str();
  app.add_option("--cv-mode", g.cv_mode, "cross-validation criterion")->check(CLI::IsMember({1, 2}))->capture_default_str();
  app.add_flag("--paper-grid", g.paper_grid, "use the lambda grid {1/b, b = 0.05..1} U {N} without lambda = 0");
  app.add_option("--format", g.format, "table format")->check(CLI::IsMember({"csv", "md"}))->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo replications for one configuration");
  std::string sim_scenario = "s1";
  Index sim_t = 100, sim_n = 90;
  double sim_kappa = 0.5;
  int sim_reps = 10;
  std::string sim_output = "-";
  ModelArgs sim_model;
  sim->add_option("--scenario", sim_scenario)->check(CLI::IsMember({"s1", "s2"}))->capture_default_str();
  sim->add_option("--t", sim_t)->check(CLI::Range(Index{2}, Index{1000000}))->capture_default_str();
  sim->add_option("--n", sim_n)->check(CLI::Range(Index{2}, Index{1000000}))->capture_default_str();
  sim->add_option("--kappa", sim_kappa)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--reps", sim_reps)->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--output", sim_output, "summary path ('-' for stdout)")->capture_default_str();
  sim->add_option("--r", sim_model.r, "factor count or 'auto'")->capture_default_str();
  sim->add_option("--lambda", sim_model.lambda, "penalty or 'cv'")->capture_default_str();

  // grid
  auto* grid = app.add_subcommand("grid", "replications over the full (T, N, kappa) table grid");
  std::string grid_scenario = "all";
  int grid_reps = 50;
  std::string grid_output = "-";
  std::string t_values, n_values, kappa_values;
  ModelArgs grid_model;
  grid->add_option("--scenario", grid_scenario)->check(CLI::IsMember({"s1", "s2", "all"}))->capture_default_str();
  grid->add_option("--reps", grid_reps)->check(CLI::PositiveNumber)->capture_default_str();
  grid->add_option("--output", grid_output, "summary path ('-' for stdout)")->capture_default_str();
  grid->add_option("--t-values", t_values, "only these T (comma-separated)");
  grid->add_option("--n-values", n_values, "only these N (comma-separated)");
  grid->add_option("--kappa-values", kappa_values, "only these kappa (comma-separated)");
  grid->add_option("--r", grid_model.r, "factor count or 'auto'")->capture_default_str();
  grid->add_option("--lambda", grid_model.lambda, "penalty or 'cv'")->capture_default_str();

  // fit
  auto* fit = app.add_subcommand("fit", "estimate and group a CSV panel; writes loadings, scores, groups");
  std::string fit_input, fit_out_dir = ".", fit_date_column;
  bool fit_postgroup = false, fit_standardize = false;
  ModelArgs fit_model;
  fit->add_option("--input", fit_input, "panel CSV")->required();
  fit->add_option("--out-dir", fit_out_dir)->capture_default_str();
  fit->add_option("--date-column", fit_date_column, "date column name (default: first)");
  fit->add_option("--r", fit_model.r, "factor count or 'auto'")->capture_default_str();
  fit->add_option("--lambda", fit_model.lambda, "penalty or 'cv'")->capture_default_str();
  fit->add_flag("--postgroup", fit_postgroup, "write group-mean loadings and their regression scores");
  fit->add_flag("--standardize", fit_standardize, "z-score each series before fitting");

  // group
  auto* group = app.add_subcommand("group", "group-count selection report for a CSV panel");
  std::string group_input, group_output = "-", group_date_column;
  bool group_standardize = false;
  ModelArgs group_model;
  group->add_option("--input", group_input, "panel CSV")->required();
  group->add_option("--output", group_output)->capture_default_str();
  group->add_option("--date-column", group_date_column);
  group->add_option("--r", group_model.r, "factor count or 'auto'")->capture_default_str();
  group->add_option("--lambda", group_model.lambda, "penalty or 'cv'")->capture_default_str();
  group->add_flag("--standardize", group_standardize, "z-score each series before fitting");

  // ospe
  auto* ospe = app.add_subcommand("ospe", "rolling out-of-sample prediction error, PCA vs PPCA");
  std::string ospe_input, ospe_output = "-", ospe_date_column;
  std::string train_start, train_end, first_month, last_month;
  ospe->add_option("--input", ospe_input, "panel CSV")->required();
  ospe->add_option("--output", ospe_output)->capture_default_str();
  ospe->add_option("--date-column", ospe_date_column);
  ospe->add_option("--train-start", train_start, "first training date")->required();
  ospe->add_option("--train-end", train_end, "last training date")->required();
  ospe->add_option("--first-month", first_month, "first evaluation month, YYYY-MM")->required();
  ospe->add_option("--last-month", last_month, "last evaluation month, YYYY-MM")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << "factorgroup " << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    const OutputFormat format = output_format(g);
    if (sim->parsed()) {
      ScenarioConfig config;
      config.scenario = parse_scenario(sim_scenario);
      config.t = sim_t;
      config.n = sim_n;
      config.kappa = sim_kappa;
      config.seed = g.seed;
      if (sim_n % group_count(config.scenario) != 0) {
        throw Error(ErrorCode::IndivisibleGroups, "N = " + std::to_string(sim_n) + " is not a multiple of " +
                                                      std::to_string(group_count(config.scenario)));
      }
      const PipelineOptions options = pipeline_options(g, sim_model, 1);
      std::ostringstream canon;
      canon << "simulate;scenario=" << sim_scenario << ";t=" << sim_t << ";n=" << sim_n
            << ";kappa=" << format_double(sim_kappa) << ";reps=" << sim_reps << ';'
            << describe(g, sim_model);
      const RepSummary summary = run_replications(config, sim_reps, options, g.threads);
      for (const auto& failure : summary.failures) err << "warning: " << failure << '\n';
      with_output(sim_output, out, [&](std::ostream& o) {
        write_summary(o, {summary}, format, metadata_lines("simulate", g.seed, canon.str()));
      });
      return 0;
    }

    if (grid->parsed()) {
      const PipelineOptions options = pipeline_options(g, grid_model, 1);
      const auto ts = parse_list(t_values, "--t-values");
      const auto ns = parse_list(n_values, "--n-values");
      const auto ks = parse_list(kappa_values, "--kappa-values");
      auto keep = [](const std::vector<double>& filter, double v) {
        return filter.empty() || std::find(filter.begin(), filter.end(), v) != filter.end();
      };
      std::vector<RepSummary> summaries;
      for (const auto& p : design_grid_points()) {
        if (grid_scenario != "all" && to_string(p.scenario) != grid_scenario) continue;
        if (!keep(ts, static_cast<double>(p.t)) || !keep(ns, static_cast<double>(p.n)) || !keep(ks, p.kappa)) continue;
        ScenarioConfig config;
        config.scenario = p.scenario;
        config.t = p.t;
        config.n = p.n;
        config.kappa = p.kappa;
        config.seed = g.seed;
        summaries.push_back(run_replications(config, grid_reps, options, g.threads));
        for (const auto& failure : summaries.back().failures) {
          err << "warning: " << to_string(p.scenario) << " T=" << p.t << " N=" << p.n
              << " kappa=" << format_double(p.kappa) << ' ' << failure << '\n';
        }
      }
      if (summaries.empty()) throw UsageError("the grid filters select no configuration");
      std::ostringstream canon;
      canon << "grid;scenario=" << grid_scenario << ";reps=" << grid_reps << ";t=" << t_values
            << ";n=" << n_values << ";kappa=" << kappa_values << ';' << describe(g, grid_model);
      with_output(grid_output, out, [&](std::ostream& o) {
        write_summary(o, summaries, format, metadata_lines("grid", g.seed, canon.str()));
      });
      return 0;
    }

    if (fit->parsed()) {
      const PipelineOptions options = pipeline_options(g, fit_model, g.threads);
      Panel panel = load_csv_panel(fit_input, fit_date_column);
      if (fit_standardize) panel = standardize(panel).first;
      const GroupedModel model = fit_grouped_model(panel.values(), options);
      const FactorFit& chosen = fit_postgroup ? model.post : model.initial;

      std::ostringstream canon;
      canon << "fit;postgroup=" << fit_postgroup << ";standardize=" << fit_standardize << ';'
            << describe(g, fit_model);
      const auto meta = metadata_lines("fit", g.seed, canon.str());
      std::filesystem::create_directories(fit_out_dir);
      const std::filesystem::path dir(fit_out_dir);
      with_output((dir / "loadings.csv").string(), out, [&](std::ostream& o) {
        write_loadings(o, panel.series_names(), chosen.loadings, model.partition, meta);
      });
      with_output((dir / "scores.csv").string(), out, [&](std::ostream& o) {
        write_scores(o, panel.time_labels(), chosen.scores, meta);
      });
      with_output((dir / "groups.csv").string(), out, [&](std::ostream& o) {
        write_groups(o, panel.series_names(), model.partition, meta);
      });
      err << "r = " << chosen.r << ", lambda = " << format_double(model.initial.lambda)
          << ", K = " << model.selection.k_hat << '\n';
      return 0;
    }

    if (group->parsed()) {
      const PipelineOptions options = pipeline_options(g, group_model, g.threads);
      Panel panel = load_csv_panel(group_input, group_date_column);
      if (group_standardize) panel = standardize(panel).first;
      const GroupedModel model = fit_grouped_model(panel.values(), options);
      std::ostringstream canon;
      canon << "group;standardize=" << group_standardize << ';' << describe(g, group_model);
      with_output(group_output, out, [&](std::ostream& o) {
        auto meta = metadata_lines("group", g.seed, canon.str());
        meta.push_back("r: " + std::to_string(model.initial.r));
        meta.push_back("lambda: " + format_double(model.initial.lambda));
        meta.push_back("k_hat: " + std::to_string(model.selection.k_hat));
        write_group_report(o, model, format, meta);
      });
      return 0;
    }

    if (ospe->parsed()) {
      ModelArgs model_args;
      const PipelineOptions options = pipeline_options(g, model_args, g.threads);
      const Panel panel = load_csv_panel(ospe_input, ospe_date_column);
      const auto months = month_range(first_month, last_month);
      const OspeReport pca = ospe_rolling(panel, train_start, train_end, months, OspeMethod::PCA_TW, options);
      const OspeReport ppca = ospe_rolling(panel, train_start, train_end, months, OspeMethod::PPCA, options);
      std::ostringstream canon;
      canon << "ospe;train=" << train_start << ".." << train_end << ";months=" << first_month << ".."
            << last_month << ';' << describe(g, model_args);
      with_output(ospe_output, out, [&](std::ostream& o) {
        write_ospe(o, pca, ppca, format, metadata_lines("ospe", g.seed, canon.str()));
      });
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << app.help();
  return 1;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace factorgroup
