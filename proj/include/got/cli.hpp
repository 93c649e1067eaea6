#pragma once

// Command-line front end. Subcommands:
//   wd | gwd | got   --x PATH --y PATH [--format csv|json] [solver flags]
//   sweep            synthetic pair, one fused solve per --lambdas entry, CSV to stdout
//   demo             synthetic pair, one fused solve, plan metrics
// Prints `distance=<value>` (9 significant digits). Exit codes: 0 success,
// 1 input or usage error, 2 solver conditioning error.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "got/core.hpp"
#include "got/error.hpp"
#include "got/fused.hpp"
#include "got/gromov.hpp"
#include "got/harness.hpp"
#include "got/io.hpp"
#include "got/sinkhorn.hpp"

namespace got::cli {

enum ExitCode : int { kSuccess = 0, kInputError = 1, kConditioningError = 2 };

inline std::string distance_line(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "distance=%.9g", d);
  return buf;
}

namespace detail {

struct Options {
  std::string x_path, y_path, format;
  std::string mode = "shared";
  std::string plan_out, svg_out;
  bool raw_graphs = false;
  SolverConfig config;
  std::vector<double> lambdas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::uint64_t seed = 7;
  std::size_t n = 8;
  std::size_t d = 16;
  double noise = 0.05;
};

inline void add_solver_flags(CLI::App* sub, Options& o) {
  sub->add_option("--beta", o.config.beta, "proximal step weight (> 0)")->capture_default_str();
  sub->add_option("--inner-iters", o.config.inner_iters, "scaling sweeps per proximal step")
      ->capture_default_str();
  sub->add_option("--outer-iters", o.config.outer_iters, "iteration cap of each solver loop")
      ->capture_default_str();
  sub->add_option("--plan-out", o.plan_out, "write the transport plan as JSON");
  sub->add_option("--svg-out", o.svg_out, "write a heatmap of the plan as SVG");
}

inline void add_graph_flags(CLI::App* sub, Options& o) {
  sub->add_option("--tau", o.config.tau, "graph threshold (>= 0)")->capture_default_str();
  sub->add_flag("--raw-graphs", o.raw_graphs, "use unthresholded cosine similarities");
}

inline void add_fused_flags(CLI::App* sub, Options& o) {
  sub->add_option("--lambda", o.config.lambda, "weight of the node term, in [0, 1]")
      ->capture_default_str();
  sub->add_option("--mode", o.mode, "shared or unshared transport plan")
      ->check(CLI::IsMember({"shared", "unshared"}))
      ->capture_default_str();
}

inline void add_input_flags(CLI::App* sub, Options& o) {
  sub->add_option("--x", o.x_path, "embeddings of the first domain")->required();
  sub->add_option("--y", o.y_path, "embeddings of the second domain")->required();
  sub->add_option("--format", o.format, "csv or json (default: from file extension)")
      ->check(CLI::IsMember({"csv", "json"}));
}

inline void add_synthetic_flags(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "RNG seed of the synthetic pair")->capture_default_str();
  sub->add_option("--n", o.n, "entities per domain")->capture_default_str();
  sub->add_option("--d", o.d, "embedding dimension")->capture_default_str();
  sub->add_option("--noise", o.noise, "noise standard deviation")->capture_default_str();
}

inline io::LabeledEmbeddings load(const std::string& path, const std::string& format) {
  const auto f = format.empty() ? io::format_from_path(path) : *io::parse_format(format);
  return io::load_embeddings(path, f);
}

inline std::vector<std::string> numbered_labels(const char* prefix, std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return labels;
}

inline void emit_plan(const Options& o, const io::PlanFile& file) {
  if (!o.plan_out.empty()) io::write_plan_file(file, o.plan_out);
  if (!o.svg_out.empty()) io::render_heatmap(file, o.svg_out);
}

}  // namespace detail

inline int run_command(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err) {
  detail::Options o;
  CLI::App app{"Graph optimal transport distances between embedding sets", "got"};
  app.require_subcommand(1);

  auto* wd = app.add_subcommand("wd", "Wasserstein distance on the cosine cost");
  detail::add_input_flags(wd, o);
  detail::add_solver_flags(wd, o);

  auto* gwd = app.add_subcommand("gwd", "Gromov-Wasserstein distance between similarity graphs");
  detail::add_input_flags(gwd, o);
  detail::add_solver_flags(gwd, o);
  detail::add_graph_flags(gwd, o);

  auto* gotc = app.add_subcommand("got", "Fused node and structure distance");
  detail::add_input_flags(gotc, o);
  detail::add_solver_flags(gotc, o);
  detail::add_graph_flags(gotc, o);
  detail::add_fused_flags(gotc, o);

  auto* sweep = app.add_subcommand("sweep", "lambda sweep on a synthetic pair (CSV to stdout)");
  sweep->add_option("--lambdas", o.lambdas, "comma-separated lambda values")->delimiter(',');
  detail::add_synthetic_flags(sweep, o);
  detail::add_graph_flags(sweep, o);
  sweep->add_option("--beta", o.config.beta, "proximal step weight (> 0)");
  sweep->add_option("--inner-iters", o.config.inner_iters, "scaling sweeps per proximal step");
  sweep->add_option("--outer-iters", o.config.outer_iters, "iteration cap of each solver loop");
  sweep->add_option("--mode", o.mode, "shared or unshared transport plan")
      ->check(CLI::IsMember({"shared", "unshared"}));

  auto* demo = app.add_subcommand("demo", "fused solve on a synthetic pair with known matching");
  detail::add_synthetic_flags(demo, o);
  detail::add_solver_flags(demo, o);
  detail::add_graph_flags(demo, o);
  detail::add_fused_flags(demo, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kInputError;
  }

  o.config.mode = o.mode == "shared" ? SolveMode::shared : SolveMode::unshared;
  o.config.threshold_graphs = !o.raw_graphs;

  try {
    o.config.validate();
    if (wd->parsed() || gwd->parsed() || gotc->parsed()) {
      const auto x = detail::load(o.x_path, o.format);
      const auto y = detail::load(o.y_path, o.format);
      const auto p = uniform_marginal(x.set.count());
      const auto q = uniform_marginal(y.set.count());

      if (wd->parsed()) {
        const WdResult r = solve_wd(cosine_cost_matrix(x.set, y.set), p, q, o.config);
        if (r.clamped) err << "warning: scaling denominators hit the underflow floor\n";
        out << distance_line(r.distance) << '\n';
        detail::emit_plan(o, io::make_plan_file("wd", o.config, r.distance, x.labels, y.labels,
                                                r.plan));
      } else if (gwd->parsed()) {
        const GwdResult r = solve_gwd(domain_graph(x.set, o.config),
                                      domain_graph(y.set, o.config), p, q, o.config);
        out << distance_line(r.distance) << '\n';
        detail::emit_plan(o, io::make_plan_file("gwd", o.config, r.distance, x.labels, y.labels,
                                                r.plan));
      } else {
        const GotResult r = solve_got(x.set, y.set, ProjectionPair::identity(), o.config);
        out << distance_line(r.distance) << '\n';
        auto file = io::make_plan_file("got", o.config, r.distance, x.labels, y.labels, r.plan);
        if (r.plan_gwd) file.entries_gwd = r.plan_gwd->entries();
        detail::emit_plan(o, file);
      }
    } else if (sweep->parsed()) {
      const auto pair = harness::generate_pair(o.n, o.d, o.noise, o.seed);
      harness::write_sweep_csv(out, harness::run_sweep(o.lambdas, o.config, pair));
    } else if (demo->parsed()) {
      const auto pair = harness::generate_pair(o.n, o.d, o.noise, o.seed);
      const GotResult r = solve_got(pair.x, pair.y, pair.aligning_projection(), o.config);
      const auto m = harness::evaluate_plan(r.plan, pair.correspondence);
      out << distance_line(r.distance) << '\n'
          << "accuracy=" << harness::format_number(m.row_argmax_accuracy) << '\n'
          << "nonzeros=" << m.nonzeros_above_eps << '\n'
          << "entropy=" << harness::format_number(m.entropy) << '\n'
          << "marginal_violation=" << harness::format_number(m.marginal_violation) << '\n';
      detail::emit_plan(o, io::make_plan_file("got", o.config, r.distance,
                                              detail::numbered_labels("x", o.n),
                                              detail::numbered_labels("y", o.n), r.plan));
    }
  } catch (const ConditioningError& e) {
    err << "error: " << e.what() << '\n';
    return kConditioningError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kSuccess;
}

}  // namespace got::cli
