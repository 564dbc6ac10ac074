#include "hdlrt/commands.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "hdlrt/csv.hpp"
#include "hdlrt/scenario_config.hpp"
#include "hdlrt/sim.hpp"

namespace hdlrt {

namespace {

SymmetricMatrix read_sigma0(const std::string& path) {
  return SymmetricMatrix(read_csv_matrix_file(path));
}

}  // namespace

TestOutcome run_test_command(const TestCommand& cmd) {
  const TestKind kind = test_kind_from_string(cmd.kind);
  LogStatistic stat;
  switch (kind) {
    case TestKind::sphericity:
      stat = stat_sphericity(read_csv_data_file(cmd.data_path));
      break;
    case TestKind::block_independence:
      stat = stat_block_independence(read_csv_data_file(cmd.data_path), BlockPartition(cmd.blocks));
      break;
    case TestKind::equal_distributions:
    case TestKind::equal_covariances: {
      std::vector<DataMatrix> groups;
      groups.reserve(cmd.group_paths.size());
      for (const std::string& path : cmd.group_paths) groups.push_back(read_csv_data_file(path));
      GroupedSamples samples(std::move(groups));
      stat = kind == TestKind::equal_distributions ? stat_equal_distributions(samples)
                                                   : stat_equal_covariances(samples);
      break;
    }
    case TestKind::specified: {
      DataMatrix data = read_csv_data_file(cmd.data_path);
      std::vector<double> mu0 = read_csv_vector_file(cmd.mu0_path);
      stat = stat_specified(data, mu0, read_sigma0(cmd.sigma0_path));
      break;
    }
    case TestKind::complete_independence:
      stat = stat_complete_independence(read_csv_data_file(cmd.data_path));
      break;
  }
  EvaluateOptions options;
  options.force_domain = cmd.force_domain;
  return evaluate(stat, options);
}

void write_test_report(const TestOutcome& outcome, double alpha, std::ostream& out) {
  auto kv = [&](const std::string& key, const std::string& value) {
    out << key << '\t' << value << '\n';
  };
  auto kvd = [&](const std::string& key, double value) { kv(key, format_double(value)); };

  kv("kind", to_string(outcome.statistic.kind));
  kv("n", std::to_string(outcome.statistic.n));
  kv("p", std::to_string(outcome.statistic.p));
  if (!outcome.statistic.partition.empty()) {
    std::string blocks;
    for (std::size_t i = 0; i < outcome.statistic.partition.size(); ++i) {
      if (i) blocks += ",";
      blocks += std::to_string(outcome.statistic.partition[i]);
    }
    kv("blocks", blocks);
  }
  if (!outcome.statistic.group_sizes.empty()) {
    std::string sizes;
    for (std::size_t i = 0; i < outcome.statistic.group_sizes.size(); ++i) {
      if (i) sizes += ",";
      sizes += std::to_string(outcome.statistic.group_sizes[i]);
    }
    kv("group_sizes", sizes);
  }
  kvd("alpha", alpha);
  kvd("log_statistic", outcome.statistic.value);
  if (outcome.clt) {
    kvd("clt_center", outcome.clt->params.center);
    kvd("clt_scale", outcome.clt->params.scale);
    kvd("clt_z", outcome.clt->z);
    kvd("clt_p_value", outcome.clt->p_value);
    kv("clt_reject", outcome.clt->p_value <= alpha ? "1" : "0");
  }
  kvd("chisq_rho", outcome.chisq.params.rho);
  kvd("chisq_f", outcome.chisq.params.f);
  kvd("chisq_statistic", outcome.chisq.statistic);
  kvd("chisq_p_value", outcome.chisq.p_value);
  if (!std::isnan(outcome.chisq.p_value)) {
    kv("chisq_reject", outcome.chisq.p_value <= alpha ? "1" : "0");
  }
  for (const std::string& w : outcome.warnings) kv("warning", w);
}

int run_simulate_command(const std::string& config_path, int workers,
                         std::optional<std::uint64_t> seed_override, std::ostream& out,
                         std::ostream& log) {
  std::vector<Scenario> scenarios = parse_scenarios_file(config_path);
  out << report_tsv_header() << '\n';
  for (Scenario& scenario : scenarios) {
    if (seed_override) scenario.seed = *seed_override;
    const SimulationReport report = run_scenario(scenario, workers);
    out << report_tsv_row(report) << '\n';
    log << scenario.id << ": done in " << report.wall_seconds << " s\n";
  }
  return 0;
}

int run_histogram_command(const std::string& config_path, const std::string& out_prefix,
                          int workers, std::optional<std::uint64_t> seed_override,
                          std::ostream& log) {
  std::vector<Scenario> scenarios = parse_scenarios_file(config_path);
  for (Scenario& scenario : scenarios) {
    if (seed_override) scenario.seed = *seed_override;
    const StandardizedSamples samples = export_standardized_samples(scenario, workers);
    for (const auto& [suffix, values] :
         {std::pair{".clt.txt", &samples.clt}, std::pair{".chisq.txt", &samples.chisq}}) {
      const std::string path = out_prefix + scenario.id + suffix;
      std::ofstream file(path);
      if (!file) throw EmptyInput("cannot write '" + path + "'");
      for (double v : *values) file << format_double(v) << '\n';
      log << "wrote " << path << " (" << values->size() << " samples)\n";
    }
  }
  return 0;
}

std::vector<MomentQuery> default_moment_queries() {
  std::vector<MomentQuery> queries;
  auto add = [&](TestKind kind, std::vector<long> sizes, long p, std::vector<long> partition,
                 std::initializer_list<double> exponents) {
    for (double t : exponents) {
      queries.push_back({kind, {sizes, p, partition}, t});
    }
  };
  add(TestKind::sphericity, {10}, 3, {}, {1.0, 2.0});
  add(TestKind::block_independence, {12}, 5, {2, 2, 1}, {0.5, 1.0});
  add(TestKind::equal_distributions, {10, 10, 10}, 2, {}, {0.5, 1.0});
  add(TestKind::equal_covariances, {10, 10, 10}, 2, {}, {0.5, 1.0});
  add(TestKind::specified, {10}, 3, {}, {0.5, 1.0});
  add(TestKind::complete_independence, {10}, 3, {}, {1.0, -0.5});
  return queries;
}

std::vector<std::pair<TestKind, std::vector<MomentShape>>> default_mgf_sequences() {
  std::vector<std::pair<TestKind, std::vector<MomentShape>>> out;
  auto seq = [](auto&&... shapes) { return std::vector<MomentShape>{shapes...}; };
  out.emplace_back(TestKind::sphericity, seq(MomentShape{{50}, 25, {}}, MomentShape{{100}, 50, {}},
                                             MomentShape{{200}, 100, {}},
                                             MomentShape{{400}, 200, {}}));
  out.emplace_back(TestKind::block_independence,
                   seq(MomentShape{{64}, 40, {16, 16, 8}}, MomentShape{{128}, 80, {32, 32, 16}},
                       MomentShape{{256}, 160, {64, 64, 32}},
                       MomentShape{{512}, 320, {128, 128, 64}}));
  out.emplace_back(TestKind::equal_distributions,
                   seq(MomentShape{{34, 34, 34}, 17, {}}, MomentShape{{68, 68, 68}, 34, {}},
                       MomentShape{{136, 136, 136}, 68, {}},
                       MomentShape{{272, 272, 272}, 136, {}}));
  out.emplace_back(TestKind::equal_covariances,
                   seq(MomentShape{{34, 34, 34}, 17, {}}, MomentShape{{68, 68, 68}, 34, {}},
                       MomentShape{{136, 136, 136}, 68, {}},
                       MomentShape{{272, 272, 272}, 136, {}}));
  out.emplace_back(TestKind::specified, seq(MomentShape{{50}, 25, {}}, MomentShape{{100}, 50, {}},
                                            MomentShape{{200}, 100, {}},
                                            MomentShape{{400}, 200, {}}));
  out.emplace_back(TestKind::complete_independence,
                   seq(MomentShape{{40}, 34, {}}, MomentShape{{80}, 74, {}},
                       MomentShape{{160}, 154, {}}, MomentShape{{320}, 314, {}}));
  return out;
}

namespace {

std::vector<MomentQuery> queries_from_config(const std::string& path) {
  // Reuse the scenario grammar: kind, n, p, blocks plus a comma list of
  // exponents under 't'. iterations/seed/alpha are ignored here.
  std::ifstream in(path);
  if (!in) throw EmptyInput("cannot open '" + path + "'");
  std::vector<MomentQuery> queries;
  std::string line;
  std::size_t line_no = 0;
  std::string kind, n, p, blocks, t;
  std::size_t block_line = 0;
  auto flush = [&]() {
    if (kind.empty() && n.empty() && t.empty()) return;
    if (kind.empty() || n.empty() || t.empty()) {
      throw ConfigError("moment query needs kind, n and t", block_line);
    }
    MomentShape shape;
    for (const std::string& item : [&] {
           std::vector<std::string> parts;
           std::size_t start = 0;
           while (true) {
             auto pos = n.find(',', start);
             parts.push_back(n.substr(start, pos - start));
             if (pos == std::string::npos) break;
             start = pos + 1;
           }
           return parts;
         }()) {
      shape.sizes.push_back(std::stol(item));
    }
    if (!blocks.empty()) {
      std::size_t start = 0;
      while (true) {
        auto pos = blocks.find(',', start);
        shape.partition.push_back(std::stol(blocks.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
    }
    shape.p = p.empty() ? 0 : std::stol(p);
    if (shape.p == 0) {
      for (long b : shape.partition) shape.p += b;
    }
    const TestKind tk = test_kind_from_string(kind);
    std::size_t start = 0;
    while (true) {
      auto pos = t.find(',', start);
      queries.push_back({tk, shape, std::stod(t.substr(start, pos - start))});
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
    kind.clear();
    n.clear();
    p.clear();
    blocks.clear();
    t.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string content = line;
    const auto hash = content.find('#');
    if (hash == 0) continue;
    const auto b = content.find_first_not_of(" \t");
    if (b == std::string::npos) {
      flush();
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value", line_no);
    auto trim_copy = [](std::string s) {
      const auto b2 = s.find_first_not_of(" \t");
      const auto e2 = s.find_last_not_of(" \t");
      return b2 == std::string::npos ? std::string() : s.substr(b2, e2 - b2 + 1);
    };
    const std::string key = trim_copy(content.substr(0, eq));
    const std::string value = trim_copy(content.substr(eq + 1));
    if (block_line == 0) block_line = line_no;
    if (key == "kind") {
      kind = value;
    } else if (key == "n") {
      n = value;
    } else if (key == "p") {
      p = value;
    } else if (key == "blocks") {
      blocks = value;
    } else if (key == "t") {
      t = value;
    } else {
      throw ConfigError("unknown key '" + key + "' in moment config", line_no);
    }
  }
  flush();
  if (queries.empty()) throw EmptyInput("moment config lists no queries");
  return queries;
}

}  // namespace

int run_moment_check_command(const MomentCheckOptions& options, std::ostream& out) {
  int failures = 0;

  const std::vector<MomentQuery> queries = options.config_path.empty()
                                               ? default_moment_queries()
                                               : queries_from_config(options.config_path);
  out << "formula-vs-Monte-Carlo moment agreement (" << options.mc_iterations
      << " iterations, 3 sigma gate)\n";
  double worst_sigmas = 0.0;
  for (const MomentQuery& q : queries) {
    const MomentMcResult r =
        monte_carlo_moment_check(q, options.mc_iterations, options.seed, options.workers);
    worst_sigmas = std::max(worst_sigmas, r.deviation_sigmas);
    const bool ok = r.deviation_sigmas <= 3.0;
    if (!ok) ++failures;
    out << (ok ? "  ok   " : "  FAIL ") << to_string(q.kind) << " t=" << q.t
        << " formula=" << r.formula << " mc=" << r.mc_mean << " +-" << r.mc_stderr << " ("
        << r.deviation_sigmas << " sigma)\n";
  }
  out << "max deviation: " << worst_sigmas << " sigma\n";

  out << "mgf convergence (deterministic, |s| <= 0.3, gate 0.05 at largest shape)\n";
  for (const auto& [kind, shapes] : default_mgf_sequences()) {
    for (double s : {-0.3, -0.15, 0.15, 0.3}) {
      const auto deviations = mgf_convergence_check(kind, shapes, s);
      bool monotone = true;
      for (std::size_t i = 1; i < deviations.size(); ++i) {
        if (!(deviations[i].deviation < deviations[i - 1].deviation)) monotone = false;
      }
      const double last = deviations.back().deviation;
      const bool ok = monotone && last < 0.05;
      if (!ok) ++failures;
      out << (ok ? "  ok   " : "  FAIL ") << to_string(kind) << " s=" << s << " deviations";
      for (const auto& d : deviations) out << ' ' << d.deviation;
      out << (monotone ? " (decreasing)" : " (NOT decreasing)") << '\n';
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace hdlrt
