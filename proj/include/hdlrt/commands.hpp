#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hdlrt/approximations.hpp"

namespace hdlrt {

// `test` subcommand: one statistic on files, both approximations reported as
// key<TAB>value lines.
struct TestCommand {
  std::string kind;
  std::string data_path;                 // single-sample kinds
  std::vector<std::string> group_paths;  // k-sample kinds
  std::vector<long> blocks;              // block independence
  std::string mu0_path;                  // specified
  std::string sigma0_path;               // specified
  double alpha = 0.05;
  bool force_domain = false;
};

TestOutcome run_test_command(const TestCommand& cmd);
void write_test_report(const TestOutcome& outcome, double alpha, std::ostream& out);

// `simulate` subcommand: scenario config in, TSV out. Returns 0 on success.
int run_simulate_command(const std::string& config_path, int workers,
                         std::optional<std::uint64_t> seed_override, std::ostream& out,
                         std::ostream& log);

// `histogram` subcommand: per scenario, write <prefix><id>.clt.txt and
// <prefix><id>.chisq.txt with one standardized sample per line.
int run_histogram_command(const std::string& config_path, const std::string& out_prefix,
                          int workers, std::optional<std::uint64_t> seed_override,
                          std::ostream& log);

// `moment-check` subcommand: formula-vs-Monte-Carlo moment agreement plus the
// deterministic mgf convergence suite. Nonzero exit when a tolerance fails.
struct MomentCheckOptions {
  std::string config_path;  // empty = shipped default suite
  long mc_iterations = 1000000;
  std::uint64_t seed = 1;
  int workers = 4;
};
int run_moment_check_command(const MomentCheckOptions& options, std::ostream& out);

// The default small-shape moment suite (two exponents per kind) and the
// default mgf shape sequences; shared by moment-check and the test suites.
std::vector<MomentQuery> default_moment_queries();
std::vector<std::pair<TestKind, std::vector<MomentShape>>> default_mgf_sequences();

}  // namespace hdlrt
