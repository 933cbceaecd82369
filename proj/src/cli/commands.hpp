#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace tvnet::cli {

enum ExitCode : int {
  kOk = 0,
  kAuditFailed = 1,  // hardlb found a progression-bound violation
  kConfigError = 2,
  kDataError = 3,
  kDivergence = 4,
};

struct TopologyOptions {
  std::string kind = "random-sun";  // static-complete | sun-cycle | random-sun | constructed
  int n = 16;
  std::string centers;  // sun-cycle: sets separated by ';', e.g. "1,2;3;4-6"
  int center_size = 1;  // random-sun
  double delta = 1.0;   // Laplacian step for sun graphs
  double beta = 0.5;    // constructed
  std::string group_a = "1";
  std::string group_b;  // empty selects node n
};

struct ExperimentConfig {
  std::string algo = "mcdsgt";
  TopologyOptions topology;
  std::string R = "auto";
  std::string gamma = "auto";
  long K = 1000;
  std::string init = "average";  // average | gossip
  std::string data;              // LIBSVM path; synthetic data when empty
  std::string relabel;
  bool scale = false;
  std::string sigma2 = "auto";  // oracle variance for the schedules
  bool synthetic = false;
  long samples = 1600;
  long dim = 50;
  double separation = 1.0;
  double skew = 0.8;
  double rho = 0.01;
  long batch = 8;  // 0 = full batch
  std::uint64_t seed = 0;
  std::string out;
  long record_every = 1;
};

struct GraphConfig {
  int n = 8;
  double beta = 0.5;
  std::string group_a = "1";
  std::string group_b;
  long export_rounds = 0;
  std::uint64_t seed = 0;
  std::string out;
  long record_every = 1;
};

struct DiameterConfig {
  TopologyOptions topology;
  std::string order = "forward";  // forward | nested
  long cap = 0;
  long window = 0;
  std::string from;  // both set: distance between the two groups
  std::string to;
  std::uint64_t seed = 0;
  std::string out;
  long record_every = 1;
};

struct HardlbConfig {
  int n = 8;
  double beta = 0.75;
  std::string algo = "mcdsgt";
  long T = 200;
  int R = 2;
  std::string gamma = "auto";
  double L = 1.0;
  double Delta = 1.0;
  std::uint64_t seed = 0;
  std::string out;
  long record_every = 1;
};

// Each command writes its result to cfg.out (or `out` when empty), reports
// errors on `err`, and returns an ExitCode.
int cmd_run(const ExperimentConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_graph(const GraphConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_diameter(const DiameterConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_hardlb(const HardlbConfig& cfg, std::ostream& out, std::ostream& err);

// Full front end. args[0] is the program name.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "# key=value" lines of an earlier output file, in file order. Other lines
// are ignored. Throws DataError when the file cannot be read.
std::vector<std::pair<std::string, std::string>> read_header_config(const std::string& path);

// Shortest decimal that reads back to the same double.
std::string shortest(double v);

}  // namespace tvnet::cli
