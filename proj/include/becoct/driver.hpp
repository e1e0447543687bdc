#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "becoct/config.hpp"

namespace becoct {

using ProgressFn = std::function<void(const std::string& line)>;

struct RunResult {
  Status status = Status::ok;
  std::string message;
  std::string summary;  // human-readable, ends with a newline
  double final_cost = 0.0;
  std::optional<ConsistencyReport> check;
};

struct OptimizeRequest {
  std::optional<int> iterations;  // overrides optimizer.iterations
  bool check = false;
  double eta = 1e-6;
};

// Both write their artifacts into outdir (created if missing).
RunResult run_simulate(const RunConfig& cfg, const std::string& outdir, const ProgressFn& progress = {});
RunResult run_optimize(const RunConfig& cfg, const std::string& outdir, const OptimizeRequest& req,
                       const ProgressFn& progress = {});

// CSV helpers: comma separated, '.' decimal point, LF endings, 17 significant digits.
std::string format_number(double v);
void write_csv(const std::string& path, const std::vector<std::string>& header, const std::vector<rvec>& columns,
               const std::string& comment = {});
// Returns the numeric table (rows x columns); lines starting with '#' are skipped.
rmat read_csv(const std::string& path, std::vector<std::string>* header = nullptr);

ControlTimeline make_control(const RunConfig& cfg);

}  // namespace becoct
