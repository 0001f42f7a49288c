#ifndef QMETRO_SCENARIO_HPP
#define QMETRO_SCENARIO_HPP

#include <cstdint>
#include <string>

namespace qmetro {

struct RunOptions {
  std::string outDir = ".";
  int workers = 0;  // 0: hardware concurrency
  bool certificates = false;
  std::uint64_t seed = 1;
  bool verbose = false;
};

// Exit codes: 0 ok, 2 config error, 3 solver non-convergence, 4 resource cap.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitResource = 4;

int runScenarioFile(const std::string& path, const RunOptions& opts);

}  // namespace qmetro

#endif  // QMETRO_SCENARIO_HPP
