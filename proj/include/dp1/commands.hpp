#pragma once

#include <string>

#include "dp1/config.hpp"

namespace dp1 {

/// Exit codes shared by the CLI: 0 success, 2 configuration error,
/// 3 solver non-convergence, 4 verification failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNoConverge = 3;
inline constexpr int kExitVerifyFail = 4;

int cmd_solve_pq(const RunConfig& cfg, const std::string& out_dir);
int cmd_continue(const RunConfig& cfg, const std::string& out_dir);
int cmd_solve_limit(const RunConfig& cfg, const std::string& out_dir);
int cmd_verify(const RunConfig& cfg, const std::string& out_dir, const std::string& u_csv,
               const std::string& z_csv);
int cmd_oracle(const RunConfig& cfg, const std::string& out_dir);
int cmd_compare(const RunConfig& cfg, const std::string& out_dir);

}  // namespace dp1
