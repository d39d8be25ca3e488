// Batch front end: each cmd_* implements one subcommand of the qgevrey
// binary and returns its process exit code. Keeping them in the library lets
// the test suite drive them in-process (in particular the determinism check,
// which runs cmd_report twice and byte-compares the artifacts).
//
// Exit codes: 0 success, 1 validation failure, 2 scenario parse/schema
// error, 3 fixed-point iteration not contracting, 4 missing upstream
// artifacts.
#pragma once

#include <string>

namespace qsl {

struct CliOverrides {
    double tol = -1.0;  // negative = keep the scenario value
    int j_max = -1;
    int n_max = -1;
    long seed = -1;
};

int cmd_validate(const std::string& scenario_path, const std::string& out_dir);
int cmd_solve(const std::string& scenario_path, const std::string& stage,
              const std::string& out_dir, const CliOverrides& ov = {});
int cmd_flatness(const std::string& scenario_path, const std::string& pair,
                 const std::string& out_dir, const CliOverrides& ov = {});
int cmd_formal(const std::string& scenario_path, const std::string& out_dir,
               const CliOverrides& ov = {});
int cmd_report(const std::string& scenario_path, const std::string& out_dir,
               const CliOverrides& ov = {});

}  // namespace qsl
