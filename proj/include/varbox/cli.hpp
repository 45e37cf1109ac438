#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

namespace varbox::cli {

/// Command-line values that win over the problem file.
struct Overrides {
  std::optional<double> resolution;
  std::optional<unsigned> degree;
  std::optional<double> epsilon;
  std::optional<unsigned> threads;
  std::optional<std::size_t> budget;
};

/// Exit codes shared by every command.
enum ExitCode : int { Ok = 0, InputError = 1, Negative = 2, Exhausted = 3 };

// An empty output path or "-" writes to `out`. Diagnostics go to `log`.

int cmd_enclose(const std::string& input, const std::string& output, const Overrides& ov,
                std::ostream& out, std::ostream& log);
int cmd_skeleton(const std::string& input, const std::string& output, const Overrides& ov,
                 std::ostream& out, std::ostream& log);
/// Lazy query when the file has start and goal, the full roadmap otherwise.
/// 0 connected, 2 disconnected, 3 unresolved.
int cmd_roadmap(const std::string& input, const std::string& output, const Overrides& ov,
                std::ostream& out, std::ostream& log);
/// Samples the enclosed system and checks every point lies in some box
/// (inflation 1e-6). 0 iff all covered, 2 otherwise.
int cmd_verify(const std::string& result, const std::string& problem, std::size_t samples,
               std::ostream& out, std::ostream& log);
/// format is "csv" or "obj".
int cmd_export(const std::string& result, const std::string& format, const std::string& output,
               std::ostream& out, std::ostream& log);

}  // namespace varbox::cli
