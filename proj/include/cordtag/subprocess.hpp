#ifndef CORDTAG_SUBPROCESS_HPP
#define CORDTAG_SUBPROCESS_HPP

#include <filesystem>
#include <string>

namespace cordtag {

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
};

// Runs `command` via /bin/sh -c in the given working directory. If the
// command has not exited after timeout_seconds, its whole process group is
// killed and timed_out is set. timeout_seconds <= 0 means no timeout.
CommandResult run_command(const std::string& command,
                          const std::filesystem::path& working_dir,
                          double timeout_seconds);

}  // namespace cordtag

#endif  // CORDTAG_SUBPROCESS_HPP
