#pragma once

#include <string>
#include <utility>
#include <vector>

namespace memrepair::subprocess {

struct RunSpec {
    std::vector<std::string> argv;  // direct exec; ignored when shell_command set
    std::string shell_command;      // run via /bin/sh -c when non-empty
    std::string cwd;
    std::vector<std::pair<std::string, std::string>> env; // additions/overrides
    std::string stdin_file;         // /dev/null when empty
    int timeout_seconds = 120;
    bool disable_aslr = false;
};

struct RunResult {
    int exit_code = -1;
    bool timed_out = false;
    int term_signal = 0; // nonzero when the process died from a signal
    std::string stdout_text;
    std::string stderr_text;

    bool ok() const { return !timed_out && term_signal == 0 && exit_code == 0; }
};

/// Runs the process in its own process group, captures both output streams,
/// and kills the whole group on timeout.
RunResult run_process(const RunSpec& spec);

} // namespace memrepair::subprocess
