#pragma once

#include <string>

#include "memrepair/report.hpp"
#include "memrepair/workspace.hpp"

namespace memrepair::replay {

enum class Tool { Asan, Valgrind };

const char* to_string(Tool t);
Tool tool_from_string(const std::string& s);

/// Handle to a debug build of the workspace: the binary path and the tool
/// it was prepared for.
struct BuildArtifact {
    ProjectWorkspace workspace;
    Tool tool = Tool::Asan;
    std::string binary_path;
};

/// Rebuilds the project with debug info, plus sanitizer instrumentation
/// when tool is asan (valgrind instruments at run time). The workspace
/// build command receives the compiler and flags through MEMREPAIR_CC and
/// MEMREPAIR_CFLAGS. Throws BuildError with the captured stderr.
BuildArtifact build_instrumented(const ProjectWorkspace& ws, Tool tool,
                                 int timeout_seconds = 300);

/// Runs the PoC under the tool and distills the first reported error.
/// Throws NoErrorDetected on a clean run, ReplayTimeout, or
/// ReportParseError when the tool output matches no known pattern.
ErrorReport replay_error(const BuildArtifact& artifact, const PocInput& poc,
                         int timeout_seconds = 120);

/// Pure function of (raw, tool, workspace_root): maps the tool's report
/// vocabulary onto the error kinds, picks the innermost frame inside the
/// workspace as the location, and extracts the error address.
ErrorReport parse_sanitizer_report(const std::string& raw, Tool tool,
                                   const std::string& workspace_root);

} // namespace memrepair::replay
