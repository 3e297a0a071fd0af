#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace memrepair::replay {

/// The PoC input that reproduces the error: program arguments, optional
/// stdin redirection, and any input files the arguments refer to.
struct PocInput {
    std::vector<std::string> argv;
    std::string stdin_file;
    std::vector<std::string> input_files;

    bool operator==(const PocInput&) const = default;
};

/// A buildable C project under repair. The manifest file memrepair.json at
/// the workspace root carries the commands and the allocator wrappers the
/// tracer should treat like the primitive APIs.
struct ProjectWorkspace {
    std::string root;
    std::string build_cmd;  // shell; receives MEMREPAIR_CC / MEMREPAIR_CFLAGS
    std::string binary;     // built artifact, relative to root
    std::string run_cmd_template; // optional shell template: {binary} {args}
    std::string test_cmd;         // optional shell command
    std::vector<std::string> alloc_wrappers;
    std::vector<std::string> free_wrappers;
    PocInput default_poc;

    bool operator==(const ProjectWorkspace&) const = default;
    std::string binary_path() const;
};

/// Reads <root>/memrepair.json and validates that referenced inputs exist.
ProjectWorkspace load_workspace(const std::string& root);

void to_json(nlohmann::json& j, const PocInput& v);
void from_json(const nlohmann::json& j, PocInput& v);

} // namespace memrepair::replay
