#pragma once

#include <memory>
#include <string>

#include "memrepair/trace.hpp"

namespace memrepair::trace {

/// Replays a JSON-Lines trace file, one TraceEvent per line. Indices must
/// start at 1 and be non-decreasing in steps of at most one; violations
/// raise MalformedTrace as the file is consumed.
class SyntheticSession : public DebugSession {
public:
    explicit SyntheticSession(const std::string& path);
    /// Parses events from an in-memory JSONL document (used by tests).
    static std::unique_ptr<SyntheticSession> from_string(const std::string& jsonl);
    ~SyntheticSession() override;

    std::optional<TraceEvent> advance() override;

private:
    SyntheticSession();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::unique_ptr<DebugSession> open_synthetic_session(const std::string& trace_file);

} // namespace memrepair::trace
