#pragma once

#include <stdexcept>
#include <string>

namespace memrepair {

// Exit codes form the CLI's public contract. Codes 0-6 are stable;
// 7 covers replay infrastructure failures (build/parse/timeout).
enum class ExitCode : int {
    Ok = 0,
    Internal = 1,
    Usage = 2,
    NoError = 3,
    TraceFailure = 4,
    LlmFailure = 5,
    ValidationFailure = 6,
    ReplayFailure = 7,
};

class Error : public std::runtime_error {
public:
    Error(std::string message, ExitCode code)
        : std::runtime_error(std::move(message)), code_(code) {}
    ExitCode exit_code() const { return code_; }

private:
    ExitCode code_;
};

struct UsageError : Error {
    explicit UsageError(std::string m) : Error(std::move(m), ExitCode::Usage) {}
};
struct DomainError : Error {
    explicit DomainError(std::string m) : Error(std::move(m), ExitCode::Usage) {}
};
struct ValidationError : Error {
    explicit ValidationError(std::string m) : Error(std::move(m), ExitCode::Usage) {}
};

// replay
struct BuildError : Error {
    BuildError(std::string m, std::string stderr_text)
        : Error(std::move(m), ExitCode::ReplayFailure), captured_stderr(std::move(stderr_text)) {}
    std::string captured_stderr;
};
struct NoErrorDetected : Error {
    explicit NoErrorDetected(std::string m) : Error(std::move(m), ExitCode::NoError) {}
};
struct ReplayTimeout : Error {
    explicit ReplayTimeout(std::string m) : Error(std::move(m), ExitCode::ReplayFailure) {}
};
struct ReportParseError : Error {
    ReportParseError(std::string m, std::string raw_text)
        : Error(std::move(m), ExitCode::ReplayFailure), raw(std::move(raw_text)) {}
    std::string raw;
};

// trace
struct DebuggerLaunchError : Error {
    explicit DebuggerLaunchError(std::string m) : Error(std::move(m), ExitCode::TraceFailure) {}
};
struct MalformedTrace : Error {
    explicit MalformedTrace(std::string m) : Error(std::move(m), ExitCode::TraceFailure) {}
};
struct ErrorNotReproducedInTrace : Error {
    explicit ErrorNotReproducedInTrace(std::string m) : Error(std::move(m), ExitCode::TraceFailure) {}
};
struct TraceBudgetExceeded : Error {
    explicit TraceBudgetExceeded(std::string m) : Error(std::move(m), ExitCode::TraceFailure) {}
};

// pathex
struct NoAllocationFound : Error {
    explicit NoAllocationFound(std::string m) : Error(std::move(m), ExitCode::TraceFailure) {}
};

// llmgw
struct LlmTransportError : Error {
    explicit LlmTransportError(std::string m) : Error(std::move(m), ExitCode::LlmFailure) {}
};
struct LlmAuthError : Error {
    explicit LlmAuthError(std::string m) : Error(std::move(m), ExitCode::LlmFailure) {}
};
struct NoDiffInResponse : Error {
    explicit NoDiffInResponse(std::string m) : Error(std::move(m), ExitCode::LlmFailure) {}
};
struct TranscriptMismatch : Error {
    explicit TranscriptMismatch(std::string m) : Error(std::move(m), ExitCode::LlmFailure) {}
};

// patchkit
struct MalformedDiff : Error {
    explicit MalformedDiff(std::string m) : Error(std::move(m), ExitCode::ValidationFailure) {}
};
struct PathEscapesWorkspace : Error {
    explicit PathEscapesWorkspace(std::string m) : Error(std::move(m), ExitCode::ValidationFailure) {}
};
struct ContextMismatch : Error {
    explicit ContextMismatch(std::string m) : Error(std::move(m), ExitCode::ValidationFailure) {}
};

} // namespace memrepair
