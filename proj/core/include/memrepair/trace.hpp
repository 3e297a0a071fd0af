#pragma once

#include <memory>
#include <optional>

#include "memrepair/fta.hpp"
#include "memrepair/report.hpp"
#include "memrepair/trace_types.hpp"

namespace memrepair::trace {

/// A strictly sequential source of executed steps. Implementations: the
/// gdb/MI live backend and the synthetic recorded-trace backend. Sessions
/// are exclusively owned; distinct sessions may run in parallel.
class DebugSession {
public:
    virtual ~DebugSession() = default;

    /// Returns the next step record, or nullopt when the program ended.
    /// Consecutive events may share an index when one statement performs
    /// several memory operations (e.g. a moving realloc).
    virtual std::optional<TraceEvent> advance() = 0;
};

struct TraceOptions {
    long step_budget = 1'000'000;
};

struct TraceResult {
    FullExecutionPath path;
    TypestateContextMap tmap;
    fta::Typestate final_state;
    MemoryBlock error_block;
};

/// true iff the event's address lies in [block.base, block.base + size).
bool touches_error_block(const TraceEvent& ev, const MemoryBlock& block);

/// Drives the session to the first error transition, constructing the full
/// execution path and the typestate-changing context map for the error
/// object identified by the report. Throws ErrorNotReproducedInTrace when
/// the session ends before an error transition and TraceBudgetExceeded when
/// the step budget runs out.
TraceResult build_full_path_and_tmap(DebugSession& session,
                                     const fta::FiniteTypestateAutomaton& automaton,
                                     const replay::ErrorReport& report,
                                     const TraceOptions& options = {});

/// Tees every step record produced by an inner session to a JSON-Lines
/// file, so a live run can be replayed by the synthetic backend.
class RecordingSession : public DebugSession {
public:
    RecordingSession(std::unique_ptr<DebugSession> inner, const std::string& out_path);
    ~RecordingSession() override;
    std::optional<TraceEvent> advance() override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace memrepair::trace
