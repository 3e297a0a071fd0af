#include "memrepair/trace.hpp"

#include <fstream>

#include "memrepair/error.hpp"

namespace memrepair::trace {

bool touches_error_block(const TraceEvent& ev, const MemoryBlock& block) {
    return ev.address.has_value() && block.contains(*ev.address);
}

namespace {

std::vector<StackFrame> context_backtrace(const TraceEvent& ev) {
    if (!ev.backtrace.empty()) {
        if (ev.backtrace.front().location != ev.location)
            throw MalformedTrace("event at " + ev.location.str() +
                                 " has a backtrace starting elsewhere (" +
                                 ev.backtrace.front().location.str() + ")");
        return ev.backtrace;
    }
    return {StackFrame{"unknown", ev.location, ev.source}};
}

} // namespace

TraceResult build_full_path_and_tmap(DebugSession& session,
                                     const fta::FiniteTypestateAutomaton& automaton,
                                     const replay::ErrorReport& report,
                                     const TraceOptions& options) {
    TraceResult result;
    result.final_state = automaton.initial();

    // Until the error object's allocation is seen, aliasing is exact match
    // on the reported address (or, for site-anchored leak reports that
    // carry no address, on the allocation site).
    bool block_known = false;
    result.error_block = MemoryBlock{report.error_address, 1, 0};
    const bool anchor_by_site = report.error_address == 0;

    long consumed = 0;
    while (true) {
        if (consumed >= options.step_budget)
            throw TraceBudgetExceeded("step budget of " + std::to_string(options.step_budget) +
                                      " events exhausted before the error state");
        std::optional<TraceEvent> ev = session.advance();
        if (!ev) break;
        ++consumed;

        const int expected_next = result.path.length() + 1;
        if (ev->index == expected_next) {
            result.path.steps.push_back(ExecutionStep{ev->index, ev->location, ev->source});
        } else if (ev->index != result.path.length() || result.path.length() == 0) {
            throw MalformedTrace("event index " + std::to_string(ev->index) +
                                 " does not follow step " + std::to_string(result.path.length()));
        }

        if (!ev->op) continue;

        // Track the error object's allocation extent; a later allocation
        // covering the error address supersedes the previous extent.
        bool touches = false;
        if (*ev->op == fta::MemOp::Alloc) {
            if (!ev->address || !ev->size)
                throw MalformedTrace("alloc event at step " + std::to_string(ev->index) +
                                     " lacks address or size");
            MemoryBlock candidate{*ev->address, *ev->size, ev->index};
            if (anchor_by_site && !block_known) {
                if (ev->location == report.location) {
                    result.error_block = candidate;
                    block_known = true;
                    touches = true;
                }
            } else if (candidate.contains(block_known ? result.error_block.base
                                                      : report.error_address)) {
                result.error_block = candidate;
                block_known = true;
                touches = true;
            }
        } else if (*ev->op == fta::MemOp::Exit) {
            // Program exit applies to the tracked object unconditionally.
            touches = true;
        } else {
            if (!ev->address)
                throw MalformedTrace(std::string(fta::to_string(*ev->op)) + " event at step " +
                                     std::to_string(ev->index) + " lacks an address");
            touches = touches_error_block(*ev, result.error_block);
        }
        if (!touches) continue;

        fta::Typestate post = fta::step(automaton, result.final_state, *ev->op);
        if (post != result.final_state) {
            ProgramContext ctx;
            ctx.location = ev->location;
            ctx.transition = TypestateTransition{result.final_state, *ev->op, post};
            ctx.backtrace = context_backtrace(*ev);
            result.tmap.entries.emplace(ev->index, std::move(ctx));
            result.final_state = post;
        }
        if (automaton.is_error(result.final_state)) return result;
    }
    throw ErrorNotReproducedInTrace("session ended after " + std::to_string(result.path.length()) +
                                    " steps without reaching " + automaton.error_state().name);
}

struct RecordingSession::Impl {
    std::unique_ptr<DebugSession> inner;
    std::ofstream out;
};

RecordingSession::RecordingSession(std::unique_ptr<DebugSession> inner, const std::string& out_path)
    : impl_(new Impl{std::move(inner), std::ofstream(out_path)}) {
    if (!impl_->out) throw MalformedTrace("cannot open trace recording file: " + out_path);
}

RecordingSession::~RecordingSession() = default;

std::optional<TraceEvent> RecordingSession::advance() {
    std::optional<TraceEvent> ev = impl_->inner->advance();
    if (ev) impl_->out << nlohmann::json(*ev).dump() << '\n';
    return ev;
}

} // namespace memrepair::trace
