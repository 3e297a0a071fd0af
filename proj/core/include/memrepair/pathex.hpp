#pragma once

#include "json.hpp"

#include "memrepair/trace_types.hpp"

namespace memrepair::pathex {

/// Contiguous slice of the full execution path from the nearest allocation
/// of the error address (index m) to the error trigger (index n).
struct ErrorPropagationPath {
    std::vector<trace::ExecutionStep> steps;

    bool operator==(const ErrorPropagationPath&) const = default;
    bool empty() const { return steps.empty(); }
    int first_index() const { return steps.front().index; }
    int last_index() const { return steps.back().index; }
};

struct ContextTraceEntry {
    int index = 0;
    trace::ProgramContext context;

    bool operator==(const ContextTraceEntry&) const = default;
};

/// The contexts of the typestate-changing steps along the error-propagation
/// path, in execution order.
struct ContextTrace {
    std::vector<ContextTraceEntry> entries;

    bool operator==(const ContextTrace&) const = default;
    size_t size() const { return entries.size(); }
};

/// Slices pi at the latest context-map key whose operation is an
/// allocation. Throws NoAllocationFound when the map has no alloc entry.
ErrorPropagationPath extract_error_propagation_path(const trace::FullExecutionPath& pi,
                                                    const trace::TypestateContextMap& tmap);

/// Order-preserving selection of the context-map entries whose keys fall in
/// the propagation path's index range.
ContextTrace build_context_trace(const ErrorPropagationPath& pe,
                                 const trace::TypestateContextMap& tmap);

void to_json(nlohmann::json& j, const ErrorPropagationPath& v);
void from_json(const nlohmann::json& j, ErrorPropagationPath& v);
void to_json(nlohmann::json& j, const ContextTraceEntry& v);
void from_json(const nlohmann::json& j, ContextTraceEntry& v);
void to_json(nlohmann::json& j, const ContextTrace& v);
void from_json(const nlohmann::json& j, ContextTrace& v);

} // namespace memrepair::pathex
