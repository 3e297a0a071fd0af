#include "memrepair/pathex.hpp"

#include "memrepair/error.hpp"
#include "memrepair/fta.hpp"

namespace memrepair::pathex {

ErrorPropagationPath extract_error_propagation_path(const trace::FullExecutionPath& pi,
                                                    const trace::TypestateContextMap& tmap) {
    const int n = pi.length();
    if (n == 0) throw NoAllocationFound("empty execution path");

    // Latest key with an alloc transition; later keys are all non-alloc,
    // which is exactly the rule's side condition.
    int m = 0;
    for (const auto& [index, ctx] : tmap.entries) {
        if (index > n) break;
        if (ctx.transition.op == fta::MemOp::Alloc) m = index;
    }
    if (m == 0)
        throw NoAllocationFound("context map has no allocation entry for the error address");

    ErrorPropagationPath pe;
    pe.steps.assign(pi.steps.begin() + (m - 1), pi.steps.end());
    return pe;
}

ContextTrace build_context_trace(const ErrorPropagationPath& pe,
                                 const trace::TypestateContextMap& tmap) {
    ContextTrace out;
    if (pe.empty()) return out;
    auto it = tmap.entries.lower_bound(pe.first_index());
    auto end = tmap.entries.upper_bound(pe.last_index());
    for (; it != end; ++it) out.entries.push_back({it->first, it->second});
    return out;
}

void to_json(nlohmann::json& j, const ErrorPropagationPath& v) {
    j = nlohmann::json{{"steps", v.steps}};
}
void from_json(const nlohmann::json& j, ErrorPropagationPath& v) {
    j.at("steps").get_to(v.steps);
}

void to_json(nlohmann::json& j, const ContextTraceEntry& v) {
    j = {{"index", v.index}, {"context", v.context}};
}
void from_json(const nlohmann::json& j, ContextTraceEntry& v) {
    j.at("index").get_to(v.index);
    j.at("context").get_to(v.context);
}

void to_json(nlohmann::json& j, const ContextTrace& v) {
    j = nlohmann::json{{"contexts", v.entries}};
}
void from_json(const nlohmann::json& j, ContextTrace& v) {
    j.at("contexts").get_to(v.entries);
}

} // namespace memrepair::pathex
