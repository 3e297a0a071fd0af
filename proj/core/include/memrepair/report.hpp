#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

#include "memrepair/fta.hpp"
#include "memrepair/trace_types.hpp"

namespace memrepair::replay {

/// Distilled output of one dynamic-analysis run: what went wrong, where,
/// and at which heap address. For ML the location is the leaked block's
/// allocation site and the address its base (0 when the tool's report
/// does not disclose it; the tracer then anchors by allocation site).
struct ErrorReport {
    fta::ErrorKind kind = fta::ErrorKind::UAF;
    trace::SourceLocation location;
    std::uint64_t error_address = 0;
    std::string raw_report;

    bool operator==(const ErrorReport&) const = default;
};

void to_json(nlohmann::json& j, const ErrorReport& v);
void from_json(const nlohmann::json& j, ErrorReport& v);

} // namespace memrepair::replay
