#include "memrepair/report.hpp"

namespace memrepair::replay {

void to_json(nlohmann::json& j, const ErrorReport& v) {
    j = {{"kind", fta::to_string(v.kind)},
         {"file", v.location.file},
         {"line", v.location.line},
         {"address", trace::hex_string(v.error_address)},
         {"raw", v.raw_report}};
}

void from_json(const nlohmann::json& j, ErrorReport& v) {
    v.kind = fta::error_kind_from_string(j.at("kind").get<std::string>());
    j.at("file").get_to(v.location.file);
    j.at("line").get_to(v.location.line);
    v.error_address = trace::parse_hex(j.at("address").get<std::string>());
    v.raw_report = j.value("raw", "");
}

} // namespace memrepair::replay
