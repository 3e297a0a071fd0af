#include "memrepair/synthetic.hpp"

#include <fstream>
#include <sstream>

#include "memrepair/error.hpp"

namespace memrepair::trace {

struct SyntheticSession::Impl {
    std::unique_ptr<std::istream> input;
    std::string origin;
    int last_index = 0;
    long line_no = 0;
};

SyntheticSession::SyntheticSession() : impl_(new Impl) {}

SyntheticSession::SyntheticSession(const std::string& path) : impl_(new Impl) {
    auto in = std::make_unique<std::ifstream>(path);
    if (!*in) throw MalformedTrace("cannot open trace file: " + path);
    impl_->input = std::move(in);
    impl_->origin = path;
}

std::unique_ptr<SyntheticSession> SyntheticSession::from_string(const std::string& jsonl) {
    std::unique_ptr<SyntheticSession> session(new SyntheticSession());
    session->impl_->input = std::make_unique<std::istringstream>(jsonl);
    session->impl_->origin = "<memory>";
    return session;
}

SyntheticSession::~SyntheticSession() = default;

std::optional<TraceEvent> SyntheticSession::advance() {
    std::string line;
    while (std::getline(*impl_->input, line)) {
        ++impl_->line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        TraceEvent ev;
        try {
            ev = nlohmann::json::parse(line).get<TraceEvent>();
        } catch (const nlohmann::json::exception& e) {
            throw MalformedTrace(impl_->origin + ":" + std::to_string(impl_->line_no) +
                                 ": bad trace record: " + e.what());
        }
        if (ev.index < 1 || (ev.index != impl_->last_index && ev.index != impl_->last_index + 1))
            throw MalformedTrace(impl_->origin + ":" + std::to_string(impl_->line_no) +
                                 ": index " + std::to_string(ev.index) + " after " +
                                 std::to_string(impl_->last_index) + " is not monotonic");
        impl_->last_index = ev.index;
        return ev;
    }
    return std::nullopt;
}

std::unique_ptr<DebugSession> open_synthetic_session(const std::string& trace_file) {
    return std::make_unique<SyntheticSession>(trace_file);
}

} // namespace memrepair::trace
