#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "memrepair/llmgw.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "memrepair/error.hpp"

namespace memrepair::llmgw {

namespace {

constexpr const char* kCorrectiveInstruction =
    "Your previous answer did not contain a patch. "
    "Respond with a unified diff in a fenced code block.";

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 digest failed", ExitCode::Internal);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

bool looks_like_unified_diff(const std::string& block) {
    return block.find("--- ") != std::string::npos && block.find("+++ ") != std::string::npos &&
           block.find("@@") != std::string::npos;
}

struct HttpClient final : LlmClient {
    std::string name() const override { return "http"; }

    std::pair<std::string, TokenUsage> send(const promptgen::PromptBundle&,
                                            const nlohmann::json& messages,
                                            const ModelConfig& cfg) override {
        const char* key = std::getenv(cfg.api_key_env_var.c_str());
        if (key == nullptr || *key == '\0')
            throw LlmAuthError("environment variable " + cfg.api_key_env_var + " holds no API key");

        // Split endpoint_url into origin + path for httplib.
        auto scheme_end = cfg.endpoint_url.find("://");
        if (scheme_end == std::string::npos)
            throw LlmTransportError("endpoint URL lacks a scheme: " + cfg.endpoint_url);
        auto path_start = cfg.endpoint_url.find('/', scheme_end + 3);
        std::string origin = path_start == std::string::npos ? cfg.endpoint_url
                                                             : cfg.endpoint_url.substr(0, path_start);
        std::string path = path_start == std::string::npos ? "/" : cfg.endpoint_url.substr(path_start);

        nlohmann::json body = {{"model", cfg.model_name},
                               {"messages", messages},
                               {"temperature", cfg.temperature},
                               {"max_tokens", cfg.max_output_tokens}};

        httplib::Client client(origin);
        client.set_connection_timeout(cfg.request_timeout_seconds, 0);
        client.set_read_timeout(cfg.request_timeout_seconds, 0);
        client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});

        auto res = client.Post(path, body.dump(), "application/json");
        if (!res)
            throw LlmTransportError("request to " + origin + " failed: " + httplib::to_string(res.error()));
        if (res->status == 401 || res->status == 403)
            throw LlmAuthError("endpoint rejected the API key (HTTP " + std::to_string(res->status) + ")");
        if (res->status != 200)
            throw LlmTransportError("endpoint returned HTTP " + std::to_string(res->status) + ": " +
                                    res->body.substr(0, 500));
        try {
            nlohmann::json reply = nlohmann::json::parse(res->body);
            std::string text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
            TokenUsage usage;
            if (reply.contains("usage")) {
                usage.input_tokens = reply["usage"].value("prompt_tokens", 0L);
                usage.output_tokens = reply["usage"].value("completion_tokens", 0L);
            }
            return {text, usage};
        } catch (const nlohmann::json::exception& e) {
            throw LlmTransportError(std::string("unparseable completion response: ") + e.what());
        }
    }
};

struct MockClient final : LlmClient {
    std::vector<std::string> responses;
    size_t next = 0;

    std::string name() const override { return "mock"; }

    std::pair<std::string, TokenUsage> send(const promptgen::PromptBundle&,
                                            const nlohmann::json& messages,
                                            const ModelConfig&) override {
        if (responses.empty()) throw LlmTransportError("mock client has no canned responses");
        const std::string& text = responses[std::min(next, responses.size() - 1)];
        ++next;
        TokenUsage usage{promptgen::estimate_tokens(messages.dump()), promptgen::estimate_tokens(text)};
        return {text, usage};
    }
};

struct ReplayClient final : LlmClient {
    std::vector<std::string> paths;
    size_t next = 0;

    std::string name() const override { return "replay"; }

    std::pair<std::string, TokenUsage> send(const promptgen::PromptBundle& bundle,
                                            const nlohmann::json&,
                                            const ModelConfig&) override {
        if (next >= paths.size())
            throw LlmTransportError("replay client exhausted its " + std::to_string(paths.size()) +
                                    " transcript(s)");
        const std::string& path = paths[next++];
        std::ifstream in(path);
        if (!in) throw LlmTransportError("cannot open transcript: " + path);
        nlohmann::json t;
        try {
            in >> t;
        } catch (const nlohmann::json::exception& e) {
            throw LlmTransportError("transcript " + path + " is not valid JSON: " + e.what());
        }
        std::string recorded_hash = t.value("bundle_sha256", "");
        std::string actual_hash = bundle_sha256(bundle);
        if (recorded_hash != actual_hash)
            throw TranscriptMismatch("transcript " + path + " was recorded for bundle " +
                                     recorded_hash.substr(0, 12) + "..., not " +
                                     actual_hash.substr(0, 12) + "...");
        TokenUsage usage = t.value("usage", TokenUsage{});
        return {t.at("response").get<std::string>(), usage};
    }
};

} // namespace

std::unique_ptr<LlmClient> make_http_client() { return std::make_unique<HttpClient>(); }

std::unique_ptr<LlmClient> make_mock_client(std::vector<std::string> canned_responses) {
    auto client = std::make_unique<MockClient>();
    client->responses = std::move(canned_responses);
    return client;
}

std::unique_ptr<LlmClient> make_mock_client_from_files(const std::vector<std::string>& paths) {
    std::vector<std::string> responses;
    for (const auto& p : paths) {
        std::ifstream in(p);
        if (!in) throw LlmTransportError("cannot open canned response: " + p);
        std::ostringstream buf;
        buf << in.rdbuf();
        responses.push_back(buf.str());
    }
    return make_mock_client(std::move(responses));
}

std::unique_ptr<LlmClient> make_replay_client(std::vector<std::string> transcript_paths) {
    auto client = std::make_unique<ReplayClient>();
    client->paths = std::move(transcript_paths);
    return client;
}

nlohmann::json build_messages(const promptgen::PromptBundle& bundle, bool multi_turn) {
    nlohmann::json messages = nlohmann::json::array();
    std::string user_concat;
    for (const auto& seg : bundle.segments) {
        if (seg.kind == promptgen::SegmentKind::RoleTask) {
            messages.push_back({{"role", "system"}, {"content", seg.text}});
        } else if (multi_turn) {
            messages.push_back({{"role", "user"}, {"content", seg.text}});
        } else {
            if (!user_concat.empty()) user_concat += "\n\n";
            user_concat += seg.text;
        }
    }
    if (!multi_turn) messages.push_back({{"role", "user"}, {"content", user_concat}});
    return messages;
}

PatchProposal parse_proposal(const std::string& raw_text) {
    PatchProposal proposal;
    proposal.raw_text = raw_text;

    std::string prose;
    size_t pos = 0;
    while (true) {
        size_t open = raw_text.find("```", pos);
        if (open == std::string::npos) {
            prose += raw_text.substr(pos);
            break;
        }
        prose += raw_text.substr(pos, open - pos);
        size_t body_start = raw_text.find('\n', open + 3);
        if (body_start == std::string::npos) break;
        size_t close = raw_text.find("\n```", body_start);
        if (close == std::string::npos) {
            prose += raw_text.substr(open);
            break;
        }
        std::string block = raw_text.substr(body_start + 1, close - body_start - 1);
        if (looks_like_unified_diff(block)) {
            if (block.empty() || block.back() != '\n') block += '\n';
            proposal.diff_blocks.push_back(std::move(block));
        } else {
            prose += block;
        }
        pos = close + 4;
    }

    // Trim the explanation.
    size_t begin = prose.find_first_not_of(" \t\r\n");
    size_t end = prose.find_last_not_of(" \t\r\n");
    proposal.explanation = begin == std::string::npos ? "" : prose.substr(begin, end - begin + 1);
    return proposal;
}

PatchProposal complete(const promptgen::PromptBundle& bundle, const ModelConfig& cfg, LlmClient& client) {
    nlohmann::json messages = build_messages(bundle, cfg.multi_turn);
    TokenUsage total;
    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        if (attempt > 0)
            messages.push_back({{"role", "user"}, {"content", kCorrectiveInstruction}});
        auto [text, usage] = client.send(bundle, messages, cfg);
        total.input_tokens += usage.input_tokens;
        total.output_tokens += usage.output_tokens;
        PatchProposal proposal = parse_proposal(text);
        if (!proposal.diff_blocks.empty()) {
            proposal.usage = total;
            return proposal;
        }
        messages.push_back({{"role", "assistant"}, {"content", text}});
    }
    throw NoDiffInResponse("no unified diff in any of " + std::to_string(cfg.retries + 1) +
                           " response(s) from " + client.name() + " client");
}

std::string bundle_sha256(const promptgen::PromptBundle& bundle) {
    return sha256_hex(nlohmann::json(bundle).dump());
}

void record_transcript(const promptgen::PromptBundle& bundle,
                       const nlohmann::json& request,
                       const std::string& response,
                       const TokenUsage& usage,
                       const std::string& path) {
    nlohmann::json t = {{"bundle_sha256", bundle_sha256(bundle)},
                        {"request", request},
                        {"response", response},
                        {"usage", usage}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write transcript: " + path, ExitCode::Internal);
    out << t.dump(2) << '\n';
    if (!out) throw Error("short write on transcript: " + path, ExitCode::Internal);
}

void to_json(nlohmann::json& j, const TokenUsage& v) {
    j = {{"input_tokens", v.input_tokens}, {"output_tokens", v.output_tokens}};
}
void from_json(const nlohmann::json& j, TokenUsage& v) {
    j.at("input_tokens").get_to(v.input_tokens);
    j.at("output_tokens").get_to(v.output_tokens);
}

} // namespace memrepair::llmgw
