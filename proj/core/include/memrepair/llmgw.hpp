#pragma once

#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "memrepair/promptgen.hpp"

namespace memrepair::llmgw {

struct ModelConfig {
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    std::string model_name = "gpt-4o";
    std::string api_key_env_var = "MEMREPAIR_API_KEY";
    double temperature = 0.0; // [0, 2]
    int max_output_tokens = 4096;
    int request_timeout_seconds = 120;
    int retries = 2; // corrective re-asks when no diff comes back
    bool multi_turn = false;

    bool operator==(const ModelConfig&) const = default;
};

struct TokenUsage {
    long input_tokens = 0;
    long output_tokens = 0;

    bool operator==(const TokenUsage&) const = default;
};

struct PatchProposal {
    std::string raw_text;
    std::string explanation;
    std::vector<std::string> diff_blocks;
    TokenUsage usage;

    bool operator==(const PatchProposal&) const = default;
};

/// One chat exchange. Clients never mutate the bundle; the request's
/// message order equals the bundle's segment order.
class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual std::string name() const = 0;
    /// Sends one request; returns the raw completion text and token usage.
    virtual std::pair<std::string, TokenUsage> send(const promptgen::PromptBundle& bundle,
                                                    const nlohmann::json& messages,
                                                    const ModelConfig& cfg) = 0;
};

/// Chat-completion HTTP client (vendor-neutral request shape). The API key
/// is read from the environment variable named in the config.
std::unique_ptr<LlmClient> make_http_client();

/// Returns the canned responses in order, repeating the last one.
std::unique_ptr<LlmClient> make_mock_client(std::vector<std::string> canned_responses);
std::unique_ptr<LlmClient> make_mock_client_from_files(const std::vector<std::string>& paths);

/// Replays recorded transcripts in order; refuses a transcript whose
/// bundle hash does not match the bundle being completed.
std::unique_ptr<LlmClient> make_replay_client(std::vector<std::string> transcript_paths);

/// Builds the messages array for a bundle: the role segment as the system
/// message, the remaining segments as user content (one message by
/// default, one per segment in multi-turn mode).
nlohmann::json build_messages(const promptgen::PromptBundle& bundle, bool multi_turn);

/// Runs the exchange, re-asking with a corrective instruction up to
/// cfg.retries times when the response carries no diff block. Usage
/// accumulates across attempts.
PatchProposal complete(const promptgen::PromptBundle& bundle, const ModelConfig& cfg, LlmClient& client);

/// Splits a raw completion into fenced unified-diff blocks and the
/// surrounding explanation prose.
PatchProposal parse_proposal(const std::string& raw_text);

/// SHA-256 of the bundle's canonical JSON serialization, hex-encoded.
std::string bundle_sha256(const promptgen::PromptBundle& bundle);

/// Writes {bundle_sha256, request, response, usage} for later replay.
void record_transcript(const promptgen::PromptBundle& bundle,
                       const nlohmann::json& request,
                       const std::string& response,
                       const TokenUsage& usage,
                       const std::string& path);

void to_json(nlohmann::json& j, const TokenUsage& v);
void from_json(const nlohmann::json& j, TokenUsage& v);

} // namespace memrepair::llmgw
