#pragma once

#include "mrd/providers.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mrd {

struct ProviderEndpoint {
    std::string base_url;  // http://host[:port][/prefix]
    int timeout_ms = 30000;
    int retries = 2;
    std::optional<std::string> auth_token;
    int backoff_ms = 100;  // first retry delay; doubles each attempt

    void validate() const;
};

/// Parsed form of base_url.
struct UrlParts {
    std::string scheme_host_port;  // "http://host:port"
    std::string prefix;            // "" or "/prefix" without trailing slash
};
UrlParts parse_base_url(const std::string& url);

struct ExtractionExample {
    std::string query;
    std::vector<std::string> objects;
};

struct ExtractionPrompt {
    std::string system;
    std::vector<ExtractionExample> examples;

    static ExtractionPrompt defaults();
};

struct EndpointConfig {
    std::optional<ProviderEndpoint> embed;
    std::optional<ProviderEndpoint> detect;
    std::optional<ProviderEndpoint> extract;
    std::size_t embed_dim = 0;  // 0: accept whatever the service declares
    ExtractionPrompt prompt = ExtractionPrompt::defaults();
};

/// Reads {embed: {...}, detect: {...}, extract: {...}, embed_dim, system_prompt,
/// examples} and validates every endpoint.
EndpointConfig parse_endpoint_config(const nlohmann::json& j);

/// MRD_EMBED_URL, MRD_DETECT_URL, MRD_EXTRACT_URL and MRD_AUTH_TOKEN win over
/// file values.
void apply_env_overrides(EndpointConfig& config);

// Wire messages -------------------------------------------------------------

namespace wire {

nlohmann::json embed_text_request(const std::string& text);
nlohmann::json embed_image_request(const std::string& png_base64);
/// {embedding: [...], dim: N}. declared_dim 0 skips the declared check.
Embedding parse_embed_response(const nlohmann::json& j, std::size_t declared_dim);
nlohmann::json embed_response(const Embedding& e);

nlohmann::json detect_request(const std::string& png_base64, const ObjectSet& labels,
                              double threshold);
/// Boxes are clamped to the window; scores outside [0,1] or boxes with no
/// area inside the window are protocol errors.
std::vector<Detection> parse_detect_response(const nlohmann::json& j, int window_w,
                                             int window_h);
nlohmann::json detect_response(const std::vector<Detection>& dets);

nlohmann::json extract_request(const ExtractionPrompt& prompt, const std::string& query);
/// Accepts {objects: [...]} or a bare array; anything else is a protocol
/// error with the raw body in Error::detail().
std::vector<std::string> parse_extract_response(const std::string& body);

}  // namespace wire

// Blocking calls --------------------------------------------------------------

/// POSTs JSON with retries and exponential backoff. Transport failures and
/// non-2xx statuses become provider_error after retries + 1 attempts; an
/// unparsable body is a protocol_error.
nlohmann::json post_json(const ProviderEndpoint& endpoint, const std::string& path,
                         const nlohmann::json& body);

Embedding embed_query(const ProviderEndpoint& endpoint, const std::string& text,
                      std::size_t declared_dim = 0);
std::vector<Embedding> embed_crops(const ProviderEndpoint& endpoint,
                                   std::span<const CropView> crops, std::size_t declared_dim = 0);
std::vector<Detection> detect_in_window(const ProviderEndpoint& endpoint, const CropView& window,
                                        const ObjectSet& labels, double threshold);
std::vector<std::string> extract_objects_llm(const ProviderEndpoint& endpoint,
                                             const ExtractionPrompt& prompt,
                                             const std::string& query);

/// Providers for every configured endpoint; missing ones stay null.
Providers http_providers(const EndpointConfig& config);

}  // namespace mrd
