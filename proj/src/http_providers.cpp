#include "mrd/http_providers.hpp"

#include "mrd/error.hpp"
#include "mrd/image.hpp"

#include "httplib.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace mrd {

using nlohmann::json;

UrlParts parse_base_url(const std::string& url) {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0) {
        throw Error(ErrorCode::config_error, "provider URL must start with http://: '" + url + "'");
    }
    const std::string rest = url.substr(scheme.size());
    const auto slash = rest.find('/');
    const std::string authority = rest.substr(0, slash);
    std::string prefix = slash == std::string::npos ? "" : rest.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    const auto colon = authority.rfind(':');
    const std::string host = authority.substr(0, colon);
    if (host.empty()) throw Error(ErrorCode::config_error, "provider URL has no host: '" + url + "'");
    for (char c : host) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')) {
            throw Error(ErrorCode::config_error, "invalid host in provider URL '" + url + "'");
        }
    }
    if (colon != std::string::npos) {
        const std::string port = authority.substr(colon + 1);
        const bool digits = !port.empty() && port.size() <= 5 &&
                            std::all_of(port.begin(), port.end(),
                                        [](unsigned char c) { return std::isdigit(c) != 0; });
        if (!digits || std::stoi(port) < 1 || std::stoi(port) > 65535) {
            throw Error(ErrorCode::config_error, "invalid port in provider URL '" + url + "'");
        }
    }
    return {scheme + authority, prefix};
}

void ProviderEndpoint::validate() const {
    parse_base_url(base_url);
    if (timeout_ms < 1) throw Error(ErrorCode::config_error, "timeout_ms must be >= 1");
    if (retries < 0 || retries > 10) throw Error(ErrorCode::config_error, "retries must be in [0,10]");
    if (backoff_ms < 0) throw Error(ErrorCode::config_error, "backoff_ms must be >= 0");
}

ExtractionPrompt ExtractionPrompt::defaults() {
    return {
        "You extract detection targets from questions about an image. List the physical "
        "objects the question is about as short lowercase noun phrases. Leave out attributes, "
        "colors, positions and question words. Reply with a JSON array of strings only.",
        {
            {"What is the color of the woman's handbag?", {"handbag"}},
            {"Is the dog on the left or right side of the bicycle?", {"dog", "bicycle"}},
            {"What number is written on the red bus?", {"bus"}},
        }};
}

// ---------------------------------------------------------------------------
// Config

namespace {

ProviderEndpoint parse_endpoint(const json& j, const char* name) {
    if (!j.is_object()) throw Error(ErrorCode::config_error, std::string(name) + " must be an object");
    ProviderEndpoint e;
    try {
        e.base_url = j.at("base_url").get<std::string>();
        e.timeout_ms = j.value("timeout_ms", e.timeout_ms);
        e.retries = j.value("retries", e.retries);
        e.backoff_ms = j.value("backoff_ms", e.backoff_ms);
        if (j.contains("auth_token") && !j["auth_token"].is_null()) {
            e.auth_token = j["auth_token"].get<std::string>();
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::config_error, std::string(name) + ": " + ex.what());
    }
    e.validate();
    return e;
}

}  // namespace

EndpointConfig parse_endpoint_config(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::config_error, "provider config must be an object");
    EndpointConfig c;
    if (j.contains("embed")) c.embed = parse_endpoint(j["embed"], "embed");
    if (j.contains("detect")) c.detect = parse_endpoint(j["detect"], "detect");
    if (j.contains("extract")) c.extract = parse_endpoint(j["extract"], "extract");
    try {
        c.embed_dim = j.value("embed_dim", std::size_t{0});
        if (j.contains("system_prompt")) c.prompt.system = j["system_prompt"].get<std::string>();
        if (j.contains("examples")) {
            c.prompt.examples.clear();
            for (const auto& ex : j["examples"]) {
                c.prompt.examples.push_back(
                    {ex.at("query").get<std::string>(),
                     ex.at("objects").get<std::vector<std::string>>()});
            }
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::config_error, std::string("provider config: ") + ex.what());
    }
    return c;
}

void apply_env_overrides(EndpointConfig& config) {
    auto env = [](const char* name) -> std::optional<std::string> {
        const char* v = std::getenv(name);
        if (v == nullptr || *v == '\0') return std::nullopt;
        return std::string(v);
    };
    auto apply = [&](std::optional<ProviderEndpoint>& slot, const char* var) {
        if (auto url = env(var)) {
            if (!slot) slot = ProviderEndpoint{};
            slot->base_url = *url;
        }
    };
    apply(config.embed, "MRD_EMBED_URL");
    apply(config.detect, "MRD_DETECT_URL");
    apply(config.extract, "MRD_EXTRACT_URL");
    if (auto token = env("MRD_AUTH_TOKEN")) {
        for (auto* slot : {&config.embed, &config.detect, &config.extract}) {
            if (*slot) (*slot)->auth_token = *token;
        }
    }
    for (auto* slot : {&config.embed, &config.detect, &config.extract}) {
        if (*slot) (*slot)->validate();
    }
}

// ---------------------------------------------------------------------------
// Wire format

namespace wire {

namespace {

[[noreturn]] void protocol(const std::string& msg, const json& j) {
    throw Error(ErrorCode::protocol_error, msg, j.dump());
}

}  // namespace

json embed_text_request(const std::string& text) {
    return {{"kind", "text"}, {"payload", text}};
}

json embed_image_request(const std::string& png_base64) {
    return {{"kind", "image"}, {"payload", png_base64}};
}

Embedding parse_embed_response(const json& j, std::size_t declared_dim) {
    if (!j.is_object() || !j.contains("embedding") || !j["embedding"].is_array()) {
        protocol("embed response lacks an 'embedding' array", j);
    }
    Embedding e;
    for (const auto& v : j["embedding"]) {
        if (!v.is_number()) protocol("embedding holds a non-number", j);
        const double d = v.get<double>();
        if (!std::isfinite(d)) protocol("embedding holds a non-finite value", j);
        e.values.push_back(d);
    }
    if (e.values.empty()) protocol("empty embedding", j);
    if (!j.contains("dim") || !j["dim"].is_number_integer()) protocol("embed response lacks 'dim'", j);
    const auto dim = j["dim"].get<std::int64_t>();
    if (dim < 0 || static_cast<std::size_t>(dim) != e.dim()) {
        protocol("embedding length " + std::to_string(e.dim()) + " != dim " + std::to_string(dim), j);
    }
    if (declared_dim != 0 && e.dim() != declared_dim) {
        protocol("embedding dimension " + std::to_string(e.dim()) + " != declared " +
                     std::to_string(declared_dim),
                 j);
    }
    return e;
}

json embed_response(const Embedding& e) {
    return {{"embedding", e.values}, {"dim", e.dim()}};
}

json detect_request(const std::string& png_base64, const ObjectSet& labels, double threshold) {
    return {{"image", png_base64}, {"labels", labels.labels()}, {"threshold", threshold}};
}

std::vector<Detection> parse_detect_response(const json& j, int window_w, int window_h) {
    if (!j.is_object() || !j.contains("detections") || !j["detections"].is_array()) {
        protocol("detect response lacks a 'detections' array", j);
    }
    std::vector<Detection> out;
    for (const auto& d : j["detections"]) {
        double c[4];
        const char* keys[4] = {"x0", "y0", "x1", "y1"};
        for (int i = 0; i < 4; ++i) {
            if (!d.is_object() || !d.contains(keys[i]) || !d[keys[i]].is_number()) {
                protocol(std::string("detection lacks numeric '") + keys[i] + "'", j);
            }
            c[i] = d[keys[i]].get<double>();
            if (!std::isfinite(c[i])) protocol("non-finite box coordinate", j);
        }
        if (!d.contains("score") || !d["score"].is_number()) protocol("detection lacks 'score'", j);
        const double score = d["score"].get<double>();
        if (!(score >= 0.0 && score <= 1.0)) {
            protocol("detection score " + std::to_string(score) + " outside [0,1]", j);
        }
        auto clampi = [](double v, int hi) {
            return static_cast<int>(std::clamp(v, 0.0, static_cast<double>(hi)));
        };
        Detection det;
        det.box = {clampi(std::floor(c[0]), window_w), clampi(std::floor(c[1]), window_h),
                   clampi(std::ceil(c[2]), window_w), clampi(std::ceil(c[3]), window_h)};
        if (det.box.empty()) protocol("detection box has no area inside the window", j);
        det.score = score;
        det.label = d.value("label", std::string{});
        det.frame = BoxFrame::window_local;
        out.push_back(std::move(det));
    }
    return out;
}

json detect_response(const std::vector<Detection>& dets) {
    json arr = json::array();
    for (const auto& d : dets) {
        arr.push_back({{"x0", d.box.x0},
                       {"y0", d.box.y0},
                       {"x1", d.box.x1},
                       {"y1", d.box.y1},
                       {"score", d.score},
                       {"label", d.label}});
    }
    return {{"detections", arr}};
}

json extract_request(const ExtractionPrompt& prompt, const std::string& query) {
    json examples = json::array();
    for (const auto& ex : prompt.examples) {
        examples.push_back({{"query", ex.query}, {"objects", ex.objects}});
    }
    return {{"system", prompt.system}, {"examples", examples}, {"query", query}};
}

std::vector<std::string> parse_extract_response(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::protocol_error, "extract response is not JSON", body);
    const json* arr = &j;
    if (j.is_object()) {
        if (!j.contains("objects")) {
            throw Error(ErrorCode::protocol_error, "extract response lacks 'objects'", body);
        }
        arr = &j["objects"];
    }
    if (!arr->is_array()) {
        throw Error(ErrorCode::protocol_error, "extract response is not an array of strings", body);
    }
    std::vector<std::string> out;
    for (const auto& v : *arr) {
        if (!v.is_string()) {
            throw Error(ErrorCode::protocol_error, "extract response holds a non-string", body);
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

}  // namespace wire

// ---------------------------------------------------------------------------
// Transport

namespace {

json post_raw(const ProviderEndpoint& endpoint, const std::string& path, const json& body,
              std::string* raw_out) {
    const auto url = parse_base_url(endpoint.base_url);
    const std::string payload = body.dump();
    const auto timeout = std::chrono::milliseconds(endpoint.timeout_ms);
    const int attempts = endpoint.retries + 1;

    std::string last_error;
    int last_status = 0;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(endpoint.backoff_ms) * (1LL << (attempt - 2)));
        }
        httplib::Client client(url.scheme_host_port);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        httplib::Headers headers;
        if (endpoint.auth_token) headers.emplace("Authorization", "Bearer " + *endpoint.auth_token);

        auto res = client.Post(url.prefix + path, headers, payload, "application/json");
        if (!res) {
            last_status = 0;
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            last_status = res->status;
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (raw_out != nullptr) *raw_out = res->body;
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded()) {
            throw Error(ErrorCode::protocol_error, "response from " + path + " is not JSON",
                        res->body);
        }
        return parsed;
    }
    throw Error(ErrorCode::provider_error,
                "POST " + endpoint.base_url + path + " failed after " + std::to_string(attempts) +
                    " attempt(s): " + last_error,
                "status=" + std::to_string(last_status) + " attempts=" + std::to_string(attempts));
}

std::string crop_png_base64(const CropView& crop) {
    if (crop.image == nullptr) {
        invalid_argument("HTTP providers need image pixels; geometry-only runs are not supported");
    }
    return base64_encode(encode_png(*crop.image, crop.rect));
}

}  // namespace

json post_json(const ProviderEndpoint& endpoint, const std::string& path, const json& body) {
    return post_raw(endpoint, path, body, nullptr);
}

Embedding embed_query(const ProviderEndpoint& endpoint, const std::string& text,
                      std::size_t declared_dim) {
    return wire::parse_embed_response(
        post_json(endpoint, "/v1/embed", wire::embed_text_request(text)), declared_dim);
}

std::vector<Embedding> embed_crops(const ProviderEndpoint& endpoint,
                                   std::span<const CropView> crops, std::size_t declared_dim) {
    std::vector<Embedding> out;
    out.reserve(crops.size());
    for (const auto& crop : crops) {
        out.push_back(wire::parse_embed_response(
            post_json(endpoint, "/v1/embed", wire::embed_image_request(crop_png_base64(crop))),
            declared_dim));
        if (out.back().dim() != out.front().dim()) {
            throw Error(ErrorCode::protocol_error, "embedding dimensions differ within a batch");
        }
    }
    return out;
}

std::vector<Detection> detect_in_window(const ProviderEndpoint& endpoint, const CropView& window,
                                        const ObjectSet& labels, double threshold) {
    if (labels.size() == 0) invalid_argument("detection needs at least one label");
    const auto j = post_json(endpoint, "/v1/detect",
                             wire::detect_request(crop_png_base64(window), labels, threshold));
    return wire::parse_detect_response(j, window.rect.width(), window.rect.height());
}

std::vector<std::string> extract_objects_llm(const ProviderEndpoint& endpoint,
                                             const ExtractionPrompt& prompt,
                                             const std::string& query) {
    if (trim(query).empty()) invalid_argument("query must be non-empty");
    std::string raw;
    try {
        post_raw(endpoint, "/v1/extract", wire::extract_request(prompt, query), &raw);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::protocol_error) throw;
    }
    return wire::parse_extract_response(raw);
}

namespace {

class HttpEmbedder final : public EmbeddingProvider {
public:
    HttpEmbedder(ProviderEndpoint e, std::size_t dim) : endpoint_(std::move(e)), dim_(dim) {}
    Embedding embed_query(const Query& q) override {
        return mrd::embed_query(endpoint_, q.text(), dim_);
    }
    std::vector<Embedding> embed_crops(std::span<const CropView> crops) override {
        return mrd::embed_crops(endpoint_, crops, dim_);
    }

private:
    ProviderEndpoint endpoint_;
    std::size_t dim_;
};

class HttpDetector final : public DetectorProvider {
public:
    explicit HttpDetector(ProviderEndpoint e) : endpoint_(std::move(e)) {}
    std::vector<Detection> detect(const CropView& window, const ObjectSet& labels,
                                  double threshold) override {
        return detect_in_window(endpoint_, window, labels, threshold);
    }

private:
    ProviderEndpoint endpoint_;
};

class HttpExtractor final : public ObjectExtractorProvider {
public:
    HttpExtractor(ProviderEndpoint e, ExtractionPrompt p)
        : endpoint_(std::move(e)), prompt_(std::move(p)) {}
    std::vector<std::string> extract(const Query& q) override {
        return extract_objects_llm(endpoint_, prompt_, q.text());
    }

private:
    ProviderEndpoint endpoint_;
    ExtractionPrompt prompt_;
};

}  // namespace

Providers http_providers(const EndpointConfig& config) {
    Providers p;
    if (config.embed) p.embedder = std::make_shared<HttpEmbedder>(*config.embed, config.embed_dim);
    if (config.detect) p.detector = std::make_shared<HttpDetector>(*config.detect);
    if (config.extract) {
        p.extractor = std::make_shared<HttpExtractor>(*config.extract, config.prompt);
    }
    return p;
}

}  // namespace mrd
