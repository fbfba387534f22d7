#pragma once

#include <stdexcept>
#include <string>

namespace mrd {

enum class ErrorCode {
    invalid_argument,
    degenerate_input,
    provider_error,
    protocol_error,
    io_error,
    config_error,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the engine. `stage` names the pipeline step that
/// failed (empty outside run_pipeline); `detail` carries extra context such
/// as a raw provider payload.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::string detail = {})
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& stage() const noexcept { return stage_; }
    const std::string& detail() const noexcept { return detail_; }

    Error with_stage(std::string stage) const {
        Error e(*this);
        e.stage_ = std::move(stage);
        return e;
    }

private:
    ErrorCode code_;
    std::string stage_;
    std::string detail_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

[[noreturn]] inline void invalid_argument(const std::string& message) {
    throw Error(ErrorCode::invalid_argument, message);
}

}  // namespace mrd
