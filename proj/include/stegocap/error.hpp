#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stegocap {

enum class ErrorCode {
    NegativeProbability,
    DuplicateToken,
    IdOutOfRange,
    MassOutOfBounds,
    EmptyDistribution,
    InvalidParams,
    TokenNotInPool,
    MessageTooLong,
    InvalidHex,
    UnknownBackend,
    BackendUnavailable,
    StepLimitExceeded,
    ReplayExhausted,
    BridgeProtocolError,
    CapacityExceeded,
    IncompleteMessage,
    EmptyOutput,
    ZeroProbabilityToken,
    InvalidStegoFile,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace stegocap
