#include <stegocap/error.hpp>

namespace stegocap {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::DuplicateToken: return "DuplicateToken";
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::MassOutOfBounds: return "MassOutOfBounds";
    case ErrorCode::EmptyDistribution: return "EmptyDistribution";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::TokenNotInPool: return "TokenNotInPool";
    case ErrorCode::MessageTooLong: return "MessageTooLong";
    case ErrorCode::InvalidHex: return "InvalidHex";
    case ErrorCode::UnknownBackend: return "UnknownBackend";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::ReplayExhausted: return "ReplayExhausted";
    case ErrorCode::BridgeProtocolError: return "BridgeProtocolError";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::IncompleteMessage: return "IncompleteMessage";
    case ErrorCode::EmptyOutput: return "EmptyOutput";
    case ErrorCode::ZeroProbabilityToken: return "ZeroProbabilityToken";
    case ErrorCode::InvalidStegoFile: return "InvalidStegoFile";
    }
    return "Unknown";
}

}  // namespace stegocap
