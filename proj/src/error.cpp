#include "plural/error.hpp"

namespace plural {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::AlreadyMember: return "AlreadyMember";
        case ErrorCode::InsufficientStanding: return "InsufficientStanding";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::TooSmall: return "TooSmall";
        case ErrorCode::FewerThanTwoBlocs: return "FewerThanTwoBlocs";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::NoAcceptedDeal: return "NoAcceptedDeal";
        case ErrorCode::Unregistered: return "Unregistered";
        case ErrorCode::InsufficientFunds: return "InsufficientFunds";
        case ErrorCode::EmptyCommunity: return "EmptyCommunity";
        case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

}  // namespace plural
