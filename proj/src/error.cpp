#include "stageseat/error.hpp"

namespace stageseat {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DiscountExceedsSubtotal: return "DiscountExceedsSubtotal";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::UnknownMovie: return "UnknownMovie";
    case ErrorCode::UnknownVenue: return "UnknownVenue";
    case ErrorCode::UnknownShow: return "UnknownShow";
    case ErrorCode::UnknownUser: return "UnknownUser";
    case ErrorCode::UnknownReview: return "UnknownReview";
    case ErrorCode::PastShowtime: return "PastShowtime";
    case ErrorCode::SeatTaken: return "SeatTaken";
    case ErrorCode::Houseful: return "Houseful";
    case ErrorCode::ShowStarted: return "ShowStarted";
    case ErrorCode::InvalidSeat: return "InvalidSeat";
    case ErrorCode::InsufficientCoins: return "InsufficientCoins";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::NotOwner: return "NotOwner";
    case ErrorCode::AlreadyCancelled: return "AlreadyCancelled";
    case ErrorCode::TooLateToCancel: return "TooLateToCancel";
    case ErrorCode::AlreadyRewarded: return "AlreadyRewarded";
    case ErrorCode::DuplicateReview: return "DuplicateReview";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::InvalidWindow: return "InvalidWindow";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::ImportIntoNonEmptyStore: return "ImportIntoNonEmptyStore";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::DuplicateUsername: return "DuplicateUsername";
    case ErrorCode::DuplicateEmail: return "DuplicateEmail";
    case ErrorCode::WeakPassword: return "WeakPassword";
    case ErrorCode::InvalidCredentials: return "InvalidCredentials";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::Forbidden: return "Forbidden";
    case ErrorCode::BadRequest: return "BadRequest";
    case ErrorCode::RouteNotFound: return "RouteNotFound";
    case ErrorCode::MethodNotAllowed: return "MethodNotAllowed";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::Internal: return "Internal";
    }
    return "Internal";
}

} // namespace stageseat
