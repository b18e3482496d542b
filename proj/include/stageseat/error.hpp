#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stageseat {

// One code per failure the services can report. The API layer maps each code
// to an HTTP status; the machine string is the code name itself.
enum class ErrorCode {
    OutOfRange,
    ParseError,
    DiscountExceedsSubtotal,
    FormatError,
    UnknownMovie,
    UnknownVenue,
    UnknownShow,
    UnknownUser,
    UnknownReview,
    PastShowtime,
    SeatTaken,
    Houseful,
    ShowStarted,
    InvalidSeat,
    InsufficientCoins,
    NotFound,
    NotOwner,
    AlreadyCancelled,
    TooLateToCancel,
    AlreadyRewarded,
    DuplicateReview,
    InvalidQuery,
    InvalidWindow,
    ConstraintViolation,
    Conflict,
    ImportIntoNonEmptyStore,
    MalformedLine,
    DuplicateUsername,
    DuplicateEmail,
    WeakPassword,
    InvalidCredentials,
    Unauthorized,
    Forbidden,
    BadRequest,
    RouteNotFound,
    MethodNotAllowed,
    TargetUnreachable,
    ConfigError,
    EmptySample,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace stageseat
