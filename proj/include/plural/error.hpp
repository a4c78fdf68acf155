#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plural {

enum class ErrorCode {
    InvalidArgument,
    NotFound,
    AlreadyMember,
    InsufficientStanding,
    DegenerateInput,
    TooSmall,
    FewerThanTwoBlocs,
    InsufficientData,
    NoAcceptedDeal,
    Unregistered,
    InsufficientFunds,
    EmptyCommunity,
    Config,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Raised while loading or validating a scenario; `path` is a JSON pointer
// into the offending document.
class ConfigError : public Error {
public:
    ConfigError(std::string path, const std::string& message)
        : Error(ErrorCode::Config, path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
    if (!condition) fail(code, what);
}

}  // namespace plural
