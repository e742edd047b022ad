#pragma once

#include <stdexcept>
#include <string>

namespace pcaad {

enum class ErrorCode {
    // address / layout
    MalformedAddress,
    BitRangeError,
    DuplicateField,
    DuplicateFbName,
    FieldUnknown,
    // wire codec
    BadMagic,
    BadVersion,
    TruncatedFrame,
    OversizePayload,
    TrailingBytes,
    BadArea,
    LengthFieldInvalid,
    NonAscii,
    CrcMismatch,
    // transport / server status
    BlockNotFound,
    OutOfRange,
    Malformed,
    Refused,
    Timeout,
    ConnectionFailed,
    ProtocolError,
    // config
    ConfigInvalid,
    // enumeration / attacks
    MethodUnavailable,
    NoSuchTarget,
    DanglingIndirect,
    // covert channel
    NoViableChannel,
    ChannelTimeout,
    SyncViolation,
};

const char* error_code_name(ErrorCode code);

// Single exception type for the whole library; tests and the CLI dispatch on code().
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

} // namespace pcaad
