#pragma once

#include <stdexcept>
#include <string>

namespace sarsub {

enum class ErrorKind {
    io,
    validation,
    bad_magic,
    truncated,
    unknown_dtype,
    malformed_header,
    trailing_data,
    external_failure,
    protocol_violation,
    timeout,
    numeric,
};

const char* to_string(ErrorKind kind);

// Process exit code for the failure class a kind belongs to.
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorKind::validation, what);
}

}  // namespace sarsub
