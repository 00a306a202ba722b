#include "sarsub/error.hpp"

namespace sarsub {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::validation: return "validation";
    case ErrorKind::bad_magic: return "bad_magic";
    case ErrorKind::truncated: return "truncated";
    case ErrorKind::unknown_dtype: return "unknown_dtype";
    case ErrorKind::malformed_header: return "malformed_header";
    case ErrorKind::trailing_data: return "trailing_data";
    case ErrorKind::external_failure: return "external_failure";
    case ErrorKind::protocol_violation: return "protocol_violation";
    case ErrorKind::timeout: return "timeout";
    case ErrorKind::numeric: return "numeric";
    }
    return "unknown";
}

int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::io: return 2;
    case ErrorKind::validation: return 3;
    case ErrorKind::external_failure:
    case ErrorKind::protocol_violation:
    case ErrorKind::timeout: return 4;
    case ErrorKind::numeric: return 5;
    case ErrorKind::bad_magic:
    case ErrorKind::truncated:
    case ErrorKind::unknown_dtype:
    case ErrorKind::malformed_header:
    case ErrorKind::trailing_data: return 6;
    }
    return 1;
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace sarsub
