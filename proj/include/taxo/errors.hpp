#pragma once

#include <stdexcept>
#include <string>

namespace taxo {

/// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed document text: JSON syntax errors, wrong types, unknown or
/// missing keys. Carries a human-readable position where applicable.
struct ParseError : Error {
    using Error::Error;
};

/// Compact-code decoding failure (wrong length, illegal symbol).
struct CodecError : Error {
    using Error::Error;
};

/// A registry id that does not exist in the store.
struct NotFoundError : Error {
    using Error::Error;
};

/// The store's writer lock could not be acquired within the timeout.
struct LockTimeoutError : Error {
    using Error::Error;
};

/// Store-level fault: malformed journal, I/O failure, misuse of a
/// read-only handle.
struct StoreError : Error {
    using Error::Error;
};

}  // namespace taxo
