#pragma once

#include <stdexcept>
#include <string>

namespace adaptchunk {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: bad sidecar, invalid span, unknown counter name.
class InputError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (exit code 2 at the CLI).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Network or service failure talking to an LLM or provider. Retriable.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace adaptchunk
