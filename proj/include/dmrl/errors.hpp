#pragma once

#include <stdexcept>
#include <string>

namespace dmrl {

// Each failure class maps to one kind of caller mistake so tests and the CLI
// can tell them apart.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct UsageError : Error { using Error::Error; };
struct ShapeError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct CatalogError : Error { using Error::Error; };
struct VersionError : Error { using Error::Error; };

}  // namespace dmrl
