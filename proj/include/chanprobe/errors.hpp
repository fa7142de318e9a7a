#pragma once

#include <stdexcept>
#include <string>

namespace chanprobe {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Conversions and characterization.
class DomainError : public Error { using Error::Error; };
class FitError : public Error { using Error::Error; };
class CharacterizationError : public Error { using Error::Error; };
class ExtrapolationError : public Error { using Error::Error; };
class InversionError : public Error { using Error::Error; };
class CatalogError : public Error { using Error::Error; };

// Link simulation.
class LinkError : public Error { using Error::Error; };
class PowerBudgetError : public Error { using Error::Error; };

// Probing pipeline.
class SourceError : public Error { using Error::Error; };
class EngineError : public Error { using Error::Error; };
class RegimeError : public Error { using Error::Error; };

/// Malformed input document. The message starts with a JSON-pointer-style location.
class SchemaError : public Error {
public:
    SchemaError(const std::string& location, const std::string& what)
        : Error(location + ": " + what), location_(location) {}

    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

} // namespace chanprobe
