#pragma once

#include <stdexcept>
#include <string>

namespace fedadapt {

enum class ErrorCategory {
    InvalidArgument,  // precondition violated by the caller
    Config,           // malformed or inconsistent configuration
    Io,               // filesystem failures
    Checkpoint,       // unreadable or incompatible agent checkpoint
    Scenario,         // scenario/strategy/checkpoint mismatch at run time
    Numeric,          // NaN or divergence inside a solver/update
};

inline const char* category_name(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::InvalidArgument: return "invalid_argument";
        case ErrorCategory::Config: return "config";
        case ErrorCategory::Io: return "io";
        case ErrorCategory::Checkpoint: return "checkpoint";
        case ErrorCategory::Scenario: return "scenario";
        case ErrorCategory::Numeric: return "numeric";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const { return category_; }

private:
    ErrorCategory category_;
};

inline void require(bool condition, ErrorCategory category, const std::string& message) {
    if (!condition) throw Error(category, message);
}

}  // namespace fedadapt
