#pragma once

#include <stdexcept>
#include <string>

namespace cnnrules {

// Broken caller-side precondition (shape mismatch, vocab mismatch, ...).
struct ContractViolation : std::logic_error {
    explicit ContractViolation(const std::string& msg) : std::logic_error(msg) {}
};

// Invalid configuration value or degenerate input the pipeline cannot work with.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Missing or unreadable input file/directory.
struct IngestionError : std::runtime_error {
    explicit IngestionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally invalid binary or text artifact (checkpoint, vocab file, ...).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Line-oriented parse failure; message carries the line number.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cnnrules
