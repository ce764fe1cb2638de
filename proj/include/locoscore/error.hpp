#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace locoscore {

/// Base class of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed input line or document. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(std::string source, std::size_t line, std::string field, const std::string& what)
        : Error(format(source, line, field, what)),
          source_(std::move(source)), line_(line), field_(std::move(field)) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    static std::string format(const std::string& source, std::size_t line,
                              const std::string& field, const std::string& what) {
        std::string out = source.empty() ? "<input>" : source;
        if (line > 0) out += ":" + std::to_string(line);
        if (!field.empty()) out += " [" + field + "]";
        return out + ": " + what;
    }

    std::string source_;
    std::size_t line_;
    std::string field_;
};

/// Invalid weight configuration. Carries every violation found, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid configuration";
        for (const auto& s : v) out += "\n  - " + s;
        return out;
    }

    std::vector<std::string> violations_;
};

/// Statistical test cannot be run on the given sample (too small, zero variance).
class UntestableError : public Error {
public:
    using Error::Error;
};

/// Fewer than two techniques left to compare.
class SubsetError : public Error {
public:
    using Error::Error;
};

}  // namespace locoscore
