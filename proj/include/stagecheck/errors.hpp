#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace stagecheck {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownSprite : public Error {
public:
    explicit UnknownSprite(const std::string& name)
        : Error("unknown sprite '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnknownVariable : public Error {
public:
    explicit UnknownVariable(const std::string& name)
        : Error("unknown variable '" + name + "'"), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

struct SourcePos {
    int line = 0;
    int column = 0;
};

// Raised by the trigger lexer/parser and the program loader.
class ParseError : public Error {
public:
    ParseError(SourcePos pos, const std::string& message, std::vector<std::string> expected = {})
        : Error(format(pos, message, expected)), pos_(pos), message_(message),
          expected_(std::move(expected)) {}

    SourcePos pos() const noexcept { return pos_; }
    const std::string& message() const noexcept { return message_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    static std::string format(SourcePos pos, const std::string& message,
                              const std::vector<std::string>& expected) {
        std::string out = std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + message;
        if (!expected.empty()) {
            out += " (expected ";
            for (std::size_t i = 0; i < expected.size(); ++i) {
                if (i) out += i + 1 == expected.size() ? " or " : ", ";
                out += expected[i];
            }
            out += ")";
        }
        return out;
    }

    SourcePos pos_;
    std::string message_;
    std::vector<std::string> expected_;
};

class DuplicateTriggerId : public ParseError {
public:
    DuplicateTriggerId(SourcePos pos, const std::string& id)
        : ParseError(pos, "duplicate trigger id '" + id + "'"), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class UnknownReference : public Error {
public:
    using Error::Error;
};

class TypeMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace stagecheck
