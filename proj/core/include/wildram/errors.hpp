#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wildram {

// Every checked failure in the library carries a stable machine-readable
// code (e.g. "TauExceedsSigma") next to the human-readable message.  Tests
// and the CLI dispatch on the code; the message is free-form.
class ToolkitError : public std::runtime_error {
public:
    ToolkitError(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& what) {
    throw ToolkitError(std::move(code), what);
}

} // namespace wildram
