#pragma once

#include <stdexcept>
#include <string>

namespace tiersim {

enum class error_code {
    syntax,
    validation,
    domain,
    io,
    series_disabled,
    internal,
};

const char* to_string(error_code code) noexcept;

// Every failure surfaced by the library carries one of the codes above so the
// CLI can map it onto a stable exit status.
class error : public std::runtime_error {
public:
    error(error_code code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    error_code code() const noexcept { return code_; }

private:
    error_code code_;
};

}  // namespace tiersim
