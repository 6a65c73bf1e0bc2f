#pragma once

#include <stdexcept>
#include <string>

namespace tdcosim {

enum class Errc {
    monotonicity,
    degenerate_nodes,
    not_primed,
    insufficient_data,
    collapse,
    config,
    protocol,
    handshake,
    io,
    zero_actual,
    undefined_normalization,
};

const char* errc_name(Errc code) noexcept;

/// Single exception type for the library; `code()` says which contract was broken.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code)
    {
    }

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace tdcosim
