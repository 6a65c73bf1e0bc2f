#include "tdcosim/error.hpp"

namespace tdcosim {

const char* errc_name(Errc code) noexcept
{
    switch (code) {
    case Errc::monotonicity: return "monotonicity";
    case Errc::degenerate_nodes: return "degenerate_nodes";
    case Errc::not_primed: return "not_primed";
    case Errc::insufficient_data: return "insufficient_data";
    case Errc::collapse: return "collapse";
    case Errc::config: return "config";
    case Errc::protocol: return "protocol";
    case Errc::handshake: return "handshake";
    case Errc::io: return "io";
    case Errc::zero_actual: return "zero_actual";
    case Errc::undefined_normalization: return "undefined_normalization";
    }
    return "unknown";
}

} // namespace tdcosim
