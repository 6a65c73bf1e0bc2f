#pragma once

#include "tdcosim/cosim.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace tdcosim::wire {

inline constexpr std::uint8_t kVersion = 0x01;
inline constexpr std::size_t kHeaderSize = 12;  // magic(4) version(1) type(1) seq(4) len(2)

enum class MsgType : std::uint8_t { Handshake = 0x01, TxToDx = 0x02, DxToTx = 0x03, End = 0x04 };

struct Handshake {
    double t_t = 0.0;
    double t_d = 0.0;
    double duration = 0.0;
    bool operator==(const Handshake&) const = default;
};

struct DxToTx {
    double t = 0.0;
    double p_kw = 0.0;
    double q_kvar = 0.0;
    double p_avail_kw = 0.0;
    bool operator==(const DxToTx&) const = default;
};

struct End {
    double t = 0.0;
    bool operator==(const End&) const = default;
};

using Message = std::variant<Handshake, TxToDx, DxToTx, End>;

struct Frame {
    std::uint32_t seq = 0;
    Message msg;
};

MsgType type_of(const Message& m) noexcept;
/// Number of float64 fields carried by a message type; throws Errc::protocol
/// for an unknown type byte.
std::size_t field_count(std::uint8_t type);

std::vector<std::uint8_t> encode(const Frame& f);
/// Validates magic, version, type and payload length. Throws Errc::protocol.
Frame decode(std::span<const std::uint8_t> bytes);

/// Payload length announced by a 12-byte header (after validating it).
std::size_t payload_length(std::span<const std::uint8_t> header);

/// Checks that the peer's timesteps describe the same lockstep grid:
/// identical t_t, t_d and duration and an integer ratio. Throws
/// Errc::handshake.
void check_handshake(const Handshake& ours, const Handshake& theirs);

Handshake handshake_for(const ScenarioConfig& cfg);

/// Connected, blocking TCP stream. Move-only; closes on destruction.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) noexcept : fd_(fd) {}
    Socket(Socket&& o) noexcept;
    Socket& operator=(Socket&& o) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket();

    bool valid() const noexcept { return fd_ >= 0; }
    int fd() const noexcept { return fd_; }
    void close() noexcept;

    /// Throws Errc::io on failure.
    void write_all(std::span<const std::uint8_t> bytes);
    /// Reads exactly bytes.size() bytes; throws Errc::io on error or EOF.
    void read_exact(std::span<std::uint8_t> bytes);

private:
    int fd_ = -1;
};

/// Listening TCP socket bound to host:port (port 0 picks a free one).
class Listener {
public:
    Listener(const std::string& host, std::uint16_t port);
    std::uint16_t port() const noexcept { return port_; }
    Socket accept();

private:
    Socket sock_;
    std::uint16_t port_ = 0;
};

/// Connects to host:port, retrying refused connections for up to
/// `retry_ms` milliseconds. Throws Errc::io.
Socket connect_to(const std::string& host, std::uint16_t port, int retry_ms = 0);

/// Framed, sequence-checked message stream over a socket. Sequence numbers
/// start at 1 in each direction and must increase by exactly one.
class Session {
public:
    explicit Session(Socket sock) : sock_(std::move(sock)) {}

    void send(const Message& m);
    Message receive();

    std::uint32_t sent() const noexcept { return send_seq_; }
    std::uint32_t received() const noexcept { return recv_seq_; }
    Socket& socket() noexcept { return sock_; }

    /// Sends a frame with an explicit sequence number (fault injection).
    void send_raw(const Frame& f);

private:
    Socket sock_;
    std::uint32_t send_seq_ = 0;
    std::uint32_t recv_seq_ = 0;
};

/// Transmission side of a two-process run. The returned trace holds the
/// coarse series; on peer loss or collapse `ok` is false and the trace is
/// partial. Handshake mismatches throw.
RunTrace run_tx_node(const ScenarioConfig& cfg, Session& session);

/// Distribution side; the returned trace holds the fine series and verdicts.
RunTrace run_dx_node(const ScenarioConfig& cfg, Session& session);

} // namespace tdcosim::wire
