#include "tdcosim/wire.hpp"

#include "tdcosim/error.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <thread>

namespace tdcosim::wire {

namespace {

constexpr std::uint8_t kMagic[4] = {'T', 'D', 'C', 'S'};

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v)
{
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& b, double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p)
{
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

double get_f64(const std::uint8_t* p)
{
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

std::string sys_error(const std::string& what)
{
    return what + ": " + std::strerror(errno);
}

sockaddr_in resolve(const std::string& host, std::uint16_t port)
{
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1) return addr;
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
        throw Error(Errc::io, "cannot resolve host '" + host + "'");
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
    return addr;
}

void set_nodelay(int fd)
{
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

} // namespace

MsgType type_of(const Message& m) noexcept
{
    return static_cast<MsgType>(m.index() + 1);
}

std::size_t field_count(std::uint8_t type)
{
    switch (type) {
    case 0x01: return 3;
    case 0x02: return 4;
    case 0x03: return 4;
    case 0x04: return 1;
    default: throw Error(Errc::protocol, "unknown message type 0x" + std::to_string(type));
    }
}

std::vector<std::uint8_t> encode(const Frame& f)
{
    std::vector<std::uint8_t> b;
    const auto type = static_cast<std::uint8_t>(type_of(f.msg));
    const std::size_t n = field_count(type);
    b.reserve(kHeaderSize + 8 * n);
    b.insert(b.end(), std::begin(kMagic), std::end(kMagic));
    b.push_back(kVersion);
    b.push_back(type);
    put_u32(b, f.seq);
    put_u16(b, static_cast<std::uint16_t>(8 * n));
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Handshake>) {
                for (double v : {m.t_t, m.t_d, m.duration}) put_f64(b, v);
            } else if constexpr (std::is_same_v<T, TxToDx>) {
                for (double v : {m.t, m.v_mag, m.theta, m.p_sfr_request_kw}) put_f64(b, v);
            } else if constexpr (std::is_same_v<T, DxToTx>) {
                for (double v : {m.t, m.p_kw, m.q_kvar, m.p_avail_kw}) put_f64(b, v);
            } else {
                put_f64(b, m.t);
            }
        },
        f.msg);
    return b;
}

std::size_t payload_length(std::span<const std::uint8_t> h)
{
    if (h.size() < kHeaderSize) throw Error(Errc::protocol, "truncated header");
    if (std::memcmp(h.data(), kMagic, 4) != 0) throw Error(Errc::protocol, "bad magic");
    if (h[4] != kVersion) throw Error(Errc::protocol, "unsupported version " + std::to_string(h[4]));
    const std::size_t expected = 8 * field_count(h[5]);
    const std::size_t len = static_cast<std::size_t>(h[10]) | (static_cast<std::size_t>(h[11]) << 8);
    if (len != expected)
        throw Error(Errc::protocol,
                    "payload length " + std::to_string(len) + " does not match type (" + std::to_string(expected) + ")");
    return len;
}

Frame decode(std::span<const std::uint8_t> bytes)
{
    const std::size_t len = payload_length(bytes);
    if (bytes.size() != kHeaderSize + len) throw Error(Errc::protocol, "frame length mismatch");
    Frame f;
    f.seq = get_u32(bytes.data() + 6);
    const std::uint8_t* p = bytes.data() + kHeaderSize;
    auto at = [p](int i) { return get_f64(p + 8 * i); };
    switch (bytes[5]) {
    case 0x01: f.msg = Handshake{at(0), at(1), at(2)}; break;
    case 0x02: f.msg = TxToDx{at(0), at(1), at(2), at(3)}; break;
    case 0x03: f.msg = DxToTx{at(0), at(1), at(2), at(3)}; break;
    default: f.msg = End{at(0)}; break;
    }
    return f;
}

Handshake handshake_for(const ScenarioConfig& cfg)
{
    return {cfg.t_t, cfg.t_d, cfg.duration};
}

void check_handshake(const Handshake& ours, const Handshake& theirs)
{
    try {
        (void)timestep_ratio(theirs.t_t, theirs.t_d);
    } catch (const Error& e) {
        throw Error(Errc::handshake, std::string("peer timesteps rejected: ") + e.what());
    }
    if (!(theirs.duration > 0.0)) throw Error(Errc::handshake, "peer duration must be positive");
    if (!(ours == theirs)) {
        throw Error(Errc::handshake, "scenario mismatch: peer has t_t=" + std::to_string(theirs.t_t) +
                                         " t_d=" + std::to_string(theirs.t_d) +
                                         " duration=" + std::to_string(theirs.duration));
    }
}

Socket::Socket(Socket&& o) noexcept : fd_(o.fd_)
{
    o.fd_ = -1;
}

Socket& Socket::operator=(Socket&& o) noexcept
{
    if (this != &o) {
        close();
        fd_ = o.fd_;
        o.fd_ = -1;
    }
    return *this;
}

Socket::~Socket()
{
    close();
}

void Socket::close() noexcept
{
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

void Socket::write_all(std::span<const std::uint8_t> bytes)
{
    std::size_t done = 0;
    while (done < bytes.size()) {
        const ssize_t n = ::send(fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(Errc::io, sys_error("send failed"));
        }
        done += static_cast<std::size_t>(n);
    }
}

void Socket::read_exact(std::span<std::uint8_t> bytes)
{
    std::size_t done = 0;
    while (done < bytes.size()) {
        const ssize_t n = ::recv(fd_, bytes.data() + done, bytes.size() - done, 0);
        if (n == 0) throw Error(Errc::io, "peer closed the connection");
        if (n < 0) {
            if (errno == EINTR) continue;
            throw Error(Errc::io, sys_error("recv failed"));
        }
        done += static_cast<std::size_t>(n);
    }
}

Listener::Listener(const std::string& host, std::uint16_t port)
{
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw Error(Errc::io, sys_error("socket"));
    sock_ = Socket(fd);
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = resolve(host, port);
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0)
        throw Error(Errc::io, sys_error("bind " + host + ":" + std::to_string(port)));
    if (::listen(fd, 1) != 0) throw Error(Errc::io, sys_error("listen"));
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Socket Listener::accept()
{
    for (;;) {
        const int fd = ::accept(sock_.fd(), nullptr, nullptr);
        if (fd >= 0) {
            set_nodelay(fd);
            return Socket(fd);
        }
        if (errno != EINTR) throw Error(Errc::io, sys_error("accept"));
    }
}

Socket connect_to(const std::string& host, std::uint16_t port, int retry_ms)
{
    const sockaddr_in addr = resolve(host, port);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(retry_ms);
    for (;;) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw Error(Errc::io, sys_error("socket"));
        Socket s(fd);
        if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0) {
            set_nodelay(fd);
            return s;
        }
        const int err = errno;
        if (err != ECONNREFUSED || std::chrono::steady_clock::now() >= deadline) {
            errno = err;
            throw Error(Errc::io, sys_error("connect " + host + ":" + std::to_string(port)));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
}

void Session::send(const Message& m)
{
    send_raw({send_seq_ + 1, m});
}

void Session::send_raw(const Frame& f)
{
    const auto bytes = encode(f);
    sock_.write_all(bytes);
    send_seq_ = f.seq;
}

Message Session::receive()
try {
    std::uint8_t header[kHeaderSize];
    sock_.read_exact(header);
    const std::size_t len = payload_length(header);
    std::vector<std::uint8_t> frame(kHeaderSize + len);
    std::memcpy(frame.data(), header, kHeaderSize);
    sock_.read_exact(std::span(frame).subspan(kHeaderSize));
    Frame f = decode(frame);
    if (f.seq != recv_seq_ + 1)
        throw Error(Errc::protocol, "sequence " + std::to_string(f.seq) + " after " + std::to_string(recv_seq_));
    recv_seq_ = f.seq;
    return f.msg;
} catch (const Error& e) {
    if (e.code() == Errc::protocol) sock_.close();
    throw;
}

} // namespace tdcosim::wire
