#include "hqsl/splitproto/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace hqsl::splitproto {

void LoopbackChannel::send(const WireMessage& msg) {
    // round-trip through the codec so both transports exercise the same bytes
    const auto replies = handler_(decode(encode(msg)));
    for (const auto& r : replies) inbox_.push_back(decode(encode(r)));
}

WireMessage LoopbackChannel::recv() {
    if (inbox_.empty()) throw TransportError("loopback recv with no pending reply");
    WireMessage msg = std::move(inbox_.front());
    inbox_.pop_front();
    return msg;
}

TcpChannel::~TcpChannel() {
    if (fd_ >= 0) ::close(fd_);
}

void TcpChannel::send(const WireMessage& msg) {
    const auto frame = encode(msg);
    std::size_t sent = 0;
    while (sent < frame.size()) {
        const ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, 0);
        if (n <= 0) {
            throw TransportError(std::string("tcp send failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
}

WireMessage TcpChannel::recv() {
    auto read_exact = [&](std::uint8_t* buf, std::size_t count) {
        std::size_t got = 0;
        while (got < count) {
            const ssize_t n = ::recv(fd_, buf + got, count - got, 0);
            if (n == 0) throw TransportError("tcp peer closed the connection");
            if (n < 0) {
                throw TransportError(std::string("tcp recv failed: ") + std::strerror(errno));
            }
            got += static_cast<std::size_t>(n);
        }
    };
    std::vector<std::uint8_t> frame(kFrameHeaderSize);
    read_exact(frame.data(), kFrameHeaderSize);
    const std::size_t payload = payload_length(frame);
    frame.resize(kFrameHeaderSize + payload);
    read_exact(frame.data() + kFrameHeaderSize, payload);
    return decode(frame);
}

TcpListener::TcpListener(const std::string& host, int port) : fd_(-1), port_(port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw TransportError("cannot create socket");
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw TransportError("bad listen address: " + host);
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd_);
        throw TransportError("cannot bind " + host + ":" + std::to_string(port) + ": " +
                             std::strerror(errno));
    }
    if (::listen(fd_, 1) != 0) {
        ::close(fd_);
        throw TransportError("listen failed");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len) == 0) {
        port_ = ntohs(bound.sin_port);
    }
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<TcpChannel> TcpListener::accept() {
    const int client = ::accept(fd_, nullptr, nullptr);
    if (client < 0) throw TransportError("accept failed");
    return std::make_unique<TcpChannel>(client);
}

std::unique_ptr<TcpChannel> tcp_connect(const std::string& host, int port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError("cannot create socket");
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw TransportError("bad connect address: " + host);
    }
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        throw TransportError("cannot connect to " + host + ":" + std::to_string(port) + ": " +
                             std::strerror(errno));
    }
    return std::make_unique<TcpChannel>(fd);
}

}  // namespace hqsl::splitproto
