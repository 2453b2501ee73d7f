#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>

#include "hqsl/splitproto/wire.hpp"

namespace hqsl::splitproto {

class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Blocking, ordered message channel between the two protocol roles.
class Channel {
public:
    virtual ~Channel() = default;
    virtual void send(const WireMessage& msg) = 0;
    virtual WireMessage recv() = 0;
};

// In-process client endpoint: every sent message runs through the byte codec
// and is handed to the server handler inline; replies queue for recv().
class LoopbackChannel : public Channel {
public:
    using Handler = std::function<std::vector<WireMessage>(const WireMessage&)>;

    explicit LoopbackChannel(Handler server_handler)
        : handler_(std::move(server_handler)) {}

    void send(const WireMessage& msg) override;
    WireMessage recv() override;

private:
    Handler handler_;
    std::deque<WireMessage> inbox_;
};

// Framed messages over a connected TCP socket.
class TcpChannel : public Channel {
public:
    explicit TcpChannel(int fd) : fd_(fd) {}
    ~TcpChannel() override;
    TcpChannel(const TcpChannel&) = delete;
    TcpChannel& operator=(const TcpChannel&) = delete;

    void send(const WireMessage& msg) override;
    WireMessage recv() override;

private:
    int fd_;
};

class TcpListener {
public:
    // port 0 binds an ephemeral port (see port()).
    TcpListener(const std::string& host, int port);
    ~TcpListener();
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;

    int port() const { return port_; }
    std::unique_ptr<TcpChannel> accept();

private:
    int fd_;
    int port_;
};

std::unique_ptr<TcpChannel> tcp_connect(const std::string& host, int port);

// Decorator that reports every message crossing the channel.
class RecordingChannel : public Channel {
public:
    using Observer = std::function<void(const WireMessage&, bool outbound)>;

    RecordingChannel(Channel& inner, Observer observer)
        : inner_(inner), observer_(std::move(observer)) {}

    void send(const WireMessage& msg) override {
        observer_(msg, true);
        inner_.send(msg);
    }
    WireMessage recv() override {
        WireMessage msg = inner_.recv();
        observer_(msg, false);
        return msg;
    }

private:
    Channel& inner_;
    Observer observer_;
};

}  // namespace hqsl::splitproto
