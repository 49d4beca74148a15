#pragma once

// Reliable ordered duplex channels carrying length-prefixed frames.
//
// InProcessChannel: a pair of endpoints joined by two locked queues. Both
// endpoints still exchange fully encoded frames, so the bytes are the
// same as on a socket.
// FdChannel: a connected stream socket (TCP or socketpair), blocking reads
// bounded by a timeout.

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <thread>
#include <string>
#include <utility>

#include "dcmzk/errors.hpp"
#include "dcmzk/wire.hpp"

namespace dcmzk {

inline constexpr std::chrono::milliseconds kDefaultTimeout{30'000};

class Channel {
 public:
  virtual ~Channel() = default;
  // Sends one frame body (tag + payload); the channel adds the length prefix.
  virtual void send(std::span<const std::uint8_t> body) = 0;
  virtual Frame receive() = 0;

  void send(const Message& m) {
    const Bytes body = encode_body(m);
    send(std::span<const std::uint8_t>(body));
  }
};

namespace detail {

// Raw byte pipe shared by two in-process endpoints.
struct BytePipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<std::uint8_t> bytes;
  bool closed = false;
};

}  // namespace detail

class InProcessChannel final : public Channel {
 public:
  InProcessChannel(std::shared_ptr<detail::BytePipe> out, std::shared_ptr<detail::BytePipe> in,
                   std::chrono::milliseconds timeout)
      : out_(std::move(out)), in_(std::move(in)), timeout_(timeout) {}

  // Closing either end closes both directions, like a socket.
  ~InProcessChannel() override {
    for (auto* pipe : {out_.get(), in_.get()}) {
      std::lock_guard lock(pipe->mu);
      pipe->closed = true;
      pipe->cv.notify_all();
    }
  }

  void send(std::span<const std::uint8_t> body) override {
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw TransportError("send on closed channel");
    for (int i = 3; i >= 0; --i) out_->bytes.push_back(static_cast<std::uint8_t>(body.size() >> (8 * i)));
    out_->bytes.insert(out_->bytes.end(), body.begin(), body.end());
    out_->cv.notify_all();
  }
  using Channel::send;

  Frame receive() override {
    std::unique_lock lock(in_->mu);
    auto ready = [&] { return in_->bytes.size() >= 4 || in_->closed; };
    if (!in_->cv.wait_for(lock, timeout_, ready)) throw TransportError("receive timed out");
    if (in_->bytes.size() < 4) throw TransportError("peer closed the channel");
    std::size_t len = 0;
    for (int i = 0; i < 4; ++i) len = len << 8 | in_->bytes[static_cast<std::size_t>(i)];
    auto have_all = [&] { return in_->bytes.size() >= 4 + len || in_->closed; };
    if (!in_->cv.wait_for(lock, timeout_, have_all)) throw TransportError("receive timed out");
    if (in_->bytes.size() < 4 + len) throw TransportError("peer closed mid-frame");
    Frame f;
    const bool oversize = len > kMaxPayload + 1;
    auto begin = in_->bytes.begin() + 4;
    if (oversize) {
      f.body.push_back(len ? *begin : 0);
      f.oversize = true;
    } else {
      f.body.assign(begin, begin + static_cast<long>(len));
    }
    in_->bytes.erase(in_->bytes.begin(), begin + static_cast<long>(len));
    return f;
  }

 private:
  std::shared_ptr<detail::BytePipe> out_;
  std::shared_ptr<detail::BytePipe> in_;
  std::chrono::milliseconds timeout_;
};

inline std::pair<std::unique_ptr<Channel>, std::unique_ptr<Channel>> make_in_process_pair(
    std::chrono::milliseconds timeout = kDefaultTimeout) {
  auto ab = std::make_shared<detail::BytePipe>();
  auto ba = std::make_shared<detail::BytePipe>();
  return {std::make_unique<InProcessChannel>(ab, ba, timeout), std::make_unique<InProcessChannel>(ba, ab, timeout)};
}

class FdChannel final : public Channel {
 public:
  explicit FdChannel(int fd, std::chrono::milliseconds timeout = kDefaultTimeout) : fd_(fd), timeout_(timeout) {}
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;
  ~FdChannel() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(std::span<const std::uint8_t> body) override {
    Bytes frame;
    frame.reserve(body.size() + 4);
    for (int i = 3; i >= 0; --i) frame.push_back(static_cast<std::uint8_t>(body.size() >> (8 * i)));
    frame.insert(frame.end(), body.begin(), body.end());
    std::size_t off = 0;
    while (off < frame.size()) {
      const auto n = ::send(fd_, frame.data() + off, frame.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("send failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }
  using Channel::send;

  Frame receive() override {
    std::uint8_t header[4];
    read_exact(header, 4);
    std::size_t len = 0;
    for (auto b : header) len = len << 8 | b;
    Frame f;
    if (len > kMaxPayload + 1) {
      std::uint8_t chunk[4096];
      std::size_t left = len;
      bool first = true;
      while (left) {
        const std::size_t n = std::min(left, sizeof chunk);
        read_exact(chunk, n);
        if (first) f.body.push_back(chunk[0]);
        first = false;
        left -= n;
      }
      f.oversize = true;
      return f;
    }
    f.body.resize(len);
    read_exact(f.body.data(), len);
    return f;
  }

 private:
  void read_exact(std::uint8_t* dst, std::size_t n) {
    std::size_t off = 0;
    while (off < n) {
      pollfd pfd{fd_, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(timeout_.count()));
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("poll failed: ") + std::strerror(errno));
      }
      if (ready == 0) throw TransportError("receive timed out");
      const auto got = ::recv(fd_, dst + off, n - off, 0);
      if (got < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("recv failed: ") + std::strerror(errno));
      }
      if (got == 0) throw TransportError("peer closed the connection");
      off += static_cast<std::size_t>(got);
    }
  }

  int fd_;
  std::chrono::milliseconds timeout_;
};

// Two connected stream sockets, e.g. for a parent and a forked child.
inline std::pair<int, int> make_socket_pair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0)
    throw TransportError(std::string("socketpair failed: ") + std::strerror(errno));
  return {fds[0], fds[1]};
}

namespace detail {

inline std::pair<std::string, std::string> split_address(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw ParseError("address must be host:port");
  return {addr.substr(0, colon), addr.substr(colon + 1)};
}

struct AddrInfo {
  addrinfo* head = nullptr;
  ~AddrInfo() {
    if (head) ::freeaddrinfo(head);
  }
};

}  // namespace detail

// Accepts a single connection on host:port.
inline std::unique_ptr<Channel> listen_tcp(const std::string& address,
                                           std::chrono::milliseconds timeout = kDefaultTimeout) {
  auto [host, port] = detail::split_address(address);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE;
  detail::AddrInfo res;
  if (::getaddrinfo(host.empty() ? nullptr : host.c_str(), port.c_str(), &hints, &res.head) != 0)
    throw TransportError("cannot resolve " + address);
  for (auto* ai = res.head; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 1) == 0) {
      pollfd pfd{fd, POLLIN, 0};
      const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
      if (ready <= 0) {
        ::close(fd);
        throw TransportError("no connection on " + address);
      }
      const int conn = ::accept(fd, nullptr, nullptr);
      ::close(fd);
      if (conn < 0) throw TransportError(std::string("accept failed: ") + std::strerror(errno));
      return std::make_unique<FdChannel>(conn, timeout);
    }
    ::close(fd);
  }
  throw TransportError("cannot listen on " + address);
}

// Connects to host:port, retrying until the timeout while the peer starts.
inline std::unique_ptr<Channel> connect_tcp(const std::string& address,
                                            std::chrono::milliseconds timeout = kDefaultTimeout) {
  auto [host, port] = detail::split_address(address);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  do {
    detail::AddrInfo res;
    if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &res.head) != 0)
      throw TransportError("cannot resolve " + address);
    for (auto* ai = res.head; ai; ai = ai->ai_next) {
      const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) return std::make_unique<FdChannel>(fd, timeout);
      ::close(fd);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  } while (std::chrono::steady_clock::now() < deadline);
  throw TransportError("cannot connect to " + address);
}

}  // namespace dcmzk
