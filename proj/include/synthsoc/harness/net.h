#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace synthsoc {

class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Owning file descriptor.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& o) noexcept : fd_(o.release()) {}
  Socket& operator=(Socket&& o) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket() { close(); }

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  int release() {
    const int f = fd_;
    fd_ = -1;
    return f;
  }
  void close();

 private:
  int fd_ = -1;
};

// IPv4 only. Port 0 binds an ephemeral port.
Socket listen_tcp(const std::string& host, int port);
int local_port(const Socket& s);
Socket accept_connection(const Socket& listener);
Socket connect_tcp(const std::string& host, int port);

// Line framing over a stream socket.
class LineChannel {
 public:
  LineChannel() = default;
  explicit LineChannel(Socket s) : sock_(std::move(s)) {}

  int fd() const { return sock_.fd(); }
  bool open() const { return sock_.valid(); }
  void close() { sock_.close(); }

  // Writes the line plus '\n'. Throws NetError when the peer is gone.
  void send_line(std::string_view line);
  // One read(2) into the buffer. False at EOF. Throws NetError on a read
  // error or a line longer than the limit.
  bool fill();
  // A complete buffered line, if any.
  std::optional<std::string> pop_line();
  // Blocks until a line arrives; nullopt at EOF.
  std::optional<std::string> read_line();

 private:
  Socket sock_;
  std::string buf_;
};

}  // namespace synthsoc
