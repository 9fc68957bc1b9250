#ifndef IFSPEC_TRANSPORT_HPP
#define IFSPEC_TRANSPORT_HPP

#include "ifspec/error.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <spawn.h>
#include <string>
#include <string_view>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>
#include <utility>
#include <variant>
#include <vector>

extern char** environ;

namespace ifspec
{

struct TcpAddress
{
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

struct StdioCommand
{
    std::vector<std::string> argv;
};

/// Where the system under test lives and how long to wait for each answer.
struct Endpoint
{
    std::variant<TcpAddress, StdioCommand> transport;
    int timeout_ms = 5000;
};

/**
 *  Parses `tcp:<host>:<port>`, `<host>:<port>`, or `stdio:<command> [args...]`
 *  (arguments split on spaces). Throws `bad-endpoint`.
 */
inline Endpoint parse_endpoint(std::string_view text, int timeout_ms = 5000)
{
    if (timeout_ms < 1) throw Error("bad-endpoint", "timeout must be at least 1 ms");
    Endpoint e;
    e.timeout_ms = timeout_ms;
    if (text.substr(0, 6) == "stdio:") {
        StdioCommand cmd;
        auto rest = text.substr(6);
        std::size_t i = 0;
        while (i < rest.size()) {
            while (i < rest.size() && rest[i] == ' ') ++i;
            std::size_t j = i;
            while (j < rest.size() && rest[j] != ' ') ++j;
            if (j > i) cmd.argv.emplace_back(rest.substr(i, j - i));
            i = j;
        }
        if (cmd.argv.empty()) throw Error("bad-endpoint", "stdio endpoint needs a command");
        e.transport = std::move(cmd);
        return e;
    }
    if (text.substr(0, 4) == "tcp:") text.remove_prefix(4);
    const auto colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) throw Error("bad-endpoint", "expected <host>:<port>, got '" + std::string(text) + "'");
    TcpAddress addr;
    addr.host = std::string(text.substr(0, colon));
    const auto port_text = text.substr(colon + 1);
    unsigned long port = 0;
    for (char c : port_text) {
        if (c < '0' || c > '9') throw Error("bad-endpoint", "bad port '" + std::string(port_text) + "'");
        port = port * 10 + static_cast<unsigned long>(c - '0');
        if (port > 65535) throw Error("bad-endpoint", "port out of range");
    }
    if (port_text.empty() || port == 0) throw Error("bad-endpoint", "bad port '" + std::string(port_text) + "'");
    addr.port = static_cast<std::uint16_t>(port);
    e.transport = std::move(addr);
    return e;
}

enum class ReadStatus
{
    line,
    timeout,
    closed
};

namespace detail
{

inline void ignore_sigpipe()
{
    static const bool done = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)done;
}

inline void set_nonblocking(int fd)
{
    const int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

inline int remaining_ms(std::chrono::steady_clock::time_point deadline)
{
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now()).count();
    return left < 0 ? 0 : static_cast<int>(left);
}

} // namespace detail

/**
 *  Bidirectional LF-terminated line stream over a socket or a pair of pipes
 *  to a child process. Owns its descriptors and child; move-only.
 */
class LineChannel
{
public:
    LineChannel() = default;
    LineChannel(const LineChannel&) = delete;
    LineChannel& operator=(const LineChannel&) = delete;
    LineChannel(LineChannel&& other) noexcept { swap(other); }
    LineChannel& operator=(LineChannel&& other) noexcept
    {
        if (this != &other) {
            close();
            swap(other);
        }
        return *this;
    }
    ~LineChannel() { close(); }

    /// Takes ownership of a connected socket.
    static LineChannel adopt_socket(int fd)
    {
        detail::ignore_sigpipe();
        detail::set_nonblocking(fd);
        // request/response traffic: small writes must not wait for ACKs
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        LineChannel ch;
        ch.read_fd_ = fd;
        ch.write_fd_ = fd;
        return ch;
    }

    /// Takes ownership of two descriptors (e.g. stdin/stdout of a server).
    static LineChannel adopt_pipes(int read_fd, int write_fd, bool owned)
    {
        detail::ignore_sigpipe();
        LineChannel ch;
        ch.read_fd_ = read_fd;
        ch.write_fd_ = write_fd;
        ch.owned_ = owned;
        return ch;
    }

    /// Connects to the endpoint. Throws `connection-failed`.
    static LineChannel open(const Endpoint& endpoint)
    {
        if (const auto* tcp = std::get_if<TcpAddress>(&endpoint.transport)) return connect_tcp(*tcp, endpoint.timeout_ms);
        return spawn(std::get<StdioCommand>(endpoint.transport));
    }

    /// Writes `line` plus LF. Returns false if the peer is gone.
    bool send_line(std::string_view line)
    {
        std::string data(line);
        data += '\n';
        std::size_t off = 0;
        while (off < data.size()) {
            const auto n = ::write(write_fd_, data.data() + off, data.size() - off);
            if (n > 0) {
                off += static_cast<std::size_t>(n);
                continue;
            }
            if (n < 0 && errno == EINTR) continue;
            if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
                pollfd p{write_fd_, POLLOUT, 0};
                ::poll(&p, 1, 1000);
                continue;
            }
            return false;
        }
        return true;
    }

    /// Reads one line (without its LF), waiting until `deadline` at most.
    ReadStatus read_line(std::string& out, std::chrono::steady_clock::time_point deadline)
    {
        for (;;) {
            const auto nl = buffer_.find('\n');
            if (nl != std::string::npos) {
                out = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return ReadStatus::line;
            }
            if (eof_) return ReadStatus::closed;
            pollfd p{read_fd_, POLLIN, 0};
            const int rc = ::poll(&p, 1, detail::remaining_ms(deadline));
            if (rc < 0 && errno == EINTR) continue;
            if (rc == 0) return ReadStatus::timeout;
            char chunk[4096];
            const auto n = ::read(read_fd_, chunk, sizeof chunk);
            if (n > 0) {
                buffer_.append(chunk, static_cast<std::size_t>(n));
            } else if (n == 0 || (errno != EINTR && errno != EAGAIN && errno != EWOULDBLOCK)) {
                eof_ = true;
            }
        }
    }

    /// Lines already available without waiting.
    std::vector<std::string> drain()
    {
        std::vector<std::string> lines;
        std::string line;
        while (read_line(line, std::chrono::steady_clock::now()) == ReadStatus::line) lines.push_back(line);
        return lines;
    }

    bool is_open() const { return read_fd_ >= 0; }

    void close()
    {
        if (owned_) {
            if (read_fd_ >= 0) ::close(read_fd_);
            if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
        }
        read_fd_ = write_fd_ = -1;
        if (child_ > 0) {
            reap(child_);
            child_ = -1;
        }
        buffer_.clear();
        eof_ = false;
    }

private:
    void swap(LineChannel& other) noexcept
    {
        std::swap(read_fd_, other.read_fd_);
        std::swap(write_fd_, other.write_fd_);
        std::swap(child_, other.child_);
        std::swap(owned_, other.owned_);
        std::swap(buffer_, other.buffer_);
        std::swap(eof_, other.eof_);
    }

    static void reap(pid_t pid)
    {
        // the child normally exits on EOF; give it a moment before killing
        for (int i = 0; i < 50; ++i) {
            if (::waitpid(pid, nullptr, WNOHANG) == pid) return;
            std::this_thread::sleep_for(std::chrono::milliseconds(2));
        }
        ::kill(pid, SIGKILL);
        ::waitpid(pid, nullptr, 0);
    }

    static LineChannel connect_tcp(const TcpAddress& addr, int timeout_ms)
    {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* found = nullptr;
        const auto port = std::to_string(addr.port);
        if (const int rc = ::getaddrinfo(addr.host.c_str(), port.c_str(), &hints, &found); rc != 0) {
            throw Error("connection-failed", "cannot resolve '" + addr.host + "': " + ::gai_strerror(rc));
        }
        std::string why = "no address";
        for (auto* ai = found; ai; ai = ai->ai_next) {
            const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
            if (fd < 0) continue;
            detail::set_nonblocking(fd);
            int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
            if (rc < 0 && errno == EINPROGRESS) {
                pollfd p{fd, POLLOUT, 0};
                rc = ::poll(&p, 1, timeout_ms) == 1 ? 0 : -1;
                int err = rc == 0 ? 0 : ETIMEDOUT;
                socklen_t len = sizeof err;
                if (rc == 0) ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
                if (err != 0) {
                    errno = err;
                    rc = -1;
                }
            }
            if (rc == 0) {
                ::freeaddrinfo(found);
                return adopt_socket(fd);
            }
            why = std::strerror(errno);
            ::close(fd);
        }
        ::freeaddrinfo(found);
        throw Error("connection-failed", "cannot connect to " + addr.host + ":" + port + ": " + why);
    }

    static LineChannel spawn(const StdioCommand& cmd)
    {
        detail::ignore_sigpipe();
        int to_child[2];
        int from_child[2];
        if (::pipe2(to_child, O_CLOEXEC) != 0) throw Error("connection-failed", "pipe failed");
        if (::pipe2(from_child, O_CLOEXEC) != 0) {
            ::close(to_child[0]);
            ::close(to_child[1]);
            throw Error("connection-failed", "pipe failed");
        }
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
        std::vector<char*> argv;
        for (const auto& a : cmd.argv) argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        pid_t pid = -1;
        const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
        posix_spawn_file_actions_destroy(&actions);
        ::close(to_child[0]);
        ::close(from_child[1]);
        if (rc != 0) {
            ::close(to_child[1]);
            ::close(from_child[0]);
            throw Error("connection-failed", "cannot start '" + cmd.argv[0] + "': " + std::strerror(rc));
        }
        detail::set_nonblocking(from_child[0]);
        LineChannel ch;
        ch.read_fd_ = from_child[0];
        ch.write_fd_ = to_child[1];
        ch.child_ = pid;
        return ch;
    }

    int read_fd_ = -1;
    int write_fd_ = -1;
    pid_t child_ = -1;
    bool owned_ = true;
    std::string buffer_;
    bool eof_ = false;
};

/// Listening TCP socket; `accept` polls so callers can stop between waits.
class TcpListener
{
public:
    TcpListener(const std::string& host, std::uint16_t port)
    {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        hints.ai_flags = AI_PASSIVE;
        addrinfo* found = nullptr;
        const auto service = std::to_string(port);
        if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &found) != 0 || !found) {
            throw Error("listen-failed", "cannot resolve '" + host + "'");
        }
        fd_ = ::socket(found->ai_family, found->ai_socktype | SOCK_CLOEXEC, found->ai_protocol);
        int one = 1;
        if (fd_ >= 0) ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        const bool ok = fd_ >= 0 && ::bind(fd_, found->ai_addr, found->ai_addrlen) == 0 && ::listen(fd_, 64) == 0;
        ::freeaddrinfo(found);
        if (!ok) {
            const std::string why = std::strerror(errno);
            if (fd_ >= 0) ::close(fd_);
            throw Error("listen-failed", "cannot listen on " + host + ":" + service + ": " + why);
        }
        sockaddr_storage bound{};
        socklen_t len = sizeof bound;
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
        port_ = ntohs(bound.ss_family == AF_INET6 ? reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port
                                                  : reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
    }

    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;
    ~TcpListener()
    {
        if (fd_ >= 0) ::close(fd_);
    }

    std::uint16_t port() const { return port_; }

    /// Accepted socket, or -1 after `wait_ms` without a connection.
    int accept(int wait_ms)
    {
        pollfd p{fd_, POLLIN, 0};
        if (::poll(&p, 1, wait_ms) != 1) return -1;
        return ::accept4(fd_, nullptr, nullptr, SOCK_CLOEXEC);
    }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

} // namespace ifspec
#endif // IFSPEC_TRANSPORT_HPP
