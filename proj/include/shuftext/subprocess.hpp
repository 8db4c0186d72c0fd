#pragma once

// Line-oriented child process over pipes (POSIX).

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shuftext/errors.hpp"

extern char** environ;

namespace shuftext {

class Subprocess {
public:
    using Clock = std::chrono::steady_clock;

    // Runs `command` through /bin/sh -c.
    explicit Subprocess(const std::string& command) {
        ::signal(SIGPIPE, SIG_IGN);
        int in_pipe[2], out_pipe[2], err_pipe[2];
        if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0)
            throw AdapterError(std::string("pipe: ") + std::strerror(errno));

        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
        posix_spawn_file_actions_adddup2(&actions, err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]})
            posix_spawn_file_actions_addclose(&actions, fd);

        std::string sh = "/bin/sh", flag = "-c", cmd = command;
        char* argv[] = {sh.data(), flag.data(), cmd.data(), nullptr};
        const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
        posix_spawn_file_actions_destroy(&actions);

        ::close(in_pipe[0]);
        ::close(out_pipe[1]);
        ::close(err_pipe[1]);
        in_ = in_pipe[1];
        out_ = out_pipe[0];
        err_ = err_pipe[0];
        if (rc != 0) {
            close_all();
            throw AdapterError("cannot start '" + command + "': " + std::strerror(rc));
        }
        for (int fd : {in_, out_, err_}) ::fcntl(fd, F_SETFD, FD_CLOEXEC);
        ::fcntl(err_, F_SETFL, ::fcntl(err_, F_GETFL) | O_NONBLOCK);
        ::fcntl(in_, F_SETFL, ::fcntl(in_, F_GETFL) | O_NONBLOCK);
    }

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    ~Subprocess() { terminate(); }

    // Writes `line` plus a newline; throws on timeout or a closed pipe.
    void write_line(const std::string& line, Clock::time_point deadline) {
        std::string buf = line + "\n";
        std::size_t off = 0;
        while (off < buf.size()) {
            wait_for(in_, POLLOUT, deadline);
            const auto n = ::write(in_, buf.data() + off, buf.size() - off);
            if (n < 0) {
                if (errno == EAGAIN || errno == EINTR) continue;
                throw AdapterError("adapter closed its input" + stderr_suffix());
            }
            off += static_cast<std::size_t>(n);
        }
    }

    // Next stdout line without the newline; nullopt at end of stream.
    std::optional<std::string> read_line(Clock::time_point deadline) {
        for (;;) {
            const auto nl = out_buf_.find('\n');
            if (nl != std::string::npos) {
                std::string line = out_buf_.substr(0, nl);
                out_buf_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            if (out_eof_) {
                if (out_buf_.empty()) return std::nullopt;
                return std::exchange(out_buf_, {});
            }
            wait_for(out_, POLLIN, deadline);
            char chunk[4096];
            const auto n = ::read(out_, chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EAGAIN || errno == EINTR) continue;
                out_eof_ = true;
            } else if (n == 0) {
                out_eof_ = true;
            } else {
                out_buf_.append(chunk, static_cast<std::size_t>(n));
            }
        }
    }

    // Last bytes the child wrote to stderr.
    std::string stderr_excerpt() {
        drain_stderr();
        constexpr std::size_t kMax = 2000;
        return err_buf_.size() > kMax ? err_buf_.substr(err_buf_.size() - kMax) : err_buf_;
    }

    bool running() {
        if (pid_ <= 0) return false;
        int status = 0;
        if (::waitpid(pid_, &status, WNOHANG) == pid_) {
            pid_ = -1;
            return false;
        }
        return true;
    }

    void terminate() {
        if (in_ >= 0) {
            ::close(in_);
            in_ = -1;
        }
        if (pid_ > 0) {
            int status = 0;
            const auto until = Clock::now() + std::chrono::milliseconds(500);
            while (::waitpid(pid_, &status, WNOHANG) == 0) {
                if (Clock::now() > until) {
                    ::kill(pid_, SIGKILL);
                    ::waitpid(pid_, &status, 0);
                    break;
                }
                ::usleep(2000);
            }
            pid_ = -1;
        }
        close_all();
    }

private:
    std::string stderr_suffix() {
        auto e = stderr_excerpt();
        return e.empty() ? std::string{} : "; adapter stderr: " + e;
    }

    void wait_for(int fd, short events, Clock::time_point deadline) {
        for (;;) {
            const auto now = Clock::now();
            if (now >= deadline) throw AdapterError("adapter timed out" + stderr_suffix());
            const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
            pollfd fds[2] = {{fd, events, 0}, {err_, POLLIN, 0}};
            const nfds_t nfds = err_ >= 0 ? 2 : 1;
            const int rc = ::poll(fds, nfds, static_cast<int>(std::min<long long>(ms + 1, 1000)));
            if (rc < 0 && errno != EINTR) throw AdapterError(std::string("poll: ") + std::strerror(errno));
            if (nfds == 2 && (fds[1].revents & (POLLIN | POLLHUP))) drain_stderr();
            if (fds[0].revents & (POLLERR | POLLNVAL)) {
                if (events == POLLOUT) throw AdapterError("adapter closed its input" + stderr_suffix());
                return;
            }
            if (fds[0].revents & (events | POLLHUP)) return;
        }
    }

    void drain_stderr() {
        if (err_ < 0) return;
        char chunk[4096];
        for (;;) {
            const auto n = ::read(err_, chunk, sizeof chunk);
            if (n > 0) {
                err_buf_.append(chunk, static_cast<std::size_t>(n));
                if (err_buf_.size() > 64 * 1024) err_buf_.erase(0, err_buf_.size() - 16 * 1024);
                continue;
            }
            if (n == 0) {
                ::close(err_);
                err_ = -1;
            }
            return;
        }
    }

    void close_all() {
        for (int* fd : {&in_, &out_, &err_}) {
            if (*fd >= 0) ::close(*fd);
            *fd = -1;
        }
    }

    pid_t pid_ = -1;
    int in_ = -1, out_ = -1, err_ = -1;
    std::string out_buf_, err_buf_;
    bool out_eof_ = false;
};

}  // namespace shuftext
