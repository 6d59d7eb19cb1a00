#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <string>

#include "json.hpp"
#include "meroloc/functions.hpp"

extern char** environ;

namespace meroloc {

namespace {

using Clock = std::chrono::steady_clock;

/// One child process speaking the line protocol over a socketpair attached
/// to its stdin and stdout.
class ChildProcess {
public:
    explicit ChildProcess(ExternalCommand command) : command_(std::move(command)) {}
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;
    ~ChildProcess() { shutdown(); }

    Complex evaluate(Complex z) {
        std::lock_guard lock(mutex_);
        if (broken_) fail(broken_reason_);
        if (pid_ <= 0) spawn();

        const std::int64_t id = ++next_id_;
        char request[160];
        std::snprintf(request, sizeof request, "{\"id\": %lld, \"z\": [%.17g, %.17g]}\n",
                      static_cast<long long>(id), z.real(), z.imag());
        send_all(request);

        const std::string line = read_line();
        nlohmann::json reply;
        try {
            reply = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            fail("malformed response line: '" + truncate(line) + "'");
        }
        if (!reply.is_object() || !reply.contains("id") || !reply["id"].is_number_integer())
            fail("response without integer id: '" + truncate(line) + "'");
        if (reply["id"].get<std::int64_t>() != id)
            fail("response id " + reply["id"].dump() + " does not match request id " + std::to_string(id));
        if (reply.contains("error")) {
            const std::string message = reply["error"].is_string() ? reply["error"].get<std::string>()
                                                                   : reply["error"].dump();
            throw Error(ErrorKind::Evaluation, describe() + ": evaluator error: " + message);
        }
        const auto& f = reply.contains("f") ? reply["f"] : nlohmann::json();
        if (!f.is_array() || f.size() != 2 || !f[0].is_number() || !f[1].is_number())
            fail("response without [re, im] value: '" + truncate(line) + "'");
        return {f[0].get<double>(), f[1].get<double>()};
    }

private:
    [[noreturn]] void fail(const std::string& reason) {
        broken_ = true;
        broken_reason_ = reason;
        shutdown();
        throw Error(ErrorKind::Evaluation, describe() + ": " + reason);
    }

    std::string describe() const {
        return "external evaluator '" + (command_.argv.empty() ? std::string() : command_.argv.front()) + "'";
    }

    static std::string truncate(const std::string& s) { return s.size() > 120 ? s.substr(0, 120) + "..." : s; }

    void spawn() {
        if (command_.argv.empty()) fail("empty command");
        int fds[2];
        if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) != 0)
            fail(std::string("socketpair failed: ") + std::strerror(errno));

        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);

        std::vector<char*> argv;
        for (auto& arg : command_.argv) argv.push_back(arg.data());
        argv.push_back(nullptr);

        pid_t pid = -1;
        const int rc = ::posix_spawnp(&pid, argv[0], &actions, nullptr, argv.data(), environ);
        posix_spawn_file_actions_destroy(&actions);
        ::close(fds[1]);
        if (rc != 0) {
            ::close(fds[0]);
            fail(std::string("cannot launch: ") + std::strerror(rc));
        }
        pid_ = pid;
        fd_ = fds[0];
    }

    void send_all(const std::string& data) {
        std::size_t sent = 0;
        while (sent < data.size()) {
            const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                fail(std::string("write failed (child exited?): ") + std::strerror(errno));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    std::string read_line() {
        const auto deadline = Clock::now() + command_.timeout;
        for (;;) {
            if (const auto pos = buffer_.find('\n'); pos != std::string::npos) {
                std::string line = buffer_.substr(0, pos);
                buffer_.erase(0, pos + 1);
                return line;
            }
            if (buffer_.size() > (1u << 20)) fail("response line too long");
            const auto remaining =
                std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
            if (remaining <= 0) fail("timed out waiting for response");
            pollfd pfd{fd_, POLLIN, 0};
            const int ready = ::poll(&pfd, 1, static_cast<int>(remaining));
            if (ready < 0) {
                if (errno == EINTR) continue;
                fail(std::string("poll failed: ") + std::strerror(errno));
            }
            if (ready == 0) continue;
            char chunk[4096];
            const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n < 0) {
                if (errno == EINTR) continue;
                fail(std::string("read failed: ") + std::strerror(errno));
            }
            if (n == 0) fail("child closed its output (exited)");
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    void shutdown() noexcept {
        if (fd_ >= 0) {
            ::close(fd_);
            fd_ = -1;
        }
        if (pid_ > 0) {
            int status = 0;
            // Give a well-behaved child a moment to exit on EOF, then kill it.
            for (int i = 0; i < 20; ++i) {
                if (::waitpid(pid_, &status, WNOHANG) == pid_) {
                    pid_ = -1;
                    return;
                }
                ::usleep(5000);
            }
            ::kill(pid_, SIGKILL);
            ::waitpid(pid_, &status, 0);
            pid_ = -1;
        }
    }

    ExternalCommand command_;
    std::mutex mutex_;
    pid_t pid_ = -1;
    int fd_ = -1;
    std::int64_t next_id_ = 0;
    std::string buffer_;
    bool broken_ = false;
    std::string broken_reason_;
};

FunctionHandle::Evaluator make_evaluator(const ExternalCommand& command) {
    auto child = std::make_shared<ChildProcess>(command);
    return [child](Complex z) { return child->evaluate(z); };
}

}  // namespace

FunctionHandle external_function(const ExternalCommand& command) {
    if (command.argv.empty()) throw Error(ErrorKind::InvalidInput, "external_function: empty command");
    return FunctionHandle("external", make_evaluator(command), Symmetry::None,
                          [command] { return make_evaluator(command); });
}

}  // namespace meroloc
