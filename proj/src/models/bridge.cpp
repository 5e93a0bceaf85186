#include <stegocap/models.hpp>

#include <stegocap/error.hpp>

#include <json.hpp>

#include <csignal>
#include <cerrno>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace stegocap {
namespace {

using nlohmann::json;

constexpr int kProtocolVersion = 1;

/// Child process with its stdin/stdout wired to pipes, read line by line.
class LineChannel {
public:
    explicit LineChannel(const std::string& command) {
        // A dead adapter must surface as a protocol error, not kill us.
        std::signal(SIGPIPE, SIG_IGN);

        int to_child[2];
        int from_child[2];
        if (pipe(to_child) != 0) {
            throw Error(ErrorCode::BackendUnavailable, "pipe() failed");
        }
        if (pipe(from_child) != 0) {
            close(to_child[0]);
            close(to_child[1]);
            throw Error(ErrorCode::BackendUnavailable, "pipe() failed");
        }
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
        posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);
        posix_spawn_file_actions_addclose(&actions, to_child[1]);
        posix_spawn_file_actions_addclose(&actions, from_child[0]);

        std::string sh = "sh";
        std::string dash_c = "-c";
        std::string cmd = command;
        char* argv[] = {sh.data(), dash_c.data(), cmd.data(), nullptr};
        const int rc = posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
        posix_spawn_file_actions_destroy(&actions);
        close(to_child[0]);
        close(from_child[1]);
        write_fd_ = to_child[1];
        read_fd_ = from_child[0];
        if (rc != 0) {
            pid_ = -1;
            shutdown();
            throw Error(ErrorCode::BackendUnavailable, "cannot spawn '" + command + "'");
        }
    }

    LineChannel(const LineChannel&) = delete;
    LineChannel& operator=(const LineChannel&) = delete;

    ~LineChannel() { shutdown(); }

    // False when the peer has gone away.
    bool write_line(const std::string& line) {
        std::string data = line + "\n";
        std::size_t off = 0;
        while (off < data.size()) {
            const ssize_t n = ::write(write_fd_, data.data() + off, data.size() - off);
            if (n < 0 && errno == EINTR) {
                continue;
            }
            if (n <= 0) {
                return false;
            }
            off += static_cast<std::size_t>(n);
        }
        return true;
    }

    std::optional<std::string> read_line() {
        while (true) {
            if (const std::size_t nl = buffer_.find('\n'); nl != std::string::npos) {
                std::string line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return line;
            }
            char chunk[4096];
            const ssize_t n = ::read(read_fd_, chunk, sizeof chunk);
            if (n < 0 && errno == EINTR) {
                continue;
            }
            if (n <= 0) {
                return std::nullopt;
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

    void shutdown() {
        if (write_fd_ >= 0) {
            close(write_fd_);
            write_fd_ = -1;
        }
        if (read_fd_ >= 0) {
            close(read_fd_);
            read_fd_ = -1;
        }
        if (pid_ > 0) {
            // Adapters exit on stdin EOF; give them a moment before killing.
            int status = 0;
            for (int attempt = 0; attempt < 200; ++attempt) {
                if (waitpid(pid_, &status, WNOHANG) != 0) {
                    pid_ = -1;
                    return;
                }
                usleep(10000);
            }
            kill(pid_, SIGKILL);
            while (waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
            }
            pid_ = -1;
        }
    }

private:
    pid_t pid_ = -1;
    int write_fd_ = -1;
    int read_fd_ = -1;
    std::string buffer_;
};

json parse_message(const std::optional<std::string>& line, std::string_view expected_type,
                   ErrorCode on_error) {
    if (!line) {
        throw Error(on_error, "adapter closed its output");
    }
    json msg;
    try {
        msg = json::parse(*line);
    } catch (const json::exception&) {
        throw Error(on_error, "malformed line from adapter: " + line->substr(0, 120));
    }
    if (!msg.is_object() || !msg.contains("type") || msg["type"] != expected_type) {
        throw Error(on_error, "expected '" + std::string(expected_type) + "', got: " + line->substr(0, 120));
    }
    return msg;
}

std::vector<std::string> placeholder_tokens(std::size_t n) {
    std::vector<std::string> tokens(n);
    for (std::size_t i = 0; i < n; ++i) {
        tokens[i] = "#" + std::to_string(i);
    }
    return tokens;
}

class BridgeBackend final : public Backend {
public:
    BridgeBackend(const std::string& command, const Conditioning& conditioning)
        : channel_(command), vocab_(handshake()) {
        json reset = {{"type", "reset"}, {"conditioning", base64_encode(conditioning.payload)}};
        if (!channel_.write_line(reset.dump())) {
            throw Error(ErrorCode::BackendUnavailable, "adapter exited before reset");
        }
    }

    ~BridgeBackend() override {
        channel_.write_line(json{{"type", "close"}}.dump());
        channel_.shutdown();
    }

    const Vocabulary& vocabulary() const override { return vocab_; }
    MassMode mass_mode() const override { return MassMode::Sparse; }

    NextTokenDistribution distribution(std::span<const TokenId> context) override {
        if (context.size() != steps_sent_) {
            throw Error(ErrorCode::BridgeProtocolError, "bridge sessions advance one token at a time");
        }
        json step = {{"type", "step"}, {"last_token", nullptr}};
        if (!context.empty()) {
            step["last_token"] = context.back();
        }
        if (!channel_.write_line(step.dump())) {
            throw Error(ErrorCode::BridgeProtocolError, "adapter exited");
        }
        ++steps_sent_;

        const json msg = parse_message(channel_.read_line(), "dist", ErrorCode::BridgeProtocolError);
        if (!msg.contains("entries") || !msg["entries"].is_array()) {
            throw Error(ErrorCode::BridgeProtocolError, "dist message without entries");
        }
        std::vector<ProbEntry> raw;
        raw.reserve(msg["entries"].size());
        for (const json& pair : msg["entries"]) {
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_unsigned() ||
                !pair[1].is_number()) {
                throw Error(ErrorCode::BridgeProtocolError, "dist entry must be [id, prob]");
            }
            raw.push_back({pair[0].get<TokenId>(), pair[1].get<double>()});
        }
        try {
            return validate_distribution(raw, vocab_.size(), MassMode::Sparse);
        } catch (const Error& e) {
            throw Error(ErrorCode::BridgeProtocolError, e.what());
        }
    }

private:
    Vocabulary handshake() {
        const json hello = parse_message(channel_.read_line(), "hello", ErrorCode::BackendUnavailable);
        try {
            if (hello.at("proto").get<int>() != kProtocolVersion) {
                throw Error(ErrorCode::BackendUnavailable, "unsupported protocol version");
            }
            const auto size = hello.at("vocab_size").get<std::size_t>();
            std::optional<TokenId> eos;
            if (hello.contains("eos_id") && !hello["eos_id"].is_null()) {
                eos = hello["eos_id"].get<TokenId>();
            }
            std::vector<std::string> tokens;
            if (hello.contains("vocab") && hello["vocab"].is_array()) {
                tokens = hello["vocab"].get<std::vector<std::string>>();
                if (tokens.size() != size) {
                    throw Error(ErrorCode::BackendUnavailable, "hello vocab does not match vocab_size");
                }
            } else {
                tokens = placeholder_tokens(size);
            }
            return Vocabulary(std::move(tokens), eos);
        } catch (const json::exception& e) {
            throw Error(ErrorCode::BackendUnavailable, std::string("bad hello: ") + e.what());
        }
    }

    LineChannel channel_;
    Vocabulary vocab_;
    std::size_t steps_sent_ = 0;
};

}  // namespace

std::unique_ptr<Backend> make_bridge_backend(const std::string& command,
                                             const Conditioning& conditioning) {
    if (command.empty()) {
        throw Error(ErrorCode::BackendUnavailable, "bridge needs an adapter command");
    }
    return std::make_unique<BridgeBackend>(command, conditioning);
}

}  // namespace stegocap
