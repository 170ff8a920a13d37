#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldf/config.hpp"
#include "ldf/fragment.hpp"
#include "ldf/store.hpp"

namespace ldf::server {

struct ServerConfig {
    std::size_t pageSize = 100;
    std::size_t maxMpR = 30;
    std::size_t uriLimit = 8000;
    std::uint32_t metaBase = fragment::MetadataPolicy{}.base;
    std::string host = "127.0.0.1";
    int port = 0;  // 0 picks an ephemeral port
    std::size_t threads = 32;
    std::filesystem::path data;

    /// Throws ldf::ConfigError.
    void validate() const;
    /// Overrides fields from `pageSize`, `maxMpR`, `uriLimit`, `metaBase`, `host`, `port`,
    /// `threads` and `data` keys.
    void apply(const KeyValues& kv);
};

struct Reply {
    int status = 200;
    std::string body;
};

inline constexpr std::string_view kMaxMpRExceeded = "maxMpR-exceeded";

/// Serves `/fragment?...` and `/health` for a raw request target. Pure with
/// respect to the dataset: equal targets give byte-identical replies.
Reply handle_request(const store::Dataset& ds, const ServerConfig& config, std::string_view target);

/// Response body: `count=`, `hasNext=`, optional `next=`/`prev=`, `meta=`, a blank
/// line, then one data triple per line.
std::string render_page(const fragment::FragmentPage& page);

struct PageBody {
    std::uint64_t count = 0;
    bool hasNext = false;
    std::optional<std::string> next;
    std::optional<std::string> prev;
    std::uint32_t meta = 0;
    std::vector<rdf::Triple> data;
};

/// Throws ldf::ParseError on a body that does not follow render_page's format.
PageBody parse_page_body(std::string_view body);

/// HTTP front end over a shared immutable dataset. Requests are served
/// concurrently from a thread pool; stop() or destruction shuts it down.
class Server {
public:
    Server(std::shared_ptr<const store::Dataset> ds, ServerConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts listening in a background thread. Throws ldf::Error on bind failure.
    void start();
    void stop();
    /// Blocks until the server stops.
    void wait();

    int port() const;
    std::string url() const;
    const ServerConfig& config() const { return config_; }
    const store::Dataset& dataset() const { return *ds_; }

private:
    struct Impl;
    std::shared_ptr<const store::Dataset> ds_;
    ServerConfig config_;
    std::unique_ptr<Impl> impl_;
};

/// Loads `config.data` and starts a server. Throws ldf::LoadError / ldf::Error.
std::unique_ptr<Server> serve(const ServerConfig& config);

}  // namespace ldf::server
