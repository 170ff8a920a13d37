#include "ldf/server.hpp"

#include <charconv>
#include <thread>

#include <httplib.h>

#include "ldf/error.hpp"

namespace ldf::server {

namespace {

template <typename T>
T parse_number(std::string_view text, const char* what) {
    T v{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ParseError(std::string("bad ") + what + " value '" + std::string(text) + "'");
    return v;
}

std::string_view next_line(std::string_view& rest) {
    auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    return line;
}

}  // namespace

void ServerConfig::validate() const {
    if (pageSize < 1) throw ConfigError("pageSize must be >= 1");
    if (maxMpR < 1) throw ConfigError("maxMpR must be >= 1");
    if (uriLimit < 1) throw ConfigError("uriLimit must be >= 1");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (port < 0 || port > 65535) throw ConfigError("port out of range");
}

void ServerConfig::apply(const KeyValues& kv) {
    pageSize = kv.get_uint("pageSize", pageSize);
    maxMpR = kv.get_uint("maxMpR", maxMpR);
    uriLimit = kv.get_uint("uriLimit", uriLimit);
    metaBase = static_cast<std::uint32_t>(kv.get_uint("metaBase", metaBase));
    host = kv.get("host", host);
    port = static_cast<int>(kv.get_uint("port", static_cast<std::uint64_t>(port)));
    threads = kv.get_uint("threads", threads);
    if (kv.has("data")) data = kv.get("data", "");
}

std::string render_page(const fragment::FragmentPage& page) {
    std::string body;
    body.reserve(64 + page.data.size() * 96);
    body += "count=" + std::to_string(page.estimate.count) + "\n";
    body += page.hasNext ? "hasNext=true\n" : "hasNext=false\n";
    if (page.controls.nextPage) body += "next=" + *page.controls.nextPage + "\n";
    if (page.controls.prevPage) body += "prev=" + *page.controls.prevPage + "\n";
    body += "meta=" + std::to_string(page.metadataTripleCount) + "\n\n";
    for (const auto& t : page.data) {
        body += t.wire();
        body += '\n';
    }
    return body;
}

PageBody parse_page_body(std::string_view body) {
    PageBody out;
    std::string_view rest = body;
    bool have_count = false, have_next = false, have_meta = false;
    while (true) {
        if (rest.empty()) throw ParseError("page body ends before the blank separator line");
        std::string_view line = next_line(rest);
        if (line.empty()) break;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("bad metadata line '" + std::string(line) + "'");
        std::string_view key = line.substr(0, eq);
        std::string_view value = line.substr(eq + 1);
        if (key == "count") {
            out.count = parse_number<std::uint64_t>(value, "count");
            have_count = true;
        } else if (key == "hasNext") {
            if (value != "true" && value != "false") throw ParseError("bad hasNext value");
            out.hasNext = value == "true";
            have_next = true;
        } else if (key == "next") {
            out.next = std::string(value);
        } else if (key == "prev") {
            out.prev = std::string(value);
        } else if (key == "meta") {
            out.meta = parse_number<std::uint32_t>(value, "meta");
            have_meta = true;
        } else {
            throw ParseError("unknown metadata key '" + std::string(key) + "'");
        }
    }
    if (!have_count || !have_next || !have_meta) throw ParseError("page body misses metadata lines");
    while (!rest.empty()) {
        std::string_view line = next_line(rest);
        if (line.empty()) continue;
        rdf::TriplePattern tp = rdf::parse_pattern(line);
        auto t = tp.as_triple();
        if (!t) throw ParseError("data line is not a ground triple");
        out.data.push_back(std::move(*t));
    }
    return out;
}

Reply handle_request(const store::Dataset& ds, const ServerConfig& config, std::string_view target) {
    std::string_view path = target.substr(0, target.find('?'));
    if (path == "/health") return {200, "triples=" + std::to_string(ds.size()) + "\n"};
    if (path != "/fragment") return {404, "not-found\n"};
    if (target.size() > config.uriLimit) return {414, "uri-too-long\n"};

    fragment::FragmentRequest req;
    try {
        req = fragment::parse_target(target);
    } catch (const RequestError& e) {
        return {400, std::string("malformed-request: ") + e.what() + "\n"};
    }
    if (req.bindings.size() > config.maxMpR) return {400, std::string(kMaxMpRExceeded) + "\n"};
    try {
        auto page = fragment::build_page(ds, req, config.pageSize, {config.metaBase});
        return {200, render_page(page)};
    } catch (const BindingError& e) {
        return {400, std::string("ill-typed-binding: ") + e.what() + "\n"};
    }
}

struct Server::Impl {
    httplib::Server http;
    std::thread thread;
    int port = -1;
};

Server::Server(std::shared_ptr<const store::Dataset> ds, ServerConfig config)
    : ds_(std::move(ds)), config_(std::move(config)), impl_(std::make_unique<Impl>()) {
    config_.validate();
    auto threads = config_.threads;
    impl_->http.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    impl_->http.set_keep_alive_max_count(1u << 30);
    impl_->http.set_keep_alive_timeout(5);
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        Reply r = handle_request(*ds_, config_, req.target);
        res.status = r.status;
        res.set_content(std::move(r.body), "text/plain; charset=utf-8");
    };
    impl_->http.Get("/fragment", handler);
    impl_->http.Get("/health", handler);
}

Server::~Server() { stop(); }

void Server::start() {
    if (impl_->thread.joinable()) return;
    int port = config_.port == 0 ? impl_->http.bind_to_any_port(config_.host)
                                 : (impl_->http.bind_to_port(config_.host, config_.port) ? config_.port : -1);
    if (port < 0)
        throw Error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
    impl_->port = port;
    impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
}

void Server::stop() {
    if (!impl_) return;
    impl_->http.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

void Server::wait() {
    if (impl_->thread.joinable()) impl_->thread.join();
}

int Server::port() const { return impl_->port; }

std::string Server::url() const { return "http://" + config_.host + ":" + std::to_string(impl_->port); }

std::unique_ptr<Server> serve(const ServerConfig& config) {
    config.validate();
    auto ds = std::make_shared<const store::Dataset>(store::load_file(config.data));
    auto server = std::make_unique<Server>(std::move(ds), config);
    server->start();
    return server;
}

}  // namespace ldf::server
