#include "ldf/cache.hpp"

#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>
#include <unordered_set>

#include <httplib.h>

#include "ldf/client.hpp"
#include "ldf/error.hpp"

namespace ldf::cache {

bool CacheModel::observe(const std::string& key) {
    if (entries_.touch(key)) {
        ++stats_.hits;
        return true;
    }
    ++stats_.misses;
    entries_.insert(key, 0);
    return false;
}

std::vector<ReplayRow> replay(const std::vector<std::string>& trace,
                              const std::vector<std::optional<std::size_t>>& capacities) {
    std::vector<ReplayRow> rows;
    rows.reserve(capacities.size());
    for (const auto& cap : capacities) {
        CacheModel model(cap);
        for (const auto& key : trace) model.observe(key);
        rows.push_back({cap, model.stats()});
    }
    return rows;
}

std::size_t distinct_count(const std::vector<std::string>& trace) {
    return std::unordered_set<std::string>(trace.begin(), trace.end()).size();
}

void write_stats_csv(std::ostream& out, const std::vector<ReplayRow>& rows) {
    out << "capacity,hits,misses,hitRate\n";
    for (const auto& r : rows) {
        out << (r.capacity ? std::to_string(*r.capacity) : "unlimited") << ',' << r.stats.hits << ','
            << r.stats.misses << ',' << std::fixed << std::setprecision(6) << r.stats.hitRate() << '\n';
        out.unsetf(std::ios::floatfield);
    }
}

std::vector<std::string> load_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open trace file '" + path.string() + "'");
    std::vector<std::string> trace;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) trace.push_back(line);
    }
    return trace;
}

void write_trace(std::ostream& out, const std::vector<std::string>& trace) {
    for (const auto& t : trace) out << t << '\n';
}

std::optional<std::size_t> parse_capacity(const std::string& text) {
    if (text == "unlimited" || text == "inf") return std::nullopt;
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) throw ConfigError("");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("bad cache capacity '" + text + "'");
    }
}

struct CachingProxy::Impl {
    std::string upstream;
    std::string host;
    int requested_port;
    int port = -1;

    mutable std::mutex mu;
    LruMap<server::Reply> entries;
    CacheStats stats;

    std::mutex pool_mu;
    std::vector<std::unique_ptr<client::HttpSource>> pool;

    httplib::Server http;
    std::thread thread;

    Impl(std::string up, std::optional<std::size_t> cap, std::string h, int p)
        : upstream(std::move(up)), host(std::move(h)), requested_port(p), entries(cap) {}

    std::unique_ptr<client::HttpSource> borrow() {
        std::lock_guard lock(pool_mu);
        if (pool.empty()) return std::make_unique<client::HttpSource>(upstream);
        auto c = std::move(pool.back());
        pool.pop_back();
        return c;
    }

    void give_back(std::unique_ptr<client::HttpSource> c) {
        std::lock_guard lock(pool_mu);
        pool.push_back(std::move(c));
    }

    server::Reply handle(const std::string& target) {
        {
            std::lock_guard lock(mu);
            if (const server::Reply* hit = entries.touch(target)) {
                ++stats.hits;
                return *hit;
            }
            ++stats.misses;
        }
        server::Reply reply;
        auto conn = borrow();
        try {
            reply = conn->get(target);
        } catch (const TransportError& e) {
            return {502, std::string("upstream-failure: ") + e.what() + "\n"};
        }
        give_back(std::move(conn));
        if (reply.status == 200) {
            std::lock_guard lock(mu);
            entries.insert(target, reply);
        }
        return reply;
    }
};

CachingProxy::CachingProxy(std::string upstream_url, std::optional<std::size_t> capacity,
                           std::string host, int port, std::size_t threads)
    : impl_(std::make_unique<Impl>(std::move(upstream_url), capacity, std::move(host), port)) {
    impl_->http.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
    impl_->http.set_keep_alive_max_count(1u << 30);
    impl_->http.set_keep_alive_timeout(5);
    impl_->http.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
        server::Reply r = impl_->handle(req.target);
        res.status = r.status;
        res.set_content(std::move(r.body), "text/plain; charset=utf-8");
    });
}

CachingProxy::~CachingProxy() { stop(); }

void CachingProxy::start() {
    if (impl_->thread.joinable()) return;
    int port = impl_->requested_port == 0
                   ? impl_->http.bind_to_any_port(impl_->host)
                   : (impl_->http.bind_to_port(impl_->host, impl_->requested_port) ? impl_->requested_port : -1);
    if (port < 0) throw Error("cannot bind proxy on " + impl_->host);
    impl_->port = port;
    impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
}

void CachingProxy::stop() {
    if (!impl_) return;
    impl_->http.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

int CachingProxy::port() const { return impl_->port; }

std::string CachingProxy::url() const { return "http://" + impl_->host + ":" + std::to_string(impl_->port); }

CacheStats CachingProxy::stats() const {
    std::lock_guard lock(impl_->mu);
    return impl_->stats;
}

}  // namespace ldf::cache
