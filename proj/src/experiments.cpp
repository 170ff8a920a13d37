#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <ostream>
#include <sstream>
#include <thread>

#include <sys/wait.h>
#include <unistd.h>

#include "ldf/error.hpp"
#include "ldf/harness.hpp"
#include "ldf/server.hpp"

namespace ldf::harness {

namespace {

using Clock = std::chrono::steady_clock;

// A dataset served either over HTTP or through the in-process handler.
class Backend {
public:
    Backend(std::shared_ptr<const store::Dataset> ds, server::ServerConfig config, Transport transport)
        : ds_(std::move(ds)), config_(std::move(config)), transport_(transport) {
        if (transport_ == Transport::Http) {
            server_ = std::make_unique<server::Server>(ds_, config_);
            server_->start();
        }
    }

    std::unique_ptr<client::FragmentSource> connect(std::chrono::milliseconds io_timeout) const {
        if (server_) return std::make_unique<client::HttpSource>(server_->url(), io_timeout);
        return std::make_unique<client::LocalSource>(*ds_, config_);
    }

    std::string url() const { return server_ ? server_->url() : std::string{}; }

private:
    std::shared_ptr<const store::Dataset> ds_;
    server::ServerConfig config_;
    Transport transport_;
    std::unique_ptr<server::Server> server_;
};

server::ServerConfig server_config(const ExperimentConfig& config, std::size_t page_size, std::size_t max_mpr) {
    server::ServerConfig sc;
    sc.pageSize = page_size;
    sc.maxMpR = max_mpr;
    sc.uriLimit = config.uriLimit;
    sc.metaBase = config.metaBase;
    sc.threads = std::max<std::size_t>(32, config.clientCount * 2 + 4);
    return sc;
}

std::chrono::milliseconds io_timeout(const ExperimentConfig& config) {
    return std::chrono::milliseconds(std::max<std::uint64_t>(config.timeoutMs, 1000) + 5000);
}

std::string fmt_double(double v, int precision) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << v;
    return os.str();
}

std::string bucket(std::int64_t diff) {
    std::uint64_t mag = static_cast<std::uint64_t>(diff < 0 ? -diff : diff);
    if (mag == 0) return "same";
    std::string side = diff > 0 ? "better:" : "worse:";
    if (mag < 10) return side + "1-9";
    if (mag < 100) return side + "10-99";
    if (mag < 1000) return side + "100-999";
    if (mag < 10000) return side + "1000-9999";
    return side + ">=10000";
}

// Runs one query in a forked child over its own connection. The child reports
// metrics and its request trace over a pipe, one item per line.
client::RunMetrics run_in_child(const std::string& url, std::chrono::milliseconds io, client::Engine engine,
                                const client::BgpQuery& q, const client::ExecOptions& opt,
                                std::vector<std::string>& trace) {
    int fds[2];
    if (pipe(fds) != 0) throw Error("pipe failed");
    std::cout.flush();
    pid_t pid = fork();
    if (pid < 0) throw Error("fork failed");
    if (pid == 0) {
        close(fds[0]);
        std::ostringstream os;
        std::vector<std::string> local;
        client::RunMetrics m;
        try {
            client::HttpSource source(url, io);
            client::RecordingSource recorder(source, local);
            m = client::execute(engine, q, recorder, opt).metrics;
        } catch (const std::exception&) {
            m.failed = true;
        }
        os << m.numRequests << ' ' << m.dataRecv << ' ' << fmt_double(m.wallTimeMs, 6) << ' ' << m.timedOut << ' '
           << m.failed << ' ' << m.cancelled << ' ' << m.cartesian << ' ' << m.resultCount << '\n';
        for (const auto& t : local) os << t << '\n';
        std::string payload = os.str();
        const char* p = payload.data();
        std::size_t left = payload.size();
        while (left > 0) {
            ssize_t n = write(fds[1], p, left);
            if (n <= 0) _exit(1);
            p += n;
            left -= static_cast<std::size_t>(n);
        }
        close(fds[1]);
        _exit(0);
    }
    close(fds[1]);
    std::string payload;
    char buf[65536];
    for (;;) {
        ssize_t n = read(fds[0], buf, sizeof buf);
        if (n <= 0) break;
        payload.append(buf, static_cast<std::size_t>(n));
    }
    close(fds[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    client::RunMetrics m;
    std::istringstream in(payload);
    std::string line;
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0 || !std::getline(in, line)) {
        m.failed = true;
        m.error = "child process failed";
        return m;
    }
    std::istringstream head(line);
    head >> m.numRequests >> m.dataRecv >> m.wallTimeMs >> m.timedOut >> m.failed >> m.cancelled >> m.cartesian >>
        m.resultCount;
    while (std::getline(in, line)) trace.push_back(line);
    return m;
}

std::shared_ptr<const store::Dataset> make_dataset(const Workload& w) {
    return std::make_shared<const store::Dataset>(store::Dataset::from_triples(w.triples));
}

}  // namespace

std::string RunKey::label() const {
    std::string out(client::engine_name(engine));
    if (engine == client::Engine::Brtpf) out += "_mpr" + std::to_string(maxMpR);
    out += "_ps" + std::to_string(pageSize);
    return out;
}

ExperimentConfig ExperimentConfig::from(const KeyValues& kv) {
    ExperimentConfig c;
    if (kv.has("engines")) {
        c.engines.clear();
        for (const auto& e : kv.get_list("engines", {})) c.engines.push_back(client::parse_engine(e));
    }
    auto to_sizes = [](const std::vector<std::uint64_t>& v) { return std::vector<std::size_t>(v.begin(), v.end()); };
    c.maxMpRs = to_sizes(kv.get_uint_list("maxMpR", {c.maxMpRs.begin(), c.maxMpRs.end()}));
    c.pageSizes = to_sizes(kv.get_uint_list("pageSize", {c.pageSizes.begin(), c.pageSizes.end()}));
    c.clientCount = kv.get_uint("clients", c.clientCount);
    c.timeoutMs = kv.get_uint("timeoutMs", c.timeoutMs);
    c.durationMs = kv.get_uint("durationMs", c.durationMs);
    c.throughputMaxMpR = kv.get_uint("throughputMaxMpR", c.throughputMaxMpR);
    if (kv.has("cacheCapacities")) {
        c.cacheCapacities.clear();
        for (const auto& s : kv.get_list("cacheCapacities", {})) c.cacheCapacities.push_back(cache::parse_capacity(s));
    }
    if (kv.has("proxyCapacity")) c.proxyCapacity = cache::parse_capacity(kv.get("proxyCapacity", ""));
    c.cacheThroughput = kv.get_bool("cacheThroughput", c.cacheThroughput);
    c.reusePlanningPages = kv.get_bool("reusePlanningPages", c.reusePlanningPages);
    c.deterministic = kv.get_bool("deterministic", c.deterministic);
    std::string transport = kv.get("transport", "http");
    if (transport == "http") c.transport = Transport::Http;
    else if (transport == "inproc") c.transport = Transport::InProcess;
    else throw ConfigError("transport must be http or inproc");
    std::string isolation = kv.get("isolation", "thread");
    if (isolation == "process") c.processIsolation = true;
    else if (isolation != "thread") throw ConfigError("isolation must be thread or process");
    if (c.processIsolation && c.transport != Transport::Http) throw ConfigError("isolation=process needs transport=http");
    c.uriLimit = kv.get_uint("uriLimit", c.uriLimit);
    c.metaBase = static_cast<std::uint32_t>(kv.get_uint("metaBase", c.metaBase));
    c.generator.seed = kv.get_uint("seed", c.generator.seed);
    c.generator.size = kv.get_uint("size", c.generator.size);
    c.generator.queries = kv.get_uint("queryCount", c.generator.queries);
    if (kv.has("data")) c.data = kv.get("data", "");
    if (kv.has("queries")) c.queries = kv.get("queries", "");

    if (c.engines.empty()) throw ConfigError("engines must not be empty");
    if (c.pageSizes.empty()) throw ConfigError("pageSize must not be empty");
    if (c.clientCount < 1) throw ConfigError("clients must be >= 1");
    for (auto m : c.maxMpRs)
        if (m < 1) throw ConfigError("maxMpR values must be >= 1");
    for (auto p : c.pageSizes)
        if (p < 1) throw ConfigError("pageSize values must be >= 1");
    return c;
}

std::size_t ExperimentConfig::serverMaxMpR() const {
    std::size_t m = throughputMaxMpR;
    for (auto v : maxMpRs) m = std::max(m, v);
    return m;
}

Workload prepare_workload(const ExperimentConfig& config) {
    if (config.data.empty() != config.queries.empty())
        throw ConfigError("data and queries must be given together");
    if (config.data.empty()) return gen_data(config.generator);
    Workload w;
    w.triples = store::load_file(config.data).triples();
    w.queries = client::load_queries(config.queries.string());
    return w;
}

std::uint64_t SweepResult::sum_requests(const RunKey& k, bool join_only) const {
    std::uint64_t s = 0;
    for (const auto& r : rows)
        if (RunKey{r.engine, r.maxMpR, r.pageSize} == k && (!join_only || r.joinHeavy)) s += r.metrics.numRequests;
    return s;
}

std::uint64_t SweepResult::sum_data_recv(const RunKey& k, bool join_only) const {
    std::uint64_t s = 0;
    for (const auto& r : rows)
        if (RunKey{r.engine, r.maxMpR, r.pageSize} == k && (!join_only || r.joinHeavy)) s += r.metrics.dataRecv;
    return s;
}

SweepResult run_network_sweep(const ExperimentConfig& config, const Workload& workload) {
    SweepResult result;
    auto ds = make_dataset(workload);
    for (std::size_t ps : config.pageSizes) {
        Backend backend(ds, server_config(config, ps, config.serverMaxMpR()), config.transport);
        for (auto engine : config.engines) {
            std::vector<std::size_t> mprs =
                engine == client::Engine::Tpf ? std::vector<std::size_t>{0} : config.maxMpRs;
            for (std::size_t mpr : mprs) {
                RunKey key{engine, mpr, ps};
                auto& trace = result.traces[key];
                for (const auto& q : workload.queries) {
                    client::ExecOptions opt;
                    opt.maxMpR = mpr ? mpr : 1;
                    opt.reusePlanningPages = config.reusePlanningPages;
                    opt.timeout = std::chrono::milliseconds(config.timeoutMs);
                    if (config.processIsolation) {
                        auto m = run_in_child(backend.url(), io_timeout(config), engine, q, opt, trace);
                        result.rows.push_back({engine, mpr, ps, q.name, join_heavy(q), std::move(m)});
                        continue;
                    }
                    auto source = backend.connect(io_timeout(config));
                    client::RecordingSource recorder(*source, trace);
                    auto r = client::execute(engine, q, recorder, opt);
                    result.rows.push_back({engine, mpr, ps, q.name, join_heavy(q), std::move(r.metrics)});
                }
            }
        }
    }
    return result;
}

void write_network_csv(std::ostream& out, const SweepResult& sweep, bool deterministic) {
    out << "engine,maxMpR,pageSize,query,numRequests,dataRecv,wallTimeMs,resultCount,timedOut\n";
    for (const auto& r : sweep.rows) {
        out << client::engine_name(r.engine) << ',' << r.maxMpR << ',' << r.pageSize << ',' << r.query << ','
            << r.metrics.numRequests << ',' << r.metrics.dataRecv << ','
            << (deterministic ? std::string("0") : fmt_double(r.metrics.wallTimeMs, 3)) << ','
            << r.metrics.resultCount << ',' << (r.metrics.timedOut ? "true" : "false") << '\n';
    }
}

namespace {

// Pairs each brTPF row with the TPF row for the same query and page size.
template <typename Fn>
void for_each_pair(const SweepResult& sweep, Fn&& fn) {
    std::map<std::pair<std::size_t, std::string>, const NetworkRow*> tpf;
    for (const auto& r : sweep.rows)
        if (r.engine == client::Engine::Tpf) tpf[{r.pageSize, r.query}] = &r;
    for (const auto& r : sweep.rows) {
        if (r.engine != client::Engine::Brtpf) continue;
        auto it = tpf.find({r.pageSize, r.query});
        if (it != tpf.end()) fn(r, *it->second);
    }
}

}  // namespace

void write_network_summary(std::ostream& out, const SweepResult& sweep) {
    struct Agg {
        std::uint64_t queries = 0, req = 0, recv = 0, joinReq = 0, joinRecv = 0, timeouts = 0;
        std::uint64_t reqCmp[3] = {0, 0, 0}, recvCmp[3] = {0, 0, 0};  // better, same, worse
    };
    std::map<RunKey, Agg> aggs;
    for (const auto& r : sweep.rows) {
        auto& a = aggs[{r.engine, r.maxMpR, r.pageSize}];
        ++a.queries;
        a.req += r.metrics.numRequests;
        a.recv += r.metrics.dataRecv;
        a.timeouts += r.metrics.timedOut ? 1 : 0;
        if (r.joinHeavy) {
            a.joinReq += r.metrics.numRequests;
            a.joinRecv += r.metrics.dataRecv;
        }
    }
    auto cmp = [](std::uint64_t mine, std::uint64_t theirs) { return mine < theirs ? 0 : (mine == theirs ? 1 : 2); };
    for_each_pair(sweep, [&](const NetworkRow& b, const NetworkRow& t) {
        auto& a = aggs[{b.engine, b.maxMpR, b.pageSize}];
        ++a.reqCmp[cmp(b.metrics.numRequests, t.metrics.numRequests)];
        ++a.recvCmp[cmp(b.metrics.dataRecv, t.metrics.dataRecv)];
    });
    out << "engine,maxMpR,pageSize,queries,sumRequests,sumDataRecv,joinSumRequests,joinSumDataRecv,timeouts,"
           "reqBetter,reqSame,reqWorse,recvBetter,recvSame,recvWorse\n";
    for (const auto& [k, a] : aggs) {
        out << client::engine_name(k.engine) << ',' << k.maxMpR << ',' << k.pageSize << ',' << a.queries << ','
            << a.req << ',' << a.recv << ',' << a.joinReq << ',' << a.joinRecv << ',' << a.timeouts << ','
            << a.reqCmp[0] << ',' << a.reqCmp[1] << ',' << a.reqCmp[2] << ',' << a.recvCmp[0] << ','
            << a.recvCmp[1] << ',' << a.recvCmp[2] << '\n';
    }
}

void write_network_breakdown(std::ostream& out, const SweepResult& sweep) {
    std::map<std::tuple<RunKey, std::string, std::string>, std::uint64_t> counts;
    for_each_pair(sweep, [&](const NetworkRow& b, const NetworkRow& t) {
        RunKey k{b.engine, b.maxMpR, b.pageSize};
        auto dreq = static_cast<std::int64_t>(t.metrics.numRequests) - static_cast<std::int64_t>(b.metrics.numRequests);
        auto drecv = static_cast<std::int64_t>(t.metrics.dataRecv) - static_cast<std::int64_t>(b.metrics.dataRecv);
        ++counts[{k, "numRequests", bucket(dreq)}];
        ++counts[{k, "dataRecv", bucket(drecv)}];
    });
    out << "engine,maxMpR,pageSize,metric,bucket,queries\n";
    for (const auto& [key, n] : counts) {
        const auto& [k, metric, b] = key;
        out << client::engine_name(k.engine) << ',' << k.maxMpR << ',' << k.pageSize << ',' << metric << ',' << b
            << ',' << n << '\n';
    }
}

ThroughputReport run_throughput(const ExperimentConfig& config, const Workload& workload, client::Engine engine,
                                bool with_cache) {
    if (workload.queries.size() < config.clientCount)
        throw ConfigError("throughput needs at least as many queries as clients");
    auto ds = make_dataset(workload);
    server::Server server(ds, server_config(config, config.pageSizes.front(), config.serverMaxMpR()));
    server.start();
    std::unique_ptr<cache::CachingProxy> proxy;
    std::string endpoint = server.url();
    if (with_cache) {
        proxy = std::make_unique<cache::CachingProxy>(server.url(), config.proxyCapacity, "127.0.0.1", 0,
                                                      std::max<std::size_t>(32, config.clientCount * 2 + 4));
        proxy->start();
        endpoint = proxy->url();
    }

    struct ClientTally {
        std::uint64_t completed = 0, timeouts = 0, failures = 0;
        std::vector<double> wall;
    };
    std::vector<ClientTally> tallies(config.clientCount);
    std::atomic<bool> stop{false};
    const auto window_end = Clock::now() + std::chrono::milliseconds(config.durationMs);

    std::vector<std::thread> threads;
    for (std::size_t c = 0; c < config.clientCount; ++c) {
        threads.emplace_back([&, c] {
            std::vector<const client::BgpQuery*> mine;
            for (std::size_t j = c; j < workload.queries.size(); j += config.clientCount)
                mine.push_back(&workload.queries[j]);
            auto& tally = tallies[c];
            for (std::size_t i = 0; !stop.load(); i = (i + 1) % mine.size()) {
                client::ExecOptions opt;
                opt.maxMpR = config.throughputMaxMpR;
                opt.reusePlanningPages = config.reusePlanningPages;
                opt.timeout = std::chrono::milliseconds(config.timeoutMs);
                opt.cancel = &stop;
                client::QueryResult r;
                try {
                    client::HttpSource source(endpoint, io_timeout(config));
                    r = client::execute(engine, *mine[i], source, opt);
                } catch (const Error&) {
                    ++tally.failures;
                    continue;
                }
                if (r.metrics.cancelled || Clock::now() > window_end) break;
                if (r.metrics.timedOut) ++tally.timeouts;
                else if (r.metrics.failed) ++tally.failures;
                else {
                    ++tally.completed;
                    tally.wall.push_back(r.metrics.wallTimeMs);
                }
            }
        });
    }
    std::this_thread::sleep_until(window_end);
    stop = true;
    for (auto& t : threads) t.join();

    ThroughputReport rep;
    rep.engine = engine;
    rep.clients = config.clientCount;
    rep.cache = with_cache ? (config.proxyCapacity ? std::to_string(*config.proxyCapacity) : "unlimited") : "none";
    for (auto& t : tallies) {
        rep.completed += t.completed;
        rep.timeouts += t.timeouts;
        rep.failures += t.failures;
        rep.completedWallTimesMs.insert(rep.completedWallTimesMs.end(), t.wall.begin(), t.wall.end());
    }
    rep.attempted = rep.completed + rep.timeouts;
    const double hours = static_cast<double>(config.durationMs) / 3'600'000.0;
    rep.throughputCompleted = static_cast<double>(rep.completed) / hours;
    rep.throughputAll = static_cast<double>(rep.attempted) / hours;
    const auto& w = rep.completedWallTimesMs;
    if (!w.empty()) {
        double sum = 0;
        for (double x : w) sum += x;
        rep.qetMeanMs = sum / static_cast<double>(w.size());
        if (w.size() > 1) {
            double ss = 0;
            for (double x : w) ss += (x - rep.qetMeanMs) * (x - rep.qetMeanMs);
            rep.qetStdevMs = std::sqrt(ss / static_cast<double>(w.size() - 1));
        }
    }
    if (proxy) {
        rep.cacheStats = proxy->stats();
        proxy->stop();
    }
    return rep;
}

void write_throughput_csv(std::ostream& out, const std::vector<ThroughputReport>& reports) {
    out << "engine,clients,cache,completed,attempted,timeouts,throughputCompleted,throughputAll,qetMeanMs,qetStdevMs\n";
    for (const auto& r : reports) {
        out << client::engine_name(r.engine) << ',' << r.clients << ',' << r.cache << ',' << r.completed << ','
            << r.attempted << ',' << r.timeouts << ',' << fmt_double(r.throughputCompleted, 1) << ','
            << fmt_double(r.throughputAll, 1) << ',' << fmt_double(r.qetMeanMs, 3) << ','
            << fmt_double(r.qetStdevMs, 3) << '\n';
    }
}

CacheExperimentResult run_cache_experiment(const ExperimentConfig& config, const Workload& workload,
                                           const std::filesystem::path& out_dir) {
    CacheExperimentResult res;
    res.sweep = run_network_sweep(config, workload);
    std::filesystem::create_directories(out_dir / "traces");
    std::ofstream summary(out_dir / "cache_summary.csv");
    summary << "engine,maxMpR,pageSize,requests,distinct,unlimitedHits,hitRate\n";
    for (const auto& [key, trace] : res.sweep.traces) {
        {
            std::ofstream t(out_dir / "traces" / (key.label() + ".txt"));
            cache::write_trace(t, trace);
        }
        auto rows = cache::replay(trace, config.cacheCapacities);
        std::ofstream csv(out_dir / ("cache_" + key.label() + ".csv"));
        cache::write_stats_csv(csv, rows);
        auto unlimited = cache::replay(trace, {std::nullopt}).front().stats;
        summary << client::engine_name(key.engine) << ',' << key.maxMpR << ',' << key.pageSize << ','
                << trace.size() << ',' << cache::distinct_count(trace) << ',' << unlimited.hits << ','
                << fmt_double(unlimited.hitRate(), 6) << '\n';
        res.curves[key] = std::move(rows);
    }
    if (config.cacheThroughput) {
        for (auto engine : config.engines) {
            res.throughput.push_back(run_throughput(config, workload, engine, false));
            res.throughput.push_back(run_throughput(config, workload, engine, true));
        }
        std::ofstream t(out_dir / "throughput_cache.csv");
        write_throughput_csv(t, res.throughput);
    }
    return res;
}

void run_bench(const std::string& kind, const ExperimentConfig& config, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    Workload workload = prepare_workload(config);
    if (kind == "network") {
        auto sweep = run_network_sweep(config, workload);
        std::ofstream csv(out_dir / "network.csv");
        write_network_csv(csv, sweep, config.deterministic);
        std::ofstream summary(out_dir / "network_summary.csv");
        write_network_summary(summary, sweep);
        std::ofstream breakdown(out_dir / "network_breakdown.csv");
        write_network_breakdown(breakdown, sweep);
        std::filesystem::create_directories(out_dir / "traces");
        for (const auto& [key, trace] : sweep.traces) {
            std::ofstream t(out_dir / "traces" / (key.label() + ".txt"));
            cache::write_trace(t, trace);
        }
    } else if (kind == "throughput") {
        std::vector<ThroughputReport> reports;
        for (auto engine : config.engines) reports.push_back(run_throughput(config, workload, engine, false));
        std::ofstream csv(out_dir / "throughput.csv");
        write_throughput_csv(csv, reports);
    } else if (kind == "cache") {
        run_cache_experiment(config, workload, out_dir);
    } else {
        throw ConfigError("unknown bench kind '" + kind + "' (expected network, throughput or cache)");
    }
}

}  // namespace ldf::harness
