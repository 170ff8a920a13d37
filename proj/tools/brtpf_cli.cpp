// brtpf: serve, query, benchmark, cache simulation and data generation for TPF / brTPF experiments.

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "ldf/cache.hpp"
#include "ldf/client.hpp"
#include "ldf/error.hpp"
#include "ldf/harness.hpp"
#include "ldf/server.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kRuntime = 2, kMismatch = 3 };

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

int run_serve(const ldf::server::ServerConfig& config) {
    std::unique_ptr<ldf::server::Server> server;
    try {
        server = ldf::server::serve(config);
    } catch (const ldf::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    std::cout << "serving " << server->dataset().size() << " triples at " << server->url()
              << "/fragment (pageSize=" << config.pageSize << ", maxMpR=" << config.maxMpR << ")" << std::endl;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server->stop();
    return kOk;
}

struct QueryArgs {
    std::string engine = "brtpf";
    std::string endpoint;
    std::string query_file;
    std::size_t max_mpr = 30;
    std::string metrics_file;
    std::uint64_t timeout_ms = 300'000;
    bool no_reuse = false;
    bool verify = false;
    std::string data;
};

int run_query(const QueryArgs& a) {
    ldf::client::Engine engine;
    std::vector<ldf::client::BgpQuery> queries;
    try {
        engine = ldf::client::parse_engine(a.engine);
        queries = ldf::client::load_queries(a.query_file);
    } catch (const ldf::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    if (a.verify && a.data.empty()) {
        std::cerr << "error: --verify needs --data\n";
        return kUsage;
    }
    std::optional<ldf::store::Dataset> ds;
    if (a.verify) {
        try {
            ds = ldf::store::load_file(a.data);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kRuntime;
        }
    }

    std::ofstream metrics;
    if (!a.metrics_file.empty()) {
        metrics.open(a.metrics_file);
        if (!metrics) {
            std::cerr << "error: cannot write " << a.metrics_file << '\n';
            return kRuntime;
        }
        metrics << "engine,maxMpR,query,numRequests,dataRecv,wallTimeMs,resultCount,timedOut\n";
    }

    int status = kOk;
    for (const auto& q : queries) {
        ldf::client::ExecOptions opt;
        opt.maxMpR = a.max_mpr;
        opt.reusePlanningPages = !a.no_reuse;
        opt.timeout = std::chrono::milliseconds(a.timeout_ms);
        ldf::client::QueryResult r;
        try {
            ldf::client::HttpSource source(a.endpoint);
            r = ldf::client::execute(engine, q, source, opt);
        } catch (const std::exception& e) {
            std::cerr << "error: " << q.name << ": " << e.what() << '\n';
            return kRuntime;
        }
        std::cout << "# query: " << q.name << '\n';
        for (const auto& mu : r.solutions) std::cout << mu.display() << '\n';
        const auto& m = r.metrics;
        std::cout << "# results=" << m.resultCount << " requests=" << m.numRequests << " dataRecv=" << m.dataRecv
                  << " wallTimeMs=" << std::fixed << std::setprecision(3) << m.wallTimeMs
                  << (m.timedOut ? " timedOut" : "") << '\n';
        std::cout.unsetf(std::ios::floatfield);
        if (metrics.is_open()) {
            metrics << a.engine << ',' << (engine == ldf::client::Engine::Brtpf ? a.max_mpr : 0) << ',' << q.name
                    << ',' << m.numRequests << ',' << m.dataRecv << ',' << std::fixed << std::setprecision(3)
                    << m.wallTimeMs << ',' << m.resultCount << ',' << (m.timedOut ? "true" : "false") << '\n';
            metrics.unsetf(std::ios::floatfield);
        }
        if (m.failed) {
            std::cerr << "error: " << q.name << ": " << m.error << '\n';
            return kRuntime;
        }
        if (m.timedOut) status = std::max(status, static_cast<int>(kRuntime));
        if (a.verify && !m.timedOut) {
            auto expected = ldf::harness::oracle_bgp(*ds, q);
            auto got = r.solutions;
            std::sort(got.begin(), got.end());
            if (got != expected) {
                std::cerr << "mismatch: " << q.name << " returned " << got.size() << " solutions, oracle has "
                          << expected.size() << '\n';
                status = kMismatch;
            }
        }
    }
    return status;
}

int run_bench(const std::string& kind, const std::string& config_file, const std::string& out,
              std::optional<std::uint64_t> seed) {
    try {
        ldf::KeyValues kv;
        if (!config_file.empty()) kv = ldf::KeyValues::load(config_file);
        if (seed) kv.set("seed", std::to_string(*seed));
        auto config = ldf::harness::ExperimentConfig::from(kv);
        ldf::harness::run_bench(kind, config, out);
        std::cout << "bench " << kind << " written to " << out << '\n';
    } catch (const ldf::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}

int run_cache_sim(const std::string& trace_file, const std::vector<std::string>& capacity_text,
                  const std::string& out) {
    std::vector<std::optional<std::size_t>> capacities;
    try {
        for (const auto& c : capacity_text) capacities.push_back(ldf::cache::parse_capacity(c));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    try {
        auto trace = ldf::cache::load_trace(trace_file);
        auto rows = ldf::cache::replay(trace, capacities);
        std::ofstream csv(out);
        if (!csv) throw ldf::Error("cannot write " + out);
        ldf::cache::write_stats_csv(csv, rows);
        std::cout << "replayed " << trace.size() << " requests (" << ldf::cache::distinct_count(trace)
                  << " distinct) over " << rows.size() << " capacities into " << out << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}

int run_gen(std::size_t size, std::uint64_t seed, std::size_t queries, const std::string& out) {
    try {
        ldf::harness::GeneratorParams p;
        p.size = size;
        p.seed = seed;
        p.queries = queries;
        auto w = ldf::harness::gen_data(p);
        ldf::harness::write_workload(w, out);
        std::cout << "wrote " << w.triples.size() << " triples and " << w.queries.size() << " queries to " << out
                  << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"TPF / brTPF server, clients and benchmark harness"};
    app.require_subcommand(1);

    ldf::server::ServerConfig serve_cfg;
    std::string serve_config_file;
    std::string serve_data;
    auto* serve = app.add_subcommand("serve", "Serve a dataset over the TPF/brTPF interface");
    serve->add_option("--config", serve_config_file, "key=value config file");
    serve->add_option("--data", serve_data, "Triple file to serve");
    serve->add_option("--page-size", serve_cfg.pageSize, "Data triples per page")->capture_default_str();
    serve->add_option("--max-mpr", serve_cfg.maxMpR, "Maximum mappings per brTPF request")->capture_default_str();
    serve->add_option("--port", serve_cfg.port, "TCP port (0 = any)")->capture_default_str();
    serve->add_option("--host", serve_cfg.host, "Bind address")->capture_default_str();
    serve->add_option("--uri-limit", serve_cfg.uriLimit, "Longest accepted request URI")->capture_default_str();
    serve->add_option("--meta-base", serve_cfg.metaBase, "Metadata triples per page before links")
        ->capture_default_str();
    serve->add_option("--threads", serve_cfg.threads, "Worker threads")->capture_default_str();

    QueryArgs qa;
    auto* query = app.add_subcommand("query", "Run BGP queries against a server");
    query->add_option("--engine", qa.engine, "tpf or brtpf")->capture_default_str();
    query->add_option("--endpoint", qa.endpoint, "Server URL, e.g. http://127.0.0.1:8080")->required();
    query->add_option("--query", qa.query_file, "Query file")->required();
    query->add_option("--max-mpr", qa.max_mpr, "Mappings per brTPF request")->capture_default_str();
    query->add_option("--metrics", qa.metrics_file, "Write per-query metrics CSV");
    query->add_option("--timeout-ms", qa.timeout_ms, "Per-query timeout")->capture_default_str();
    query->add_flag("--no-reuse", qa.no_reuse, "Re-request planning pages instead of reusing them");
    query->add_flag("--verify", qa.verify, "Compare results with the nested-loop oracle (needs --data)");
    query->add_option("--data", qa.data, "Local copy of the dataset for --verify");

    std::string bench_kind, bench_config, bench_out = "bench-out";
    std::optional<std::uint64_t> bench_seed;
    auto* bench = app.add_subcommand("bench", "Run an experiment: network, throughput or cache");
    bench->add_option("kind", bench_kind, "network | throughput | cache")
        ->required()
        ->check(CLI::IsMember({"network", "throughput", "cache"}));
    bench->add_option("--config", bench_config, "key=value experiment config");
    bench->add_option("--out", bench_out, "Output directory")->capture_default_str();
    bench->add_option("--seed", bench_seed, "Random seed");

    std::string sim_trace, sim_out;
    std::vector<std::string> sim_capacities{"2500", "5000", "10000", "50000", "100000", "250000", "500000",
                                            "unlimited"};
    auto* sim = app.add_subcommand("cache-sim", "Replay a request trace through LRU caches of several sizes");
    sim->add_option("--trace", sim_trace, "Trace file, one request target per line")->required();
    sim->add_option("--capacities", sim_capacities, "Cache capacities (numbers or 'unlimited')")
        ->delimiter(',')
        ->capture_default_str();
    sim->add_option("--out", sim_out, "CSV output file")->required();

    std::size_t gen_size = 10'000, gen_queries = 40;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset and query file");
    gen->add_option("--size", gen_size, "Approximate number of triples")->capture_default_str();
    gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
    gen->add_option("--queries", gen_queries, "Number of queries")->capture_default_str();
    gen->add_option("--out", gen_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    if (*serve) {
        try {
            if (!serve_config_file.empty()) {
                ldf::server::ServerConfig from_file;
                from_file.apply(ldf::KeyValues::load(serve_config_file));
                // Explicit flags win over the file.
                if (serve->count("--page-size") == 0) serve_cfg.pageSize = from_file.pageSize;
                if (serve->count("--max-mpr") == 0) serve_cfg.maxMpR = from_file.maxMpR;
                if (serve->count("--port") == 0) serve_cfg.port = from_file.port;
                if (serve->count("--host") == 0) serve_cfg.host = from_file.host;
                if (serve->count("--uri-limit") == 0) serve_cfg.uriLimit = from_file.uriLimit;
                if (serve->count("--meta-base") == 0) serve_cfg.metaBase = from_file.metaBase;
                if (serve->count("--threads") == 0) serve_cfg.threads = from_file.threads;
                serve_cfg.data = from_file.data;
            }
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kUsage;
        }
        if (!serve_data.empty()) serve_cfg.data = serve_data;
        if (serve_cfg.data.empty()) {
            std::cerr << "error: --data is required\n";
            return kUsage;
        }
        return run_serve(serve_cfg);
    }
    if (*query) return run_query(qa);
    if (*bench) return run_bench(bench_kind, bench_config, bench_out, bench_seed);
    if (*sim) return run_cache_sim(sim_trace, sim_capacities, sim_out);
    if (*gen) return run_gen(gen_size, gen_seed, gen_queries, gen_out);
    return kUsage;
}
