#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldf/cache.hpp"
#include "ldf/client.hpp"
#include "ldf/config.hpp"
#include "ldf/error.hpp"
#include "ldf/store.hpp"

namespace ldf::harness {

class OracleRefused : public Error {
public:
    using Error::Error;
};

/// Upper bound on patterns x triples accepted by oracle_bgp.
inline constexpr std::uint64_t kOracleCandidateLimit = 100'000;

/// Exhaustive nested-loop BGP evaluation straight over the triple list, independent
/// of the store indexes. Result is projected, duplicate-free and sorted.
/// Throws OracleRefused when the dataset is too large for nested loops.
std::vector<rdf::SolutionMapping> oracle_bgp(const store::Dataset& ds, const client::BgpQuery& query);

struct GeneratorParams {
    std::uint64_t seed = 1;
    std::size_t size = 10'000;  // approximate number of triples
    std::size_t queries = 40;
    std::size_t followFanout = 3;
    std::size_t likeFanout = 2;
    std::size_t genres = 20;
    std::size_t cities = 40;
};

struct Workload {
    std::vector<rdf::Triple> triples;
    std::vector<client::BgpQuery> queries;
};

/// Seeded social/commerce graph with star, path, snowflake and cyclic query
/// templates of 1-5 patterns. Constants come from small pools, so instances repeat
/// and share patterns.
Workload gen_data(const GeneratorParams& params);

/// Writes `data.nt` and `queries.txt` into `dir`.
void write_workload(const Workload& w, const std::filesystem::path& dir);

/// Fraction of queries with at least one pattern that also occurs in another query.
double shared_pattern_fraction(const std::vector<client::BgpQuery>& queries);

bool join_heavy(const client::BgpQuery& q);

enum class Transport { Http, InProcess };

struct ExperimentConfig {
    std::vector<client::Engine> engines{client::Engine::Tpf, client::Engine::Brtpf};
    std::vector<std::size_t> maxMpRs{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
    std::vector<std::size_t> pageSizes{100};
    std::size_t clientCount = 4;
    std::uint64_t timeoutMs = 300'000;
    std::uint64_t durationMs = 60'000;
    std::size_t throughputMaxMpR = 30;
    std::vector<std::optional<std::size_t>> cacheCapacities{2500,   5000,   10000,  50000,
                                                            100000, 250000, 500000, std::nullopt};
    std::optional<std::size_t> proxyCapacity;  // nullopt = unlimited
    bool cacheThroughput = true;
    bool reusePlanningPages = true;
    bool deterministic = false;  // writes wallTimeMs as 0
    Transport transport = Transport::Http;
    /// Runs every sweep query in a forked child process (HTTP transport only).
    bool processIsolation = false;
    std::size_t uriLimit = 8000;
    std::uint32_t metaBase = 3;
    GeneratorParams generator;
    std::filesystem::path data;     // optional: use instead of generating
    std::filesystem::path queries;  // optional: use instead of generating

    static ExperimentConfig from(const KeyValues& kv);
    /// Server-side maxMpR: the largest swept value.
    std::size_t serverMaxMpR() const;
};

struct NetworkRow {
    client::Engine engine;
    std::size_t maxMpR = 0;  // 0 for TPF
    std::size_t pageSize = 0;
    std::string query;
    bool joinHeavy = false;
    client::RunMetrics metrics;
};

struct RunKey {
    client::Engine engine;
    std::size_t maxMpR;
    std::size_t pageSize;
    friend auto operator<=>(const RunKey&, const RunKey&) = default;
    std::string label() const;
};

struct SweepResult {
    std::vector<NetworkRow> rows;
    std::map<RunKey, std::vector<std::string>> traces;

    std::uint64_t sum_requests(const RunKey& k, bool join_only = false) const;
    std::uint64_t sum_data_recv(const RunKey& k, bool join_only = false) const;
};

/// Loads the configured data/queries or generates them.
Workload prepare_workload(const ExperimentConfig& config);

/// Single client, fresh engine per query, one run per (engine, maxMpR, pageSize).
SweepResult run_network_sweep(const ExperimentConfig& config, const Workload& workload);

/// `engine,maxMpR,pageSize,query,numRequests,dataRecv,wallTimeMs,resultCount,timedOut`
void write_network_csv(std::ostream& out, const SweepResult& sweep, bool deterministic);
/// Per run sums and better/same/worse counts against TPF at the same page size.
void write_network_summary(std::ostream& out, const SweepResult& sweep);
/// Per-query brTPF-vs-TPF difference magnitudes in decade buckets.
void write_network_breakdown(std::ostream& out, const SweepResult& sweep);

struct ThroughputReport {
    client::Engine engine;
    std::size_t clients = 0;
    std::string cache = "none";
    std::uint64_t completed = 0;
    std::uint64_t attempted = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t failures = 0;
    double throughputCompleted = 0;  // queries per hour
    double throughputAll = 0;
    double qetMeanMs = 0;
    double qetStdevMs = 0;
    std::vector<double> completedWallTimesMs;
    std::optional<cache::CacheStats> cacheStats;
};

/// `clientCount` concurrent clients against one HTTP server (optionally behind a
/// caching proxy), each cycling its own disjoint query list for `durationMs`.
ThroughputReport run_throughput(const ExperimentConfig& config, const Workload& workload,
                                client::Engine engine, bool with_cache);

/// `engine,clients,cache,completed,attempted,timeouts,throughputCompleted,throughputAll,qetMeanMs,qetStdevMs`
void write_throughput_csv(std::ostream& out, const std::vector<ThroughputReport>& reports);

struct CacheExperimentResult {
    SweepResult sweep;
    std::map<RunKey, std::vector<cache::ReplayRow>> curves;
    std::vector<ThroughputReport> throughput;
};

/// Replays recorded traces over all capacities, then compares throughput with and
/// without a caching proxy.
CacheExperimentResult run_cache_experiment(const ExperimentConfig& config, const Workload& workload,
                                           const std::filesystem::path& out_dir);

/// `bench network|throughput|cache` entry point: writes CSVs into `out_dir`.
void run_bench(const std::string& kind, const ExperimentConfig& config, const std::filesystem::path& out_dir);

}  // namespace ldf::harness
