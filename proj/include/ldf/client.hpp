#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldf/fragment.hpp"
#include "ldf/rdf.hpp"
#include "ldf/server.hpp"
#include "ldf/store.hpp"

namespace ldf::client {

/// Something that answers fragment request targets: a remote server, an
/// in-process handler, or a decorator around either.
class FragmentSource {
public:
    virtual ~FragmentSource() = default;
    /// Throws ldf::TransportError when no reply could be obtained.
    virtual server::Reply get(const std::string& target) = 0;
};

/// HTTP GET against `base_url` (e.g. `http://127.0.0.1:8080`) over one keep-alive
/// connection. Not thread-safe; use one instance per executing client.
class HttpSource final : public FragmentSource {
public:
    explicit HttpSource(const std::string& base_url,
                        std::chrono::milliseconds io_timeout = std::chrono::seconds(60));
    ~HttpSource() override;
    server::Reply get(const std::string& target) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Calls the server's request handler directly, without sockets.
class LocalSource final : public FragmentSource {
public:
    LocalSource(const store::Dataset& ds, server::ServerConfig config)
        : ds_(ds), config_(std::move(config)) {}
    server::Reply get(const std::string& target) override {
        return server::handle_request(ds_, config_, target);
    }

private:
    const store::Dataset& ds_;
    server::ServerConfig config_;
};

/// Appends every target it forwards to `sink`.
class RecordingSource final : public FragmentSource {
public:
    RecordingSource(FragmentSource& inner, std::vector<std::string>& sink) : inner_(inner), sink_(sink) {}
    server::Reply get(const std::string& target) override {
        sink_.push_back(target);
        return inner_.get(target);
    }

private:
    FragmentSource& inner_;
    std::vector<std::string>& sink_;
};

struct BgpQuery {
    std::string name;
    std::vector<rdf::TriplePattern> patterns;

    /// Distinct variables in order of first occurrence.
    std::vector<std::string> variables() const;
    /// True if the join graph over non-ground patterns is connected.
    bool connected() const;
};

/// Blocks of `# name: X` followed by one pattern per line, separated by blank lines.
/// Throws ldf::ParseError.
std::vector<BgpQuery> parse_queries(std::istream& in);
std::vector<BgpQuery> load_queries(const std::string& path);
void write_queries(std::ostream& out, const std::vector<BgpQuery>& queries);

enum class Engine { Tpf, Brtpf };
std::string_view engine_name(Engine e);
/// Throws ldf::ConfigError.
Engine parse_engine(std::string_view name);

struct RunMetrics {
    std::uint64_t numRequests = 0;
    /// Data plus metadata triples over all received pages.
    std::uint64_t dataRecv = 0;
    double wallTimeMs = 0;
    bool timedOut = false;
    bool failed = false;
    bool cancelled = false;
    bool cartesian = false;
    std::uint64_t resultCount = 0;
    std::string error;
};

struct QueryPlan {
    std::vector<std::size_t> order;
    std::vector<store::CardinalityEstimate> estimates;
    /// Page 1 of each pattern's TPF fragment, indexed like the query's patterns.
    std::vector<server::PageBody> firstPages;
    /// First pattern (by index) whose fragment is empty, if any.
    std::optional<std::size_t> emptyPattern;
};

/// Left-deep join order: start at the smallest estimate, then repeatedly take the
/// smallest-estimate pattern sharing a variable with those already placed, falling
/// back to the smallest remaining one. Ties go to the lowest index.
std::vector<std::size_t> order_patterns(const std::vector<rdf::TriplePattern>& patterns,
                                        const std::vector<std::uint64_t>& estimates);

struct ExecOptions {
    std::size_t maxMpR = 30;
    /// Reuse planning pages as first data pages instead of requesting them again.
    bool reusePlanningPages = true;
    std::optional<std::chrono::milliseconds> timeout;
    /// Cooperative cancellation, checked before every request.
    const std::atomic<bool>* cancel = nullptr;
};

struct QueryResult {
    std::vector<rdf::SolutionMapping> solutions;
    RunMetrics metrics;
};

/// Requests page 1 of every pattern and orders them. Counts requests in `metrics`.
QueryPlan plan(const BgpQuery& query, FragmentSource& source, RunMetrics& metrics);

/// Bind-join pipeline over brTPF requests carrying at most `maxMpR` mappings.
/// Server 400/414 answers are rethrown as ldf::HttpStatusError; transport errors
/// and timeouts end the run with flags set in the metrics.
QueryResult execute_brtpf(const BgpQuery& query, FragmentSource& source, const ExecOptions& options);

/// Recursive TPF evaluation that re-estimates the remaining patterns at every level.
QueryResult execute_tpf(const BgpQuery& query, FragmentSource& source, const ExecOptions& options);

QueryResult execute(Engine engine, const BgpQuery& query, FragmentSource& source,
                    const ExecOptions& options);

}  // namespace ldf::client
