#include "ldf/client.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ldf/error.hpp"

namespace ldf::client {

namespace {

using Clock = std::chrono::steady_clock;

struct Cancelled {};

// Issues page requests for one execution and accounts for them.
class Session {
public:
    Session(FragmentSource& source, RunMetrics& metrics, const ExecOptions& options)
        : source_(source), metrics_(metrics), cancel_(options.cancel) {
        if (options.timeout) deadline_ = Clock::now() + *options.timeout;
    }

    server::PageBody fetch(const fragment::FragmentRequest& req) {
        if (cancel_ && cancel_->load(std::memory_order_relaxed)) throw Cancelled{};
        if (deadline_ && Clock::now() >= *deadline_) throw TimeoutError();
        server::Reply reply = source_.get(fragment::to_target(req));
        ++metrics_.numRequests;
        if (reply.status != 200) {
            std::string reason = reply.body;
            while (!reason.empty() && reason.back() == '\n') reason.pop_back();
            throw HttpStatusError(reply.status, reason);
        }
        server::PageBody body;
        try {
            body = server::parse_page_body(reply.body);
        } catch (const ParseError& e) {
            throw TransportError(std::string("unreadable page: ") + e.what());
        }
        metrics_.dataRecv += body.data.size() + body.meta;
        return body;
    }

    /// Visits every page of a fragment, starting from an already received page 1 if given.
    template <typename Fn>
    void for_each_page(const fragment::FragmentRequest& first_req, std::optional<server::PageBody> first,
                       Fn&& on_page) {
        fragment::FragmentRequest req = first_req.with_page(1);
        server::PageBody page = first ? std::move(*first) : fetch(req);
        while (true) {
            on_page(page);
            if (!page.hasNext) break;
            req.page += 1;
            page = fetch(req);
        }
    }

private:
    FragmentSource& source_;
    RunMetrics& metrics_;
    const std::atomic<bool>* cancel_;
    std::optional<Clock::time_point> deadline_;
};

fragment::FragmentRequest tpf_request(const rdf::TriplePattern& tp) { return {tp, {}, 1}; }

class SolutionSink {
public:
    void add(rdf::SolutionMapping mu) {
        if (seen_.insert(mu).second) solutions_.push_back(std::move(mu));
    }
    std::vector<rdf::SolutionMapping> take() { return std::move(solutions_); }

private:
    std::set<rdf::SolutionMapping> seen_;
    std::vector<rdf::SolutionMapping> solutions_;
};

template <typename Body>
QueryResult run_guarded(const BgpQuery& query, Body&& body) {
    QueryResult result;
    auto& m = result.metrics;
    m.cartesian = !query.connected();
    SolutionSink sink;
    auto start = Clock::now();
    try {
        body(sink, m);
    } catch (const TimeoutError&) {
        m.timedOut = true;
    } catch (const Cancelled&) {
        m.cancelled = true;
    } catch (const TransportError& e) {
        m.failed = true;
        m.error = e.what();
    }
    m.wallTimeMs = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    result.solutions = sink.take();
    m.resultCount = result.solutions.size();
    return result;
}

QueryPlan plan_with(const BgpQuery& query, Session& session) {
    QueryPlan p;
    std::vector<std::uint64_t> counts;
    for (std::size_t i = 0; i < query.patterns.size(); ++i) {
        p.firstPages.push_back(session.fetch(tpf_request(query.patterns[i])));
        p.estimates.push_back({p.firstPages.back().count, 0});
        counts.push_back(p.firstPages.back().count);
        if (counts.back() == 0 && !p.emptyPattern) p.emptyPattern = i;
    }
    p.order = order_patterns(query.patterns, counts);
    return p;
}

// Left-deep bind-join pipeline; stage k evaluates pattern order[k].
class BrtpfPipeline {
public:
    BrtpfPipeline(const BgpQuery& query, QueryPlan& plan, Session& session, SolutionSink& sink,
                  const ExecOptions& options)
        : query_(query), plan_(plan), session_(session), sink_(sink), options_(options) {
        const std::size_t n = plan.order.size();
        buffers_.resize(n);
        shared_.resize(n);
        cartesian_cache_.resize(n);
        std::vector<std::string> bound;
        for (std::size_t k = 0; k < n; ++k) {
            const auto& tp = pattern(k);
            for (const auto& v : tp.variables())
                if (std::find(bound.begin(), bound.end(), v) != bound.end()) shared_[k].push_back(v);
            for (const auto& v : tp.variables())
                if (std::find(bound.begin(), bound.end(), v) == bound.end()) bound.push_back(v);
        }
    }

    void run() {
        const std::size_t first = plan_.order[0];
        std::optional<server::PageBody> page1;
        if (options_.reusePlanningPages) page1 = std::move(plan_.firstPages[first]);
        const auto& tp = pattern(0);
        session_.for_each_page(tpf_request(tp), std::move(page1), [&](const server::PageBody& page) {
            for (const auto& t : page.data)
                if (auto mu = rdf::induced_mapping(t, tp)) push(1, std::move(*mu));
        });
        for (std::size_t k = 1; k < buffers_.size(); ++k)
            if (!buffers_[k].empty()) flush(k);
    }

private:
    const rdf::TriplePattern& pattern(std::size_t stage) const { return query_.patterns[plan_.order[stage]]; }

    void push(std::size_t stage, rdf::SolutionMapping mu) {
        if (stage == buffers_.size()) {
            sink_.add(std::move(mu));
            return;
        }
        buffers_[stage].push_back(std::move(mu));
        if (buffers_[stage].size() >= options_.maxMpR) flush(stage);
    }

    void flush(std::size_t stage) {
        std::vector<rdf::SolutionMapping> chunk = std::move(buffers_[stage]);
        buffers_[stage].clear();
        const auto& tp = pattern(stage);

        if (shared_[stage].empty()) {
            auto& rows = cartesian_cache_[stage];
            if (!rows) {
                rows.emplace();
                session_.for_each_page(tpf_request(tp), std::nullopt, [&](const server::PageBody& page) {
                    for (const auto& t : page.data)
                        if (auto mu = rdf::induced_mapping(t, tp)) rows->push_back(std::move(*mu));
                });
            }
            for (const auto& in : chunk)
                for (const auto& row : *rows) push(stage + 1, rdf::merge(in, row));
            return;
        }

        // Distinct projections onto the shared variables form the request's bindings;
        // each remembers the chunk entries it stands for.
        rdf::MappingSequence omega;
        std::map<rdf::SolutionMapping, std::vector<std::size_t>> fanout;
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            rdf::SolutionMapping key = chunk[i].project(shared_[stage]);
            auto it = fanout.find(key);
            if (it != fanout.end()) {
                it->second.push_back(i);
                continue;
            }
            try {
                (void)rdf::apply(key, tp);
            } catch (const BindingError&) {
                continue;  // ill-typed binding, cannot match any triple
            }
            fanout.emplace(key, std::vector<std::size_t>{i});
            omega.push_back(std::move(key));
        }
        if (omega.empty()) return;

        fragment::FragmentRequest req{tp, std::move(omega), 1};
        session_.for_each_page(req, std::nullopt, [&](const server::PageBody& page) {
            for (const auto& t : page.data) {
                auto mu_t = rdf::induced_mapping(t, tp);
                if (!mu_t) continue;
                auto it = fanout.find(mu_t->project(shared_[stage]));
                if (it == fanout.end()) continue;
                for (std::size_t idx : it->second) push(stage + 1, rdf::merge(chunk[idx], *mu_t));
            }
        });
    }

    const BgpQuery& query_;
    QueryPlan& plan_;
    Session& session_;
    SolutionSink& sink_;
    const ExecOptions& options_;
    std::vector<std::vector<rdf::SolutionMapping>> buffers_;
    std::vector<std::vector<std::string>> shared_;
    std::vector<std::optional<std::vector<rdf::SolutionMapping>>> cartesian_cache_;
};

class TpfEvaluator {
public:
    TpfEvaluator(Session& session, SolutionSink& sink, const ExecOptions& options)
        : session_(session), sink_(sink), options_(options) {}

    void solve(const std::vector<rdf::TriplePattern>& remaining, const rdf::SolutionMapping& mu) {
        if (remaining.empty()) {
            sink_.add(mu);
            return;
        }
        std::vector<server::PageBody> first;
        first.reserve(remaining.size());
        for (const auto& tp : remaining) {
            first.push_back(session_.fetch(tpf_request(tp)));
            if (first.back().count == 0) return;
        }
        std::size_t chosen = 0;
        for (std::size_t i = 1; i < remaining.size(); ++i)
            if (first[i].count < first[chosen].count) chosen = i;

        const auto& tp = remaining[chosen];
        std::vector<rdf::TriplePattern> others;
        for (std::size_t i = 0; i < remaining.size(); ++i)
            if (i != chosen) others.push_back(remaining[i]);

        std::optional<server::PageBody> page1;
        if (options_.reusePlanningPages) page1 = std::move(first[chosen]);
        session_.for_each_page(tpf_request(tp), std::move(page1), [&](const server::PageBody& page) {
            for (const auto& t : page.data) {
                auto mu_t = rdf::induced_mapping(t, tp);
                if (!mu_t) continue;
                std::vector<rdf::TriplePattern> next;
                next.reserve(others.size());
                try {
                    for (const auto& o : others) next.push_back(rdf::apply(*mu_t, o));
                } catch (const BindingError&) {
                    continue;
                }
                solve(next, rdf::merge(mu, *mu_t));
            }
        });
    }

private:
    Session& session_;
    SolutionSink& sink_;
    const ExecOptions& options_;
};

}  // namespace

std::vector<std::size_t> order_patterns(const std::vector<rdf::TriplePattern>& patterns,
                                        const std::vector<std::uint64_t>& estimates) {
    const std::size_t n = patterns.size();
    std::vector<std::size_t> order;
    std::vector<bool> used(n, false);
    std::set<std::string> bound;
    while (order.size() < n) {
        std::optional<std::size_t> best_connected, best_any;
        for (std::size_t i = 0; i < n; ++i) {
            if (used[i]) continue;
            if (!best_any || estimates[i] < estimates[*best_any]) best_any = i;
            bool shares = false;
            for (const auto& v : patterns[i].variables()) shares = shares || bound.count(v);
            if (shares && (!best_connected || estimates[i] < estimates[*best_connected])) best_connected = i;
        }
        std::size_t pick = best_connected ? *best_connected : *best_any;
        used[pick] = true;
        order.push_back(pick);
        for (const auto& v : patterns[pick].variables()) bound.insert(v);
    }
    return order;
}

QueryPlan plan(const BgpQuery& query, FragmentSource& source, RunMetrics& metrics) {
    ExecOptions options;
    Session session(source, metrics, options);
    return plan_with(query, session);
}

QueryResult execute_brtpf(const BgpQuery& query, FragmentSource& source, const ExecOptions& options) {
    if (options.maxMpR < 1) throw ConfigError("maxMpR must be >= 1");
    if (query.patterns.empty()) throw ConfigError("query has no patterns");
    return run_guarded(query, [&](SolutionSink& sink, RunMetrics& m) {
        Session session(source, m, options);
        QueryPlan p = plan_with(query, session);
        if (p.emptyPattern) return;
        BrtpfPipeline(query, p, session, sink, options).run();
    });
}

QueryResult execute_tpf(const BgpQuery& query, FragmentSource& source, const ExecOptions& options) {
    if (query.patterns.empty()) throw ConfigError("query has no patterns");
    return run_guarded(query, [&](SolutionSink& sink, RunMetrics& m) {
        Session session(source, m, options);
        TpfEvaluator(session, sink, options).solve(query.patterns, {});
    });
}

QueryResult execute(Engine engine, const BgpQuery& query, FragmentSource& source,
                    const ExecOptions& options) {
    return engine == Engine::Tpf ? execute_tpf(query, source, options)
                                 : execute_brtpf(query, source, options);
}

}  // namespace ldf::client
