#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include "ldf/client.hpp"
#include "ldf/error.hpp"
#include "ldf/server.hpp"
#include "random_cases.hpp"

using namespace ldf;
using fragment::FragmentRequest;
using rdf::MappingSequence;
using rdf::SolutionMapping;
using rdf::Term;
using rdf::Triple;

namespace {

Term I(const std::string& local) { return Term::iri("http://ex.org/" + local); }
Term V(const std::string& name) { return Term::variable(name); }
Term L(const std::string& v) { return Term::literal(v); }

store::Dataset three() {
    return store::Dataset::from_triples(
        {{I("a"), I("p"), L("1")}, {I("b"), I("p"), L("2")}, {I("c"), I("p"), L("3")}});
}

MappingSequence n_bindings(std::size_t n) {
    MappingSequence omega;
    for (std::size_t i = 0; i < n; ++i) omega.push_back({{"x", I("s" + std::to_string(i))}});
    return omega;
}

}  // namespace

TEST(HandleRequest, EmptyDatasetAllVariables) {
    store::Dataset empty;
    auto r = server::handle_request(empty, {}, fragment::to_target({{V("x"), V("y"), V("z")}, {}, 1}));
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.body, "count=0\nhasNext=false\nmeta=3\n\n");
    auto body = server::parse_page_body(r.body);
    EXPECT_EQ(body.count, 0u);
    EXPECT_TRUE(body.data.empty());
}

TEST(HandleRequest, BodyFormat) {
    auto ds = three();
    server::ServerConfig cfg;
    cfg.pageSize = 1;
    FragmentRequest req{{V("s"), I("p"), V("o")}, {}, 2};
    auto r = server::handle_request(ds, cfg, fragment::to_target(req));
    ASSERT_EQ(r.status, 200);
    std::string expected = "count=3\nhasNext=true\nnext=" + fragment::to_target(req.with_page(3)) +
                           "\nprev=" + fragment::to_target(req.with_page(1)) +
                           "\nmeta=5\n\n<http://ex.org/b> <http://ex.org/p> \"2\" .\n";
    EXPECT_EQ(r.body, expected);
}

TEST(HandleRequest, MaxMpRBoundary) {
    auto ds = three();
    server::ServerConfig cfg;
    cfg.maxMpR = 30;
    FragmentRequest at{{V("x"), I("p"), V("y")}, n_bindings(30), 1};
    EXPECT_EQ(server::handle_request(ds, cfg, fragment::to_target(at)).status, 200);
    FragmentRequest over{{V("x"), I("p"), V("y")}, n_bindings(31), 1};
    auto r = server::handle_request(ds, cfg, fragment::to_target(over));
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body, "maxMpR-exceeded\n");
}

TEST(HandleRequest, UriLimit) {
    auto ds = three();
    server::ServerConfig cfg;
    cfg.maxMpR = 1000;
    cfg.uriLimit = 8000;
    FragmentRequest big{{V("x"), I("p"), V("y")}, n_bindings(300), 1};
    auto target = fragment::to_target(big);
    ASSERT_GT(target.size(), 8000u);
    EXPECT_EQ(server::handle_request(ds, cfg, target).status, 414);
    cfg.uriLimit = target.size();
    EXPECT_EQ(server::handle_request(ds, cfg, target).status, 200);
}

TEST(HandleRequest, MalformedAndUnknown) {
    auto ds = three();
    EXPECT_EQ(server::handle_request(ds, {}, "/fragment?s=%3Fx").status, 400);
    EXPECT_EQ(server::handle_request(ds, {}, "/fragment?s=%3Fx&p=%3Fp&o=%3Fo&page=0").status, 400);
    EXPECT_EQ(server::handle_request(ds, {}, "/elsewhere").status, 404);
    auto health = server::handle_request(ds, {}, "/health");
    EXPECT_EQ(health.status, 200);
    EXPECT_EQ(health.body, "triples=3\n");
}

TEST(HandleRequest, IllTypedBindingIs400) {
    auto ds = three();
    FragmentRequest req{{V("x"), I("p"), V("y")}, {{{"x", L("lit")}}}, 1};
    auto r = server::handle_request(ds, {}, fragment::to_target(req));
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body.rfind("ill-typed-binding", 0), 0u);
}

TEST(HandleRequest, RestrictedIsSubsetOfUnrestricted) {
    testsupport::Rng rng(5);
    auto vocab = testsupport::Vocab::make(15, 3, 4);
    auto data = testsupport::random_triples(rng, vocab, 150);
    auto ds = store::Dataset::from_triples(data);
    server::ServerConfig cfg;
    cfg.pageSize = 4;
    auto collect = [&](const FragmentRequest& first) {
        std::set<Triple> out;
        for (FragmentRequest req = first;; ++req.page) {
            auto r = server::handle_request(ds, cfg, fragment::to_target(req));
            EXPECT_EQ(r.status, 200);
            auto body = server::parse_page_body(r.body);
            out.insert(body.data.begin(), body.data.end());
            if (!body.hasNext) break;
        }
        return out;
    };
    for (int i = 0; i < 100; ++i) {
        FragmentRequest req{testsupport::random_pattern(rng, vocab, data), {}, 1};
        auto all = collect(req);
        req.bindings = testsupport::random_omega(rng, vocab, data, req.pattern, 10);
        for (const auto& t : collect(req)) EXPECT_TRUE(all.count(t));
    }
}

TEST(HandleRequest, IdenticalTargetsGiveIdenticalBodies) {
    auto ds = three();
    auto target = fragment::to_target({{V("x"), I("p"), V("y")}, {{{"x", I("b")}}, {{"x", I("a")}}}, 1});
    auto first = server::handle_request(ds, {}, target);
    for (int i = 0; i < 5; ++i) EXPECT_EQ(server::handle_request(ds, {}, target).body, first.body);
}

TEST(PageBody, RejectsGarbage) {
    EXPECT_THROW(server::parse_page_body("hello"), ParseError);
    EXPECT_THROW(server::parse_page_body("count=1\nhasNext=maybe\nmeta=3\n\n"), ParseError);
}

TEST(ServerConfig, ValidateAndApply) {
    server::ServerConfig cfg;
    std::istringstream in("pageSize=5\nmaxMpR=7\nuriLimit=9000\nport=0\ndata=/tmp/x.nt\n");
    cfg.apply(KeyValues::parse(in));
    EXPECT_EQ(cfg.pageSize, 5u);
    EXPECT_EQ(cfg.maxMpR, 7u);
    EXPECT_EQ(cfg.uriLimit, 9000u);
    EXPECT_EQ(cfg.data, "/tmp/x.nt");
    cfg.pageSize = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.pageSize = 1;
    cfg.maxMpR = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Serve, MissingFileFailsFast) {
    server::ServerConfig cfg;
    cfg.data = "/nonexistent/file.nt";
    EXPECT_THROW(server::serve(cfg), LoadError);
}

TEST(Server, ServesOverHttpConcurrently) {
    auto ds = std::make_shared<const store::Dataset>(three());
    server::ServerConfig cfg;
    cfg.pageSize = 2;
    server::Server srv(ds, cfg);
    srv.start();
    ASSERT_GT(srv.port(), 0);

    client::HttpSource probe(srv.url());
    EXPECT_EQ(probe.get("/health").body, "triples=3\n");

    auto target = fragment::to_target({{V("s"), V("p"), V("o")}, {}, 1});
    auto expected = server::handle_request(*ds, cfg, target);
    std::vector<std::thread> threads;
    std::atomic<int> mismatches{0};
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&] {
            client::HttpSource src(srv.url());
            for (int i = 0; i < 50; ++i) {
                auto r = src.get(target);
                if (r.status != expected.status || r.body != expected.body) ++mismatches;
            }
        });
    for (auto& th : threads) th.join();
    EXPECT_EQ(mismatches.load(), 0);

    FragmentRequest over{{V("x"), I("p"), V("y")}, n_bindings(31), 1};
    EXPECT_EQ(probe.get(fragment::to_target(over)).status, 400);
    FragmentRequest huge{{V("x"), I("p"), V("y")}, n_bindings(30), 1};
    huge.bindings = MappingSequence{};
    for (int i = 0; i < 30; ++i) huge.bindings.push_back({{"x", I(std::string(300, 'q') + std::to_string(i))}});
    EXPECT_EQ(probe.get(fragment::to_target(huge)).status, 414);
    srv.stop();
}

TEST(Server, TransportErrorWhenDown) {
    auto ds = std::make_shared<const store::Dataset>(three());
    int port;
    {
        server::Server srv(ds, {});
        srv.start();
        port = srv.port();
        srv.stop();
    }
    client::HttpSource src("http://127.0.0.1:" + std::to_string(port), std::chrono::milliseconds(500));
    EXPECT_THROW(src.get("/health"), TransportError);
}
