#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ldf/cache.hpp"
#include "ldf/client.hpp"
#include "ldf/error.hpp"
#include "ldf/harness.hpp"
#include "ldf/server.hpp"
#include "ldf/store.hpp"

namespace py = pybind11;
using namespace ldf;

namespace {

py::dict metrics_dict(const client::RunMetrics& m) {
    py::dict d;
    d["numRequests"] = m.numRequests;
    d["dataRecv"] = m.dataRecv;
    d["wallTimeMs"] = m.wallTimeMs;
    d["timedOut"] = m.timedOut;
    d["failed"] = m.failed;
    d["resultCount"] = m.resultCount;
    d["error"] = m.error;
    return d;
}

std::vector<std::map<std::string, std::string>> solution_dicts(const std::vector<rdf::SolutionMapping>& sols) {
    std::vector<std::map<std::string, std::string>> out;
    for (const auto& mu : sols) {
        std::map<std::string, std::string> row;
        for (const auto& [var, term] : mu) row[var] = term.wire();
        out.push_back(std::move(row));
    }
    return out;
}

client::BgpQuery parse_query(const std::string& text) {
    std::istringstream in(text);
    auto qs = client::parse_queries(in);
    if (qs.size() != 1) throw ParseError("expected exactly one query, got " + std::to_string(qs.size()), 0);
    return qs.front();
}

server::ServerConfig server_config(std::size_t page_size, std::size_t max_mpr) {
    server::ServerConfig cfg;
    cfg.pageSize = page_size;
    cfg.maxMpR = max_mpr;
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_brtpf, m) {
    m.doc() = "Triple pattern fragments with bindings-restricted requests";

    py::register_exception<Error>(m, "Error");

    py::class_<store::Dataset, std::shared_ptr<store::Dataset>>(m, "Dataset")
        .def_static("load", [](const std::string& path) { return std::make_shared<store::Dataset>(store::load_file(path)); })
        .def_static("parse",
                    [](const std::string& ntriples) {
                        std::istringstream in(ntriples);
                        return std::make_shared<store::Dataset>(store::load(in));
                    })
        .def("__len__", &store::Dataset::size)
        .def("triples",
             [](const store::Dataset& ds) {
                 std::vector<std::string> out;
                 for (const auto& t : ds.triples()) out.push_back(t.wire());
                 return out;
             })
        .def(
            "select",
            [](const store::Dataset& ds, const std::string& pattern, const std::string& bindings) {
                auto tp = rdf::parse_pattern(pattern);
                std::vector<std::string> out;
                auto rows = bindings.empty() ? store::select_tpf(ds, tp)
                                             : store::select_brtpf(ds, tp, rdf::MappingSequence::parse(bindings));
                for (const auto& t : rows) out.push_back(t.wire());
                return out;
            },
            py::arg("pattern"), py::arg("bindings") = "")
        .def(
            "count",
            [](const store::Dataset& ds, const std::string& pattern, const std::string& bindings) {
                auto tp = rdf::parse_pattern(pattern);
                return bindings.empty() ? store::count(ds, tp).count
                                        : store::count_brtpf(ds, tp, rdf::MappingSequence::parse(bindings)).count;
            },
            py::arg("pattern"), py::arg("bindings") = "");

    m.def(
        "handle_request",
        [](const store::Dataset& ds, const std::string& target, std::size_t page_size, std::size_t max_mpr) {
            auto reply = server::handle_request(ds, server_config(page_size, max_mpr), target);
            return py::make_tuple(reply.status, reply.body);
        },
        py::arg("dataset"), py::arg("target"), py::arg("page_size") = 100, py::arg("max_mpr") = 30);

    py::class_<server::Server>(m, "Server")
        .def(py::init([](std::shared_ptr<store::Dataset> ds, std::size_t page_size, std::size_t max_mpr) {
                 auto srv = std::make_unique<server::Server>(std::move(ds), server_config(page_size, max_mpr));
                 srv->start();
                 return srv;
             }),
             py::arg("dataset"), py::arg("page_size") = 100, py::arg("max_mpr") = 30)
        .def_property_readonly("url", &server::Server::url)
        .def("stop", &server::Server::stop, py::call_guard<py::gil_scoped_release>())
        .def("__enter__", [](server::Server& s) -> server::Server& { return s; }, py::return_value_policy::reference)
        .def("__exit__", [](server::Server& s, py::args) { s.stop(); });

    m.def(
        "query",
        [](const std::string& engine, const std::string& endpoint, const std::string& query_text,
           std::size_t max_mpr) {
            auto q = parse_query(query_text);
            client::ExecOptions opt;
            opt.maxMpR = max_mpr;
            client::QueryResult r;
            {
                py::gil_scoped_release release;
                client::HttpSource src(endpoint);
                r = client::execute(client::parse_engine(engine), q, src, opt);
            }
            return py::make_tuple(solution_dicts(r.solutions), metrics_dict(r.metrics));
        },
        py::arg("engine"), py::arg("endpoint"), py::arg("query"), py::arg("max_mpr") = 30);

    m.def(
        "oracle",
        [](const store::Dataset& ds, const std::string& query_text) {
            return solution_dicts(harness::oracle_bgp(ds, parse_query(query_text)));
        },
        py::arg("dataset"), py::arg("query"));

    m.def(
        "replay",
        [](const std::vector<std::string>& trace, const std::vector<std::optional<std::size_t>>& capacities) {
            std::vector<py::tuple> out;
            for (const auto& row : cache::replay(trace, capacities))
                out.push_back(py::make_tuple(row.capacity, row.stats.hits, row.stats.misses));
            return out;
        },
        py::arg("trace"), py::arg("capacities"));

    m.def(
        "gen_data",
        [](const std::string& out_dir, std::uint64_t seed, std::size_t size, std::size_t queries) {
            harness::GeneratorParams p;
            p.seed = seed;
            p.size = size;
            p.queries = queries;
            harness::write_workload(harness::gen_data(p), out_dir);
        },
        py::arg("out_dir"), py::arg("seed") = 1, py::arg("size") = 10000, py::arg("queries") = 40);
}
