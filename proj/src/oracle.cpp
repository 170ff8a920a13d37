#include <algorithm>

#include "ldf/harness.hpp"

namespace ldf::harness {

namespace {

// Bounds the nested loops: intermediate mappings x triples per pattern.
constexpr std::uint64_t kOracleWorkLimit = 200'000'000;

}  // namespace

std::vector<rdf::SolutionMapping> oracle_bgp(const store::Dataset& ds, const client::BgpQuery& query) {
    const std::uint64_t candidates = static_cast<std::uint64_t>(query.patterns.size()) * ds.size();
    if (candidates > kOracleCandidateLimit)
        throw OracleRefused("oracle guard: " + std::to_string(candidates) + " pattern/triple pairs exceed " +
                            std::to_string(kOracleCandidateLimit));

    const std::vector<rdf::Triple> triples = ds.triples();
    std::vector<rdf::SolutionMapping> current{rdf::SolutionMapping{}};
    for (const auto& tp : query.patterns) {
        if (static_cast<std::uint64_t>(current.size()) * triples.size() > kOracleWorkLimit)
            throw OracleRefused("oracle guard: intermediate result too large");
        std::vector<rdf::SolutionMapping> next;
        for (const auto& mu : current) {
            for (const auto& t : triples) {
                auto mu_t = rdf::induced_mapping(t, tp);
                if (mu_t && rdf::compatible(mu, *mu_t)) next.push_back(rdf::merge(mu, *mu_t));
            }
        }
        current = std::move(next);
    }

    const auto vars = query.variables();
    for (auto& mu : current) mu = mu.project(vars);
    std::sort(current.begin(), current.end());
    current.erase(std::unique(current.begin(), current.end()), current.end());
    return current;
}

}  // namespace ldf::harness
