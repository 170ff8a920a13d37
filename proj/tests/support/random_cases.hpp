#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ldf/client.hpp"
#include "ldf/rdf.hpp"

namespace testsupport {

using ldf::rdf::MappingSequence;
using ldf::rdf::SolutionMapping;
using ldf::rdf::Term;
using ldf::rdf::Triple;
using ldf::rdf::TriplePattern;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::size_t below(std::size_t n) { return n ? std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_) : 0; }
    bool chance(double p) { return std::bernoulli_distribution(p)(engine_); }
    template <typename T>
    const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

private:
    std::mt19937_64 engine_;
};

/// Term pools a random dataset is drawn from. Subjects double as IRI objects so
/// that patterns join.
struct Vocab {
    std::vector<Term> nodes;
    std::vector<Term> predicates;
    std::vector<Term> literals;

    static Vocab make(std::size_t nodes, std::size_t predicates, std::size_t literals);
    Term any_object(Rng& rng) const;
};

std::vector<Triple> random_triples(Rng& rng, const Vocab& v, std::size_t count);

/// Half of the time derived from an existing triple so the fragment is non-empty.
TriplePattern random_pattern(Rng& rng, const Vocab& v, const std::vector<Triple>& data);

/// Up to `max_len` distinct, well-typed mappings over (a subset of) vars(tp), now and
/// then with an extra variable that tp does not mention.
MappingSequence random_omega(Rng& rng, const Vocab& v, const std::vector<Triple>& data, const TriplePattern& tp,
                             std::size_t max_len);

/// A 1..max_patterns pattern BGP grown along a random walk through `data`, with
/// some positions turned into variables and occasional foreign constants.
ldf::client::BgpQuery random_bgp(Rng& rng, const Vocab& v, const std::vector<Triple>& data, std::size_t max_patterns);

// Brute-force reference implementations that do not use the library's algebra.

/// Substitutes bound variables; the result may hold ill-typed terms.
TriplePattern substitute(const TriplePattern& tp, const SolutionMapping& mu);
bool well_typed(const TriplePattern& tp);
/// Matching by position-wise comparison; repeated variables must agree.
bool brute_matches(const Triple& t, const TriplePattern& tp);
/// Sorted by (subject, predicate, object) wire strings.
std::vector<Triple> canonical_sort(std::vector<Triple> triples);

/// The set { t | t matches tp and some mu with apply(mu, tp) = t is compatible with some
/// element of omega }, canonically sorted. An empty omega places no restriction.
std::vector<Triple> definition1_set(const std::vector<Triple>& data, const TriplePattern& tp,
                                    const MappingSequence& omega);

/// The server page order: instantiate per mapping, drop repeated instantiations,
/// concatenate canonical scans, keep first occurrence of each triple.
std::vector<Triple> procedure_order(const std::vector<Triple>& data, const TriplePattern& tp,
                                    const MappingSequence& omega);

/// True if some mapping would put a non-IRI in subject or predicate position.
bool omega_ill_typed(const TriplePattern& tp, const MappingSequence& omega);

}  // namespace testsupport
