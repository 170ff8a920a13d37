#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ldf/rdf.hpp"

namespace ldf::store {

/// Cardinality metadata for a fragment. Counts are exact, so epsilon is always 0.
struct CardinalityEstimate {
    std::uint64_t count = 0;
    std::uint64_t epsilon = 0;

    friend bool operator==(const CardinalityEstimate&, const CardinalityEstimate&) = default;
};

using TermId = std::uint32_t;
/// Dictionary-encoded triple in (subject, predicate, object) order.
using TripleIds = std::array<TermId, 3>;

/// Immutable, blank-node-free triple set with SPO, POS and OSP indexes.
///
/// Term ids are assigned in ascending wire-form order, so sorting id triples
/// lexicographically yields the canonical (subject, predicate, object) order.
class Dataset {
public:
    Dataset() = default;

    /// Throws ldf::LoadError on blank nodes. Duplicates collapse.
    static Dataset from_triples(std::vector<rdf::Triple> triples);

    std::size_t size() const noexcept { return spo_.size(); }
    bool empty() const noexcept { return spo_.empty(); }

    /// Triples in canonical order.
    std::vector<rdf::Triple> triples() const;

    const rdf::Term& term(TermId id) const { return terms_.at(id); }
    std::optional<TermId> lookup(const rdf::Term& t) const;
    rdf::Triple decode(const TripleIds& ids) const;

    /// Matching triples for `tp` in canonical order.
    std::vector<TripleIds> match_ids(const rdf::TriplePattern& tp) const;
    std::uint64_t match_count(const rdf::TriplePattern& tp) const;

    /// Instantiate-dedupe-concatenate evaluation of a bindings-restricted pattern.
    /// Throws ldf::BindingError if a mapping cannot be applied.
    std::vector<TripleIds> match_ids(const rdf::TriplePattern& tp, const rdf::MappingSequence& omega) const;

private:
    struct Resolved;
    std::optional<Resolved> resolve(const rdf::TriplePattern& tp) const;
    template <typename Fn>
    void scan(const Resolved& r, Fn&& fn) const;

    std::vector<rdf::Term> terms_;
    std::unordered_map<std::string, TermId> ids_;
    std::vector<TripleIds> spo_;  // (s, p, o)
    std::vector<TripleIds> pos_;  // (p, o, s)
    std::vector<TripleIds> osp_;  // (o, s, p)
};

/// Parses the line-oriented triple format (`<s> <p> <o> .`, `#` comments).
/// Throws ldf::ParseError with a line number, ldf::LoadError for blank nodes.
Dataset load(std::istream& in);
Dataset load_file(const std::filesystem::path& path);

/// Writes triples in the loader's format.
void write_triples(std::ostream& out, const std::vector<rdf::Triple>& triples);

std::vector<rdf::Triple> select_tpf(const Dataset& ds, const rdf::TriplePattern& tp);
std::vector<rdf::Triple> select_brtpf(const Dataset& ds, const rdf::TriplePattern& tp,
                                      const rdf::MappingSequence& omega);
CardinalityEstimate count(const Dataset& ds, const rdf::TriplePattern& tp);
CardinalityEstimate count_brtpf(const Dataset& ds, const rdf::TriplePattern& tp,
                                const rdf::MappingSequence& omega);

}  // namespace ldf::store
