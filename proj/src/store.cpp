#include "ldf/store.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_set>

#include "ldf/error.hpp"

namespace ldf::store {

namespace {

enum class Index { Spo, Pos, Osp };

struct TripleIdsHash {
    std::size_t operator()(const TripleIds& t) const noexcept {
        std::uint64_t h = (std::uint64_t{t[0]} << 42) ^ (std::uint64_t{t[1]} << 21) ^ t[2];
        return std::hash<std::uint64_t>{}(h * 0x9E3779B97F4A7C15ull);
    }
};

// Permutes an SPO triple into the key layout of `index` and back.
TripleIds to_key(Index index, const TripleIds& spo) {
    switch (index) {
        case Index::Spo: return spo;
        case Index::Pos: return {spo[1], spo[2], spo[0]};
        case Index::Osp: return {spo[2], spo[0], spo[1]};
    }
    return spo;
}

TripleIds from_key(Index index, const TripleIds& key) {
    switch (index) {
        case Index::Spo: return key;
        case Index::Pos: return {key[2], key[0], key[1]};
        case Index::Osp: return {key[1], key[2], key[0]};
    }
    return key;
}

}  // namespace

struct Dataset::Resolved {
    std::array<std::optional<TermId>, 3> constant;
    // For each position, index of the earlier position holding the same variable (or -1).
    std::array<int, 3> same_as{-1, -1, -1};
    bool has_repeats = false;
};

Dataset Dataset::from_triples(std::vector<rdf::Triple> triples) {
    Dataset ds;
    std::set<std::string> wires;
    for (const auto& t : triples) {
        for (const rdf::Term* term : {&t.subject, &t.predicate, &t.object}) {
            if (term->is_blank())
                throw LoadError("blank nodes are not allowed in a dataset: " + t.wire());
            wires.insert(term->wire());
        }
    }
    ds.terms_.reserve(wires.size());
    for (const auto& w : wires) {
        ds.ids_.emplace(w, static_cast<TermId>(ds.terms_.size()));
        ds.terms_.push_back(rdf::Term::parse(w));
    }
    ds.spo_.reserve(triples.size());
    for (const auto& t : triples)
        ds.spo_.push_back({ds.ids_.at(t.subject.wire()), ds.ids_.at(t.predicate.wire()),
                           ds.ids_.at(t.object.wire())});
    std::sort(ds.spo_.begin(), ds.spo_.end());
    ds.spo_.erase(std::unique(ds.spo_.begin(), ds.spo_.end()), ds.spo_.end());
    ds.pos_.reserve(ds.spo_.size());
    ds.osp_.reserve(ds.spo_.size());
    for (const auto& t : ds.spo_) {
        ds.pos_.push_back(to_key(Index::Pos, t));
        ds.osp_.push_back(to_key(Index::Osp, t));
    }
    std::sort(ds.pos_.begin(), ds.pos_.end());
    std::sort(ds.osp_.begin(), ds.osp_.end());
    return ds;
}

std::vector<rdf::Triple> Dataset::triples() const {
    std::vector<rdf::Triple> out;
    out.reserve(spo_.size());
    for (const auto& t : spo_) out.push_back(decode(t));
    return out;
}

std::optional<TermId> Dataset::lookup(const rdf::Term& t) const {
    auto it = ids_.find(t.wire());
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

rdf::Triple Dataset::decode(const TripleIds& ids) const {
    return rdf::Triple(terms_[ids[0]], terms_[ids[1]], terms_[ids[2]]);
}

std::optional<Dataset::Resolved> Dataset::resolve(const rdf::TriplePattern& tp) const {
    Resolved r;
    auto pos = tp.positions();
    for (int i = 0; i < 3; ++i) {
        const rdf::Term& t = *pos[i];
        if (t.is_variable()) {
            for (int j = 0; j < i; ++j) {
                if (pos[j]->is_variable() && pos[j]->lexical() == t.lexical()) {
                    r.same_as[i] = j;
                    r.has_repeats = true;
                    break;
                }
            }
        } else {
            auto id = lookup(t);
            if (!id) return std::nullopt;
            r.constant[i] = *id;
        }
    }
    return r;
}

template <typename Fn>
void Dataset::scan(const Resolved& r, Fn&& fn) const {
    const auto& c = r.constant;
    Index index = Index::Spo;
    if (c[0]) index = (!c[1] && c[2]) ? Index::Osp : Index::Spo;
    else if (c[1]) index = Index::Pos;
    else if (c[2]) index = Index::Osp;

    const std::vector<TripleIds>& data =
        index == Index::Spo ? spo_ : (index == Index::Pos ? pos_ : osp_);

    // Bound prefix of the key layout.
    std::array<std::optional<TermId>, 3> spo_bound{c[0], c[1], c[2]};
    std::array<std::optional<TermId>, 3> key_bound;
    switch (index) {
        case Index::Spo: key_bound = spo_bound; break;
        case Index::Pos: key_bound = {spo_bound[1], spo_bound[2], spo_bound[0]}; break;
        case Index::Osp: key_bound = {spo_bound[2], spo_bound[0], spo_bound[1]}; break;
    }
    std::size_t prefix = 0;
    while (prefix < 3 && key_bound[prefix]) ++prefix;

    TripleIds lo{0, 0, 0};
    TripleIds hi{~TermId{0}, ~TermId{0}, ~TermId{0}};
    for (std::size_t i = 0; i < prefix; ++i) lo[i] = hi[i] = *key_bound[i];
    auto first = std::lower_bound(data.begin(), data.end(), lo);
    auto last = std::upper_bound(first, data.end(), hi);

    for (auto it = first; it != last; ++it) {
        TripleIds spo = from_key(index, *it);
        bool ok = true;
        for (int i = 0; i < 3 && ok; ++i) {
            if (c[i] && spo[i] != *c[i]) ok = false;
            if (r.same_as[i] >= 0 && spo[i] != spo[r.same_as[i]]) ok = false;
        }
        if (ok) fn(spo);
    }
}

std::vector<TripleIds> Dataset::match_ids(const rdf::TriplePattern& tp) const {
    std::vector<TripleIds> out;
    auto r = resolve(tp);
    if (!r) return out;
    scan(*r, [&](const TripleIds& t) { out.push_back(t); });
    if (!std::is_sorted(out.begin(), out.end())) std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t Dataset::match_count(const rdf::TriplePattern& tp) const {
    auto r = resolve(tp);
    if (!r) return 0;
    std::uint64_t n = 0;
    scan(*r, [&](const TripleIds&) { ++n; });
    return n;
}

std::vector<TripleIds> Dataset::match_ids(const rdf::TriplePattern& tp,
                                          const rdf::MappingSequence& omega) const {
    if (omega.empty()) return match_ids(tp);

    std::vector<rdf::TriplePattern> instantiated;
    std::unordered_set<std::string> seen_patterns;
    for (const auto& mu : omega) {
        rdf::TriplePattern tpi = rdf::apply(mu, tp);
        if (seen_patterns.insert(tpi.wire()).second) instantiated.push_back(std::move(tpi));
    }

    std::vector<TripleIds> out;
    std::unordered_set<TripleIds, TripleIdsHash> seen_triples;
    for (const auto& tpi : instantiated) {
        for (const auto& t : match_ids(tpi))
            if (seen_triples.insert(t).second) out.push_back(t);
    }
    return out;
}

Dataset load(std::istream& in) {
    std::vector<rdf::Triple> triples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        try {
            std::size_t pos = first;
            std::array<rdf::Term, 3> terms;
            for (int i = 0; i < 3; ++i) {
                if (i) {
                    if (pos >= line.size() || line[pos] != ' ')
                        throw ParseError("expected a single space between terms");
                    ++pos;
                }
                terms[i] = rdf::read_term(line, pos);
            }
            auto rest = std::string_view(line).substr(pos);
            while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t')) rest.remove_suffix(1);
            if (rest != " .") throw ParseError("expected ' .' at end of triple");
            for (const auto& t : terms)
                if (t.is_blank()) throw LoadError("line " + std::to_string(lineno) + ": blank node in dataset");
            triples.emplace_back(terms[0], terms[1], terms[2]);
        } catch (const LoadError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return Dataset::from_triples(std::move(triples));
}

Dataset load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open dataset file '" + path.string() + "'");
    return load(in);
}

void write_triples(std::ostream& out, const std::vector<rdf::Triple>& triples) {
    for (const auto& t : triples) out << t.wire() << '\n';
}

namespace {

std::vector<rdf::Triple> decode_all(const Dataset& ds, const std::vector<TripleIds>& ids) {
    std::vector<rdf::Triple> out;
    out.reserve(ids.size());
    for (const auto& t : ids) out.push_back(ds.decode(t));
    return out;
}

}  // namespace

std::vector<rdf::Triple> select_tpf(const Dataset& ds, const rdf::TriplePattern& tp) {
    return decode_all(ds, ds.match_ids(tp));
}

std::vector<rdf::Triple> select_brtpf(const Dataset& ds, const rdf::TriplePattern& tp,
                                      const rdf::MappingSequence& omega) {
    return decode_all(ds, ds.match_ids(tp, omega));
}

CardinalityEstimate count(const Dataset& ds, const rdf::TriplePattern& tp) {
    return {ds.match_count(tp), 0};
}

CardinalityEstimate count_brtpf(const Dataset& ds, const rdf::TriplePattern& tp,
                                const rdf::MappingSequence& omega) {
    if (omega.empty()) return count(ds, tp);
    return {ds.match_ids(tp, omega).size(), 0};
}

}  // namespace ldf::store
