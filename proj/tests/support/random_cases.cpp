#include "random_cases.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace testsupport {

namespace {

const std::string kNs = "http://t.example/";

std::tuple<std::string, std::string, std::string> key_of(const Triple& t) {
    return {t.subject.wire(), t.predicate.wire(), t.object.wire()};
}

const Term* lookup(const SolutionMapping& mu, const Term& t) {
    return t.is_variable() ? mu.find(t.lexical()) : nullptr;
}

}  // namespace

Vocab Vocab::make(std::size_t nodes, std::size_t predicates, std::size_t literals) {
    Vocab v;
    for (std::size_t i = 0; i < nodes; ++i) v.nodes.push_back(Term::iri(kNs + "n" + std::to_string(i)));
    for (std::size_t i = 0; i < predicates; ++i) v.predicates.push_back(Term::iri(kNs + "p" + std::to_string(i)));
    for (std::size_t i = 0; i < literals; ++i) v.literals.push_back(Term::literal("v" + std::to_string(i)));
    return v;
}

Term Vocab::any_object(Rng& rng) const {
    if (!literals.empty() && rng.chance(0.3)) return rng.pick(literals);
    return rng.pick(nodes);
}

std::vector<Triple> random_triples(Rng& rng, const Vocab& v, std::size_t count) {
    std::vector<Triple> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Term s = rng.pick(v.nodes);
        Term p = rng.pick(v.predicates);
        // Some subject=object triples to exercise repeated variables.
        Term o = rng.chance(0.05) ? s : v.any_object(rng);
        out.emplace_back(s, p, o);
    }
    return out;
}

TriplePattern random_pattern(Rng& rng, const Vocab& v, const std::vector<Triple>& data) {
    static const std::vector<std::string> names{"x", "y", "z"};
    Term s, p, o;
    if (!data.empty() && rng.chance(0.5)) {
        const Triple& t = rng.pick(data);
        s = t.subject;
        p = t.predicate;
        o = t.object;
    } else {
        s = rng.pick(v.nodes);
        p = rng.pick(v.predicates);
        o = v.any_object(rng);
    }
    if (rng.chance(0.7)) s = Term::variable(rng.pick(names));
    if (rng.chance(0.4)) p = Term::variable(rng.pick(names));
    if (rng.chance(0.7)) o = Term::variable(rng.pick(names));
    return {s, p, o};
}

MappingSequence random_omega(Rng& rng, const Vocab& v, const std::vector<Triple>& data, const TriplePattern& tp,
                             std::size_t max_len) {
    MappingSequence omega;
    auto vars = tp.variables();
    std::size_t want = rng.below(max_len + 1);
    auto in_subject = [&](const std::string& n) { return tp.subject.is_variable() && tp.subject.lexical() == n; };
    auto in_predicate = [&](const std::string& n) {
        return tp.predicate.is_variable() && tp.predicate.lexical() == n;
    };
    for (std::size_t attempt = 0; omega.size() < want && attempt < want * 4; ++attempt) {
        SolutionMapping mu;
        // Values taken from one data triple make the binding likely to hit.
        const Triple* anchor = data.empty() || rng.chance(0.3) ? nullptr : &rng.pick(data);
        for (const auto& name : vars) {
            if (rng.chance(0.25)) continue;
            Term value;
            if (in_predicate(name)) {
                value = anchor ? anchor->predicate : rng.pick(v.predicates);
            } else if (in_subject(name)) {
                value = anchor ? anchor->subject : rng.pick(v.nodes);
            } else if (anchor) {
                value = anchor->object;
            } else {
                value = v.any_object(rng);
            }
            mu.bind(name, value);
        }
        if (rng.chance(0.1)) mu.bind("w", rng.pick(v.nodes));
        omega.push_back(std::move(mu));
    }
    return omega;
}

ldf::client::BgpQuery random_bgp(Rng& rng, const Vocab& v, const std::vector<Triple>& data,
                                 std::size_t max_patterns) {
    std::size_t n = 1 + rng.below(max_patterns);
    std::vector<Triple> walk{rng.pick(data)};
    while (walk.size() < n) {
        if (rng.chance(0.1)) {
            walk.push_back(rng.pick(data));  // possibly disconnected
            continue;
        }
        const Triple& from = rng.pick(walk);
        std::vector<const Triple*> next;
        for (const auto& t : data)
            if (t.subject == from.subject || t.subject == from.object || t.object == from.subject)
                next.push_back(&t);
        walk.push_back(next.empty() ? rng.pick(data) : *rng.pick(next));
    }

    std::map<Term, Term> var_of;
    auto variable_for = [&](const Term& t) {
        auto it = var_of.find(t);
        if (it != var_of.end()) return it->second;
        Term var = Term::variable("v" + std::to_string(var_of.size()));
        var_of.emplace(t, var);
        return var;
    };
    std::map<Term, bool> lift;
    auto lifted = [&](const Term& t, double p) {
        auto it = lift.find(t);
        if (it == lift.end()) it = lift.emplace(t, rng.chance(p)).first;
        return it->second;
    };

    ldf::client::BgpQuery q;
    q.name = "random";
    for (const auto& t : walk) {
        Term s = lifted(t.subject, 0.7) ? variable_for(t.subject) : t.subject;
        Term p = lifted(t.predicate, 0.15) ? variable_for(t.predicate) : t.predicate;
        Term o = t.object.is_literal() ? (lifted(t.object, 0.3) ? variable_for(t.object) : t.object)
                                       : (lifted(t.object, 0.7) ? variable_for(t.object) : t.object);
        if (!o.is_variable() && rng.chance(0.08)) o = v.any_object(rng);  // may empty the query
        q.patterns.emplace_back(s, p, o);
    }
    return q;
}

TriplePattern substitute(const TriplePattern& tp, const SolutionMapping& mu) {
    TriplePattern out;
    const Term* s = lookup(mu, tp.subject);
    const Term* p = lookup(mu, tp.predicate);
    const Term* o = lookup(mu, tp.object);
    // Assign members directly: the constructor would reject an ill-typed result.
    out.subject = s ? *s : tp.subject;
    out.predicate = p ? *p : tp.predicate;
    out.object = o ? *o : tp.object;
    return out;
}

bool well_typed(const TriplePattern& tp) {
    bool s_ok = tp.subject.is_variable() || tp.subject.is_iri() || tp.subject.is_blank();
    bool p_ok = tp.predicate.is_variable() || tp.predicate.is_iri();
    return s_ok && p_ok;
}

bool brute_matches(const Triple& t, const TriplePattern& tp) {
    std::map<std::string, Term> seen;
    const Term* pattern_terms[3] = {&tp.subject, &tp.predicate, &tp.object};
    const Term* triple_terms[3] = {&t.subject, &t.predicate, &t.object};
    for (int i = 0; i < 3; ++i) {
        const Term& pt = *pattern_terms[i];
        if (!pt.is_variable()) {
            if (!(pt == *triple_terms[i])) return false;
            continue;
        }
        auto [it, fresh] = seen.emplace(pt.lexical(), *triple_terms[i]);
        if (!fresh && !(it->second == *triple_terms[i])) return false;
    }
    return true;
}

std::vector<Triple> canonical_sort(std::vector<Triple> triples) {
    std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) { return key_of(a) < key_of(b); });
    return triples;
}

std::vector<Triple> definition1_set(const std::vector<Triple>& data, const TriplePattern& tp,
                                    const MappingSequence& omega) {
    std::vector<Triple> out;
    for (const auto& t : data) {
        if (!brute_matches(t, tp)) continue;
        bool ok = omega.empty();
        for (const auto& other : omega) {
            bool agrees = true;
            for (const auto& [var, value] : other) {
                const Term* positions[3] = {&tp.subject, &tp.predicate, &tp.object};
                const Term* triple_terms[3] = {&t.subject, &t.predicate, &t.object};
                for (int i = 0; i < 3; ++i)
                    if (positions[i]->is_variable() && positions[i]->lexical() == var && !(*triple_terms[i] == value))
                        agrees = false;
            }
            if (agrees) {
                ok = true;
                break;
            }
        }
        if (ok) out.push_back(t);
    }
    out = canonical_sort(std::move(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Triple> procedure_order(const std::vector<Triple>& data, const TriplePattern& tp,
                                    const MappingSequence& omega) {
    std::vector<Triple> sorted = canonical_sort(data);
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<TriplePattern> instances;
    if (omega.empty()) {
        instances.push_back(tp);
    } else {
        for (const auto& mu : omega) {
            TriplePattern inst = substitute(tp, mu);
            if (std::find(instances.begin(), instances.end(), inst) == instances.end()) instances.push_back(inst);
        }
    }
    std::vector<Triple> out;
    std::set<std::tuple<std::string, std::string, std::string>> emitted;
    for (const auto& inst : instances)
        for (const auto& t : sorted)
            if (brute_matches(t, inst) && emitted.insert(key_of(t)).second) out.push_back(t);
    return out;
}

bool omega_ill_typed(const TriplePattern& tp, const MappingSequence& omega) {
    for (const auto& mu : omega)
        if (!well_typed(substitute(tp, mu))) return true;
    return false;
}

}  // namespace testsupport
