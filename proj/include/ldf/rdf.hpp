#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ldf::rdf {

enum class TermKind { Iri, Literal, BlankNode, Variable };

/// An RDF term or a query variable. Literals carry only their lexical form.
class Term {
public:
    Term() = default;

    static Term iri(std::string value);
    static Term literal(std::string value);
    static Term blank(std::string label);
    static Term variable(std::string name);

    /// Parses the canonical wire form: `<iri>`, `"literal"`, `_:label`, `?name`.
    static Term parse(std::string_view wire);

    TermKind kind() const noexcept { return kind_; }
    const std::string& lexical() const noexcept { return lexical_; }

    bool is_variable() const noexcept { return kind_ == TermKind::Variable; }
    bool is_iri() const noexcept { return kind_ == TermKind::Iri; }
    bool is_literal() const noexcept { return kind_ == TermKind::Literal; }
    bool is_blank() const noexcept { return kind_ == TermKind::BlankNode; }

    std::string wire() const;

    friend bool operator==(const Term&, const Term&) = default;
    /// Orders by canonical wire form.
    friend std::strong_ordering operator<=>(const Term& a, const Term& b);

private:
    Term(TermKind kind, std::string lexical) : kind_(kind), lexical_(std::move(lexical)) {}

    TermKind kind_ = TermKind::Iri;
    std::string lexical_;
};

/// Reads one wire-form term starting at `pos`; advances `pos` past it.
Term read_term(std::string_view text, std::size_t& pos);

bool valid_iri(std::string_view value);
bool valid_variable_name(std::string_view name);

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    Triple() = default;
    /// Throws ldf::ParseError on variables or misplaced kinds.
    Triple(Term s, Term p, Term o);

    /// `<s> <p> <o> .`
    std::string wire() const;

    friend bool operator==(const Triple&, const Triple&) = default;
    friend std::strong_ordering operator<=>(const Triple& a, const Triple& b);
};

struct TriplePattern {
    Term subject;
    Term predicate;
    Term object;

    TriplePattern() = default;
    /// Throws ldf::ParseError if the predicate is a literal.
    TriplePattern(Term s, Term p, Term o);
    explicit TriplePattern(const Triple& t) : TriplePattern(t.subject, t.predicate, t.object) {}

    std::array<const Term*, 3> positions() const { return {&subject, &predicate, &object}; }

    /// Distinct variable names, in subject/predicate/object order of first occurrence.
    std::vector<std::string> variables() const;
    bool is_ground() const;
    /// Converts a ground pattern into a triple; nullopt if not ground or ill-typed.
    std::optional<Triple> as_triple() const;

    /// `s p o` in wire form, no terminator.
    std::string wire() const;

    friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

/// Parses a single `s p o` line (optional trailing ` .`).
TriplePattern parse_pattern(std::string_view line);

/// A partial map from variable names to ground terms.
class SolutionMapping {
public:
    using Map = std::map<std::string, Term>;

    SolutionMapping() = default;
    SolutionMapping(std::initializer_list<std::pair<const std::string, Term>> init);

    /// Throws ldf::BindingError when `value` is a variable.
    void bind(const std::string& var, Term value);
    const Term* find(const std::string& var) const;
    bool contains(const std::string& var) const { return bindings_.count(var) != 0; }

    std::size_t size() const noexcept { return bindings_.size(); }
    bool empty() const noexcept { return bindings_.empty(); }
    const Map& bindings() const noexcept { return bindings_; }
    auto begin() const { return bindings_.begin(); }
    auto end() const { return bindings_.end(); }

    /// Keeps only the listed variables.
    SolutionMapping project(const std::vector<std::string>& vars) const;

    /// `var=term` pairs sorted by variable, joined by `,`.
    std::string wire() const;
    /// `?var=term` pairs sorted by variable, joined by a space.
    std::string display() const;

    friend bool operator==(const SolutionMapping&, const SolutionMapping&) = default;
    friend auto operator<=>(const SolutionMapping& a, const SolutionMapping& b) {
        return a.bindings_ <=> b.bindings_;
    }

private:
    Map bindings_;
};

/// Ordered sequence of pairwise-distinct solution mappings.
class MappingSequence {
public:
    MappingSequence() = default;
    MappingSequence(std::initializer_list<SolutionMapping> init);

    /// Appends unless an equal mapping is already present; returns whether it was added.
    bool push_back(SolutionMapping mu);

    std::size_t size() const noexcept { return mappings_.size(); }
    bool empty() const noexcept { return mappings_.empty(); }
    const std::vector<SolutionMapping>& mappings() const noexcept { return mappings_; }
    auto begin() const { return mappings_.begin(); }
    auto end() const { return mappings_.end(); }
    const SolutionMapping& operator[](std::size_t i) const { return mappings_[i]; }

    /// `mu1;mu2;...` (not percent-encoded).
    std::string wire() const;
    static MappingSequence parse(std::string_view wire);

    friend bool operator==(const MappingSequence&, const MappingSequence&) = default;

private:
    std::vector<SolutionMapping> mappings_;
    std::set<SolutionMapping> seen_;
};

bool matches(const Triple& t, const TriplePattern& tp);

/// The mapping over vars(tp) induced by a matching triple; nullopt if `t` does not match.
std::optional<SolutionMapping> induced_mapping(const Triple& t, const TriplePattern& tp);

/// Throws ldf::BindingError if a substitution puts a literal in subject or a non-IRI in
/// predicate position.
TriplePattern apply(const SolutionMapping& mu, const TriplePattern& tp);

bool compatible(const SolutionMapping& a, const SolutionMapping& b);

/// Throws ldf::BindingError if the mappings are incompatible.
SolutionMapping merge(const SolutionMapping& a, const SolutionMapping& b);

}  // namespace ldf::rdf
