#include "ldf/rdf.hpp"

#include <cctype>

#include "ldf/error.hpp"

namespace ldf::rdf {

namespace {

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool valid_blank_label(std::string_view label) {
    if (label.empty()) return false;
    for (char c : label)
        if (!is_name_char(c) && c != '-') return false;
    return true;
}

std::string escape_literal(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '"': out += "\\\""; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

bool valid_iri(std::string_view value) {
    auto colon = value.find(':');
    if (colon == std::string_view::npos || colon == 0) return false;
    if (!std::isalpha(static_cast<unsigned char>(value[0]))) return false;
    for (std::size_t i = 1; i < colon; ++i) {
        char c = value[i];
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return false;
    }
    for (char c : value) {
        if (c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '\\' ||
            static_cast<unsigned char>(c) <= 0x20)
            return false;
    }
    return true;
}

bool valid_variable_name(std::string_view name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!is_name_char(c)) return false;
    return true;
}

Term Term::iri(std::string value) {
    if (!valid_iri(value)) throw ParseError("invalid IRI '" + value + "'");
    return Term(TermKind::Iri, std::move(value));
}

Term Term::literal(std::string value) { return Term(TermKind::Literal, std::move(value)); }

Term Term::blank(std::string label) {
    if (!valid_blank_label(label)) throw ParseError("invalid blank node label '" + label + "'");
    return Term(TermKind::BlankNode, std::move(label));
}

Term Term::variable(std::string name) {
    if (!valid_variable_name(name)) throw ParseError("invalid variable name '" + name + "'");
    return Term(TermKind::Variable, std::move(name));
}

std::string Term::wire() const {
    switch (kind_) {
        case TermKind::Iri: return "<" + lexical_ + ">";
        case TermKind::Literal: return "\"" + escape_literal(lexical_) + "\"";
        case TermKind::BlankNode: return "_:" + lexical_;
        case TermKind::Variable: return "?" + lexical_;
    }
    return {};
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
    int c = a.wire().compare(b.wire());
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

Term read_term(std::string_view text, std::size_t& pos) {
    if (pos >= text.size()) throw ParseError("expected a term");
    char lead = text[pos];
    if (lead == '<') {
        auto close = text.find('>', pos + 1);
        if (close == std::string_view::npos) throw ParseError("unterminated IRI");
        Term t = Term::iri(std::string(text.substr(pos + 1, close - pos - 1)));
        pos = close + 1;
        return t;
    }
    if (lead == '"') {
        std::string value;
        std::size_t i = pos + 1;
        for (;; ++i) {
            if (i >= text.size()) throw ParseError("unterminated literal");
            char c = text[i];
            if (c == '"') break;
            if (c == '\\') {
                if (++i >= text.size()) throw ParseError("dangling escape in literal");
                switch (text[i]) {
                    case '\\': value += '\\'; break;
                    case '"': value += '"'; break;
                    case 'n': value += '\n'; break;
                    case 'r': value += '\r'; break;
                    default: throw ParseError("unknown escape in literal");
                }
            } else {
                value += c;
            }
        }
        pos = i + 1;
        return Term::literal(std::move(value));
    }
    if (lead == '?' || (lead == '_' && pos + 1 < text.size() && text[pos + 1] == ':')) {
        std::size_t start = pos + (lead == '?' ? 1 : 2);
        std::size_t end = start;
        while (end < text.size() && (is_name_char(text[end]) || (lead == '_' && text[end] == '-')))
            ++end;
        std::string name(text.substr(start, end - start));
        pos = end;
        return lead == '?' ? Term::variable(std::move(name)) : Term::blank(std::move(name));
    }
    throw ParseError("unexpected character '" + std::string(1, lead) + "' at start of term");
}

Term Term::parse(std::string_view wire) {
    std::size_t pos = 0;
    Term t = read_term(wire, pos);
    if (pos != wire.size()) throw ParseError("trailing characters after term '" + std::string(wire) + "'");
    return t;
}

Triple::Triple(Term s, Term p, Term o)
    : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
    if (!(subject.is_iri() || subject.is_blank()))
        throw ParseError("triple subject must be an IRI or blank node");
    if (!predicate.is_iri()) throw ParseError("triple predicate must be an IRI");
    if (object.is_variable()) throw ParseError("triple object must not be a variable");
}

std::string Triple::wire() const {
    return subject.wire() + " " + predicate.wire() + " " + object.wire() + " .";
}

std::strong_ordering operator<=>(const Triple& a, const Triple& b) {
    if (auto c = a.subject <=> b.subject; c != 0) return c;
    if (auto c = a.predicate <=> b.predicate; c != 0) return c;
    return a.object <=> b.object;
}

TriplePattern::TriplePattern(Term s, Term p, Term o)
    : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
    if (predicate.is_literal()) throw ParseError("pattern predicate must not be a literal");
}

std::vector<std::string> TriplePattern::variables() const {
    std::vector<std::string> vars;
    for (const Term* t : positions()) {
        if (!t->is_variable()) continue;
        bool seen = false;
        for (const auto& v : vars) seen = seen || v == t->lexical();
        if (!seen) vars.push_back(t->lexical());
    }
    return vars;
}

bool TriplePattern::is_ground() const {
    return !subject.is_variable() && !predicate.is_variable() && !object.is_variable();
}

std::optional<Triple> TriplePattern::as_triple() const {
    if (!is_ground()) return std::nullopt;
    if (!(subject.is_iri() || subject.is_blank()) || !predicate.is_iri()) return std::nullopt;
    return Triple(subject, predicate, object);
}

std::string TriplePattern::wire() const {
    return subject.wire() + " " + predicate.wire() + " " + object.wire();
}

TriplePattern parse_pattern(std::string_view line) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    };
    std::array<Term, 3> terms;
    for (auto& t : terms) {
        skip_ws();
        t = read_term(line, pos);
    }
    skip_ws();
    if (pos < line.size() && line[pos] == '.') {
        ++pos;
        skip_ws();
    }
    while (pos < line.size() && (line[pos] == '\r' || line[pos] == ' ')) ++pos;
    if (pos != line.size()) throw ParseError("trailing characters after pattern");
    return TriplePattern(std::move(terms[0]), std::move(terms[1]), std::move(terms[2]));
}

SolutionMapping::SolutionMapping(std::initializer_list<std::pair<const std::string, Term>> init) {
    for (const auto& [var, value] : init) bind(var, value);
}

void SolutionMapping::bind(const std::string& var, Term value) {
    if (value.is_variable()) throw BindingError("cannot bind ?" + var + " to a variable");
    if (!valid_variable_name(var)) throw BindingError("invalid variable name '" + var + "'");
    bindings_.insert_or_assign(var, std::move(value));
}

const Term* SolutionMapping::find(const std::string& var) const {
    auto it = bindings_.find(var);
    return it == bindings_.end() ? nullptr : &it->second;
}

SolutionMapping SolutionMapping::project(const std::vector<std::string>& vars) const {
    SolutionMapping out;
    for (const auto& v : vars)
        if (const Term* t = find(v)) out.bindings_.emplace(v, *t);
    return out;
}

std::string SolutionMapping::wire() const {
    std::string out;
    for (const auto& [var, value] : bindings_) {
        if (!out.empty()) out += ',';
        out += var;
        out += '=';
        out += value.wire();
    }
    return out;
}

std::string SolutionMapping::display() const {
    std::string out;
    for (const auto& [var, value] : bindings_) {
        if (!out.empty()) out += ' ';
        out += '?';
        out += var;
        out += '=';
        out += value.wire();
    }
    return out;
}

MappingSequence::MappingSequence(std::initializer_list<SolutionMapping> init) {
    for (const auto& mu : init) push_back(mu);
}

bool MappingSequence::push_back(SolutionMapping mu) {
    if (!seen_.insert(mu).second) return false;
    mappings_.push_back(std::move(mu));
    return true;
}

std::string MappingSequence::wire() const {
    std::string out;
    for (std::size_t i = 0; i < mappings_.size(); ++i) {
        if (i) out += ';';
        out += mappings_[i].wire();
    }
    return out;
}

MappingSequence MappingSequence::parse(std::string_view wire) {
    MappingSequence seq;
    std::size_t pos = 0;
    while (true) {
        SolutionMapping mu;
        while (pos < wire.size() && wire[pos] != ';') {
            std::size_t eq = wire.find('=', pos);
            if (eq == std::string_view::npos) throw ParseError("binding without '='");
            std::string var(wire.substr(pos, eq - pos));
            if (!valid_variable_name(var)) throw ParseError("invalid variable name in bindings");
            if (mu.contains(var)) throw ParseError("variable bound twice in one mapping");
            pos = eq + 1;
            Term value = read_term(wire, pos);
            if (value.is_variable()) throw ParseError("binding value must be ground");
            mu.bind(var, std::move(value));
            if (pos < wire.size() && wire[pos] == ',') {
                ++pos;
                if (pos >= wire.size() || wire[pos] == ';') throw ParseError("empty binding");
            } else if (pos < wire.size() && wire[pos] != ';') {
                throw ParseError("expected ',' or ';' in bindings");
            }
        }
        if (!seq.push_back(std::move(mu))) throw ParseError("duplicate mapping in bindings");
        if (pos >= wire.size()) break;
        ++pos;  // ';'
    }
    return seq;
}

std::optional<SolutionMapping> induced_mapping(const Triple& t, const TriplePattern& tp) {
    SolutionMapping mu;
    const std::array<const Term*, 3> ground{&t.subject, &t.predicate, &t.object};
    auto pat = tp.positions();
    for (std::size_t i = 0; i < 3; ++i) {
        const Term& p = *pat[i];
        const Term& g = *ground[i];
        if (p.is_variable()) {
            if (const Term* bound = mu.find(p.lexical())) {
                if (*bound != g) return std::nullopt;
            } else {
                mu.bind(p.lexical(), g);
            }
        } else if (p != g) {
            return std::nullopt;
        }
    }
    return mu;
}

bool matches(const Triple& t, const TriplePattern& tp) { return induced_mapping(t, tp).has_value(); }

TriplePattern apply(const SolutionMapping& mu, const TriplePattern& tp) {
    auto substitute = [&](const Term& t) -> const Term& {
        if (t.is_variable())
            if (const Term* v = mu.find(t.lexical())) return *v;
        return t;
    };
    const Term& s = substitute(tp.subject);
    const Term& p = substitute(tp.predicate);
    const Term& o = substitute(tp.object);
    if (s.is_literal()) throw BindingError("literal in subject position: " + s.wire());
    if (!(p.is_iri() || p.is_variable()))
        throw BindingError("non-IRI in predicate position: " + p.wire());
    return TriplePattern(s, p, o);
}

bool compatible(const SolutionMapping& a, const SolutionMapping& b) {
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    for (const auto& [var, value] : small) {
        const Term* other = large.find(var);
        if (other && *other != value) return false;
    }
    return true;
}

SolutionMapping merge(const SolutionMapping& a, const SolutionMapping& b) {
    if (!compatible(a, b)) throw BindingError("cannot merge incompatible mappings");
    SolutionMapping out = a;
    for (const auto& [var, value] : b)
        if (!out.contains(var)) out.bind(var, value);
    return out;
}

}  // namespace ldf::rdf
