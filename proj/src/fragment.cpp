#include "ldf/fragment.hpp"

#include <charconv>
#include <map>

#include "ldf/error.hpp"

namespace ldf::fragment {

namespace {

bool unreserved(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '.' || c == '_' || c == '~';
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

rdf::Term decode_term(std::string_view encoded, const char* key) {
    try {
        return rdf::Term::parse(percent_decode(encoded));
    } catch (const ParseError& e) {
        throw RequestError(std::string("bad '") + key + "' parameter: " + e.what());
    }
}

}  // namespace

FragmentRequest FragmentRequest::with_page(std::uint64_t p) const {
    FragmentRequest r = *this;
    r.page = p;
    return r;
}

std::string percent_encode(std::string_view raw) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(raw.size() * 3);
    for (char c : raw) {
        if (unreserved(c)) {
            out += c;
        } else {
            auto b = static_cast<unsigned char>(c);
            out += '%';
            out += kHex[b >> 4];
            out += kHex[b & 0xF];
        }
    }
    return out;
}

std::string percent_decode(std::string_view encoded) {
    std::string out;
    out.reserve(encoded.size());
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        char c = encoded[i];
        if (c == '%') {
            if (i + 2 >= encoded.size()) throw RequestError("truncated percent escape");
            int hi = hex_value(encoded[i + 1]);
            int lo = hex_value(encoded[i + 2]);
            if (hi < 0 || lo < 0) throw RequestError("invalid percent escape");
            out += static_cast<char>(hi * 16 + lo);
            i += 2;
        } else {
            out += c;
        }
    }
    return out;
}

std::string to_target(const FragmentRequest& req) {
    std::string out = "/fragment?s=";
    out += percent_encode(req.pattern.subject.wire());
    out += "&p=";
    out += percent_encode(req.pattern.predicate.wire());
    out += "&o=";
    out += percent_encode(req.pattern.object.wire());
    out += "&page=";
    out += std::to_string(req.page);
    if (req.restricted()) {
        out += "&bindings=";
        out += percent_encode(req.bindings.wire());
    }
    return out;
}

FragmentRequest parse_target(std::string_view target) {
    auto q = target.find('?');
    std::string_view path = target.substr(0, q);
    if (path != "/fragment") throw RequestError("unknown path '" + std::string(path) + "'");
    if (q == std::string_view::npos) throw RequestError("missing query string");

    std::map<std::string, std::string_view, std::less<>> params;
    std::string_view query = target.substr(q + 1);
    while (!query.empty()) {
        auto amp = query.find('&');
        std::string_view part = query.substr(0, amp);
        query = amp == std::string_view::npos ? std::string_view{} : query.substr(amp + 1);
        auto eq = part.find('=');
        if (eq == std::string_view::npos) throw RequestError("parameter without value");
        std::string key(part.substr(0, eq));
        if (key != "s" && key != "p" && key != "o" && key != "page" && key != "bindings")
            throw RequestError("unknown parameter '" + key + "'");
        if (!params.emplace(key, part.substr(eq + 1)).second)
            throw RequestError("repeated parameter '" + key + "'");
    }
    for (const char* k : {"s", "p", "o"})
        if (!params.count(k)) throw RequestError(std::string("missing parameter '") + k + "'");

    FragmentRequest req;
    try {
        req.pattern = rdf::TriplePattern(decode_term(params["s"], "s"), decode_term(params["p"], "p"),
                                         decode_term(params["o"], "o"));
    } catch (const ParseError& e) {
        throw RequestError(e.what());
    }
    if (auto it = params.find("page"); it != params.end()) {
        std::string_view v = it->second;
        std::uint64_t page = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), page);
        if (ec != std::errc{} || ptr != v.data() + v.size() || page == 0)
            throw RequestError("page must be a positive integer");
        req.page = page;
    }
    if (auto it = params.find("bindings"); it != params.end()) {
        try {
            req.bindings = rdf::MappingSequence::parse(percent_decode(it->second));
        } catch (const ParseError& e) {
            throw RequestError(std::string("bad 'bindings' parameter: ") + e.what());
        } catch (const BindingError& e) {
            throw RequestError(std::string("bad 'bindings' parameter: ") + e.what());
        }
    }
    return req;
}

PageSlice page_bounds(std::size_t total, std::size_t pageSize, std::uint64_t page) {
    PageSlice s;
    if (pageSize == 0 || page == 0) return s;
    if (page - 1 > total / pageSize) {
        s.begin = s.end = total;
        return s;
    }
    std::uint64_t begin = (page - 1) * pageSize;
    if (begin >= total) {
        s.begin = s.end = total;
        return s;
    }
    std::uint64_t end = begin + pageSize;
    s.begin = begin;
    s.end = end < total ? end : total;
    s.hasNext = end < total;
    return s;
}

FragmentPage build_page(const store::Dataset& ds, const FragmentRequest& req, std::size_t pageSize,
                        MetadataPolicy meta) {
    FragmentPage out;
    out.request = req;
    std::vector<store::TripleIds> all = ds.match_ids(req.pattern, req.bindings);
    PageSlice s = page_bounds(all.size(), pageSize, req.page);
    out.data.reserve(s.end - s.begin);
    for (std::size_t i = s.begin; i < s.end; ++i) out.data.push_back(ds.decode(all[i]));
    out.estimate = {all.size(), 0};
    out.hasNext = s.hasNext;
    if (s.hasNext) out.controls.nextPage = to_target(req.with_page(req.page + 1));
    if (req.page > 1) out.controls.prevPage = to_target(req.with_page(req.page - 1));
    out.metadataTripleCount = meta.count(out.controls);
    return out;
}

}  // namespace ldf::fragment
