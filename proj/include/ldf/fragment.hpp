#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ldf/rdf.hpp"
#include "ldf/store.hpp"

namespace ldf::fragment {

/// Identifies a page of a TPF fragment (empty bindings) or of a brTPF fragment.
struct FragmentRequest {
    rdf::TriplePattern pattern;
    rdf::MappingSequence bindings;
    std::uint64_t page = 1;

    bool restricted() const noexcept { return !bindings.empty(); }
    FragmentRequest with_page(std::uint64_t p) const;

    friend bool operator==(const FragmentRequest&, const FragmentRequest&) = default;
};

/// Canonical request target, also the cache key:
/// `/fragment?s=..&p=..&o=..&page=N[&bindings=..]`.
std::string to_target(const FragmentRequest& req);

/// Inverse of to_target. Accepts parameters in any order; a missing page means 1.
/// Throws ldf::RequestError.
FragmentRequest parse_target(std::string_view target);

std::string percent_encode(std::string_view raw);
/// Throws ldf::RequestError on malformed escapes.
std::string percent_decode(std::string_view encoded);

inline constexpr std::string_view kTemplateDescription = "/fragment{?s,p,o,page,bindings}";

struct ControlSet {
    std::string templateDescription{kTemplateDescription};
    std::optional<std::string> nextPage;
    std::optional<std::string> prevPage;

    friend bool operator==(const ControlSet&, const ControlSet&) = default;
};

/// Per-page count of non-data triples: `base` (cardinality, template control,
/// page self-description) plus one per next/prev link.
struct MetadataPolicy {
    std::uint32_t base = 3;

    std::uint32_t count(const ControlSet& c) const {
        return base + (c.nextPage ? 1u : 0u) + (c.prevPage ? 1u : 0u);
    }
};

struct FragmentPage {
    FragmentRequest request;
    std::vector<rdf::Triple> data;
    store::CardinalityEstimate estimate;
    bool hasNext = false;
    ControlSet controls;
    std::uint32_t metadataTripleCount = 0;
};

struct PageSlice {
    std::size_t begin = 0;
    std::size_t end = 0;
    bool hasNext = false;
};

/// Index range [(page-1)*pageSize, page*pageSize) clipped to `total`.
PageSlice page_bounds(std::size_t total, std::size_t pageSize, std::uint64_t page);

template <typename T>
std::pair<std::vector<T>, bool> paginate(const std::vector<T>& all, std::size_t pageSize,
                                         std::uint64_t page) {
    PageSlice s = page_bounds(all.size(), pageSize, page);
    return {std::vector<T>(all.begin() + s.begin, all.begin() + s.end), s.hasNext};
}

/// Throws ldf::BindingError if the bindings cannot be applied to the pattern.
FragmentPage build_page(const store::Dataset& ds, const FragmentRequest& req, std::size_t pageSize,
                        MetadataPolicy meta = {});

}  // namespace ldf::fragment
