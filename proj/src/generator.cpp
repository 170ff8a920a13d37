#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <unordered_map>

#include "ldf/error.hpp"
#include "ldf/harness.hpp"

namespace ldf::harness {

namespace {

const std::string kEx = "http://example.org/";
const std::string kVocab = "http://example.org/vocab#";
const std::string kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::size_t below(std::size_t n) { return n ? static_cast<std::size_t>(engine_() % n) : 0; }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Popularity-skewed index in [0, n): low indices are drawn more often.
    std::size_t skewed(std::size_t n) {
        double u = unit();
        return std::min(n - 1, static_cast<std::size_t>(static_cast<double>(n) * u * u));
    }

private:
    std::mt19937_64 engine_;
};

rdf::Term entity(const std::string& kind, std::size_t i) {
    return rdf::Term::iri(kEx + kind + "/" + std::to_string(i));
}
rdf::Term prop(const std::string& name) { return rdf::Term::iri(kVocab + name); }
rdf::Term var(const std::string& name) { return rdf::Term::variable(name); }
rdf::Term lit(const std::string& v) { return rdf::Term::literal(v); }

struct Sizes {
    std::size_t users, products, reviews, retailers, cities, countries, genres;
};

Sizes sizes_for(const GeneratorParams& p) {
    // Roughly 17.7 triples per user once products and reviews are included.
    std::size_t users = std::max<std::size_t>(10, static_cast<std::size_t>(std::lround(p.size / 17.7)));
    return {users,
            users,
            users * 5 / 3,
            std::max<std::size_t>(3, p.size / 200),
            std::max<std::size_t>(2, p.cities),
            5,
            std::max<std::size_t>(2, p.genres)};
}

}  // namespace

Workload gen_data(const GeneratorParams& params) {
    Rng rng(params.seed);
    Sizes n = sizes_for(params);
    Workload w;
    auto add = [&](rdf::Term s, const rdf::Term& p, rdf::Term o) {
        w.triples.emplace_back(std::move(s), p, std::move(o));
    };
    const rdf::Term type = rdf::Term::iri(kRdfType);
    const rdf::Term user_class = rdf::Term::iri(kVocab + "User");
    const rdf::Term product_class = rdf::Term::iri(kVocab + "Product");
    const rdf::Term name = prop("name"), lives_in = prop("livesIn"), follows = prop("follows"),
                    likes = prop("likes"), has_genre = prop("hasGenre"), sold_by = prop("soldBy"),
                    price = prop("price"), review_for = prop("reviewFor"), reviewer = prop("reviewer"),
                    rating = prop("rating"), located_in = prop("locatedIn"), in_country = prop("inCountry");

    auto distinct_picks = [&](std::size_t count, std::size_t pool, std::size_t exclude) {
        std::set<std::size_t> picked;
        for (std::size_t attempt = 0; picked.size() < count && attempt < count * 8; ++attempt) {
            std::size_t i = rng.skewed(pool);
            if (i != exclude) picked.insert(i);
        }
        return picked;
    };

    for (std::size_t c = 0; c < n.cities; ++c) add(entity("city", c), in_country, entity("country", c % n.countries));
    for (std::size_t r = 0; r < n.retailers; ++r) add(entity("retailer", r), located_in, entity("city", rng.skewed(n.cities)));
    for (std::size_t u = 0; u < n.users; ++u) {
        auto s = entity("user", u);
        add(s, type, user_class);
        add(s, name, lit("User " + std::to_string(u)));
        add(s, lives_in, entity("city", rng.skewed(n.cities)));
        std::size_t f = 1 + rng.below(2 * params.followFanout);
        for (auto v : distinct_picks(f, n.users, u)) add(s, follows, entity("user", v));
        std::size_t l = 1 + rng.below(2 * params.likeFanout);
        for (auto p : distinct_picks(l, n.products, n.products)) add(s, likes, entity("product", p));
    }
    for (std::size_t p = 0; p < n.products; ++p) {
        auto s = entity("product", p);
        add(s, type, product_class);
        std::size_t g = 1 + rng.below(2);
        for (auto genre : distinct_picks(g, n.genres, n.genres)) add(s, has_genre, entity("genre", genre));
        add(s, sold_by, entity("retailer", rng.skewed(n.retailers)));
        add(s, price, lit(std::to_string(5 + rng.below(200))));
    }
    for (std::size_t v = 0; v < n.reviews; ++v) {
        auto s = entity("review", v);
        add(s, review_for, entity("product", rng.skewed(n.products)));
        add(s, reviewer, entity("user", rng.below(n.users)));
        add(s, rating, lit(std::to_string(1 + rng.below(5))));
    }

    // Query templates over small constant pools.
    const std::size_t user_pool = std::min<std::size_t>(n.users, 30);
    auto P = [](rdf::Term s, rdf::Term p, rdf::Term o) { return rdf::TriplePattern(std::move(s), std::move(p), std::move(o)); };
    for (std::size_t i = 0; i < params.queries; ++i) {
        std::size_t t = rng.below(10);
        auto genre = entity("genre", rng.skewed(n.genres));
        auto city = entity("city", rng.skewed(n.cities));
        auto user = entity("user", rng.skewed(user_pool));
        client::BgpQuery q;
        std::string shape;
        switch (t) {
            case 0:
                shape = "S1";
                q.patterns = {P(var("p"), has_genre, genre)};
                break;
            case 1:
                shape = "L2";
                q.patterns = {P(user, follows, var("v")), P(var("v"), lives_in, var("c"))};
                break;
            case 2:
                shape = "L3";
                q.patterns = {P(var("u"), follows, var("v")), P(var("v"), likes, var("p")),
                              P(var("p"), has_genre, genre)};
                break;
            case 3:
                shape = "S3";
                q.patterns = {P(var("u"), lives_in, city), P(var("u"), name, var("n")),
                              P(var("u"), likes, var("p"))};
                break;
            case 4:
                shape = "S4";
                q.patterns = {P(var("p"), has_genre, genre), P(var("p"), sold_by, var("r")),
                              P(var("p"), price, var("pr")), P(var("p"), type, product_class)};
                break;
            case 5:
                shape = "F5";
                q.patterns = {P(var("v"), review_for, var("p")), P(var("v"), reviewer, var("u")),
                              P(var("u"), lives_in, city), P(var("p"), has_genre, var("g")),
                              P(var("v"), rating, lit("5"))};
                break;
            case 6:
                shape = "C4";
                q.patterns = {P(var("u"), likes, var("p")), P(var("p"), sold_by, var("r")),
                              P(var("r"), located_in, var("c")), P(var("u"), lives_in, var("c"))};
                break;
            case 7:
                shape = "F3";
                q.patterns = {P(var("r"), located_in, city), P(var("p"), sold_by, var("r")),
                              P(var("v"), review_for, var("p"))};
                break;
            case 8:
                shape = "L2c";
                q.patterns = {P(var("u"), lives_in, city), P(var("u"), follows, var("v"))};
                break;
            default:
                shape = "L5";
                q.patterns = {P(user, follows, var("a")), P(var("a"), follows, var("b")),
                              P(var("b"), likes, var("p")), P(var("p"), sold_by, var("r")),
                              P(var("r"), located_in, var("c"))};
                break;
        }
        q.name = "Q" + std::to_string(i + 1) + "_" + shape;
        w.queries.push_back(std::move(q));
    }
    return w;
}

void write_workload(const Workload& w, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::ofstream data(dir / "data.nt");
    if (!data) throw Error("cannot write " + (dir / "data.nt").string());
    store::write_triples(data, w.triples);
    std::ofstream queries(dir / "queries.txt");
    if (!queries) throw Error("cannot write " + (dir / "queries.txt").string());
    client::write_queries(queries, w.queries);
}

double shared_pattern_fraction(const std::vector<client::BgpQuery>& queries) {
    if (queries.empty()) return 0.0;
    std::unordered_map<std::string, std::set<std::size_t>> owners;
    for (std::size_t i = 0; i < queries.size(); ++i)
        for (const auto& tp : queries[i].patterns) owners[tp.wire()].insert(i);
    std::size_t sharing = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        bool shares = false;
        for (const auto& tp : queries[i].patterns) shares = shares || owners[tp.wire()].size() > 1;
        sharing += shares ? 1 : 0;
    }
    return static_cast<double>(sharing) / static_cast<double>(queries.size());
}

bool join_heavy(const client::BgpQuery& q) { return q.patterns.size() >= 2; }

}  // namespace ldf::harness
