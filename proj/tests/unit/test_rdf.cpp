#include <gtest/gtest.h>

#include "ldf/error.hpp"
#include "ldf/rdf.hpp"
#include "random_cases.hpp"

using namespace ldf::rdf;

namespace {

Term I(const std::string& local) { return Term::iri("http://ex.org/" + local); }
Term V(const std::string& name) { return Term::variable(name); }
Term L(const std::string& v) { return Term::literal(v); }

}  // namespace

TEST(Term, WireRoundTrip) {
    for (const auto& t : {I("a"), L("plain"), L("quote \" and \\ and\nnewline"), Term::blank("b0"), V("x_1")})
        EXPECT_EQ(Term::parse(t.wire()), t) << t.wire();
    EXPECT_EQ(I("a").wire(), "<http://ex.org/a>");
    EXPECT_EQ(V("x").wire(), "?x");
    EXPECT_EQ(L("a\"b").wire(), "\"a\\\"b\"");
}

TEST(Term, RejectsMalformed) {
    EXPECT_THROW(Term::iri("no-scheme"), ldf::ParseError);
    EXPECT_THROW(Term::iri("http://a b"), ldf::ParseError);
    EXPECT_THROW(Term::variable(""), ldf::ParseError);
    EXPECT_THROW(Term::variable("a b"), ldf::ParseError);
    EXPECT_THROW(Term::parse("<http://ex.org/a"), ldf::ParseError);
    EXPECT_THROW(Term::parse("\"open"), ldf::ParseError);
    EXPECT_THROW(Term::parse("bare"), ldf::ParseError);
    EXPECT_THROW(Term::parse("<http://ex.org/a> trailing"), ldf::ParseError);
}

TEST(Term, EqualityIsKindAndLexical) {
    EXPECT_NE(Term::iri("http://ex.org/a"), Term::literal("http://ex.org/a"));
    EXPECT_EQ(I("a"), I("a"));
    EXPECT_LT(I("a"), I("b"));
}

TEST(Triple, RejectsVariablesAndMisplacedKinds) {
    EXPECT_THROW(Triple(V("x"), I("p"), I("o")), ldf::ParseError);
    EXPECT_THROW(Triple(L("s"), I("p"), I("o")), ldf::ParseError);
    EXPECT_THROW(Triple(I("s"), L("p"), I("o")), ldf::ParseError);
    EXPECT_NO_THROW(Triple(I("s"), I("p"), L("o")));
    EXPECT_EQ(Triple(I("s"), I("p"), L("o")).wire(), "<http://ex.org/s> <http://ex.org/p> \"o\" .");
}

TEST(TriplePattern, VariablesAndParse) {
    TriplePattern tp(V("x"), I("p"), V("x"));
    EXPECT_EQ(tp.variables(), std::vector<std::string>{"x"});
    EXPECT_FALSE(tp.is_ground());
    EXPECT_THROW(TriplePattern(V("x"), L("p"), V("y")), ldf::ParseError);
    auto parsed = parse_pattern("?x <http://ex.org/p> \"a b\" .");
    EXPECT_EQ(parsed, TriplePattern(V("x"), I("p"), L("a b")));
    EXPECT_EQ(parse_pattern(parsed.wire()), parsed);
}

TEST(Matches, SpecExamples) {
    Triple ab(I("a"), I("p"), I("b"));
    Triple aa(I("a"), I("p"), I("a"));
    EXPECT_TRUE(matches(ab, TriplePattern(V("x"), I("p"), V("y"))));
    EXPECT_FALSE(matches(ab, TriplePattern(V("x"), I("p"), V("x"))));
    EXPECT_TRUE(matches(aa, TriplePattern(V("x"), I("p"), V("x"))));
}

TEST(Apply, SpecExamples) {
    TriplePattern tp(V("x"), I("p"), V("y"));
    EXPECT_EQ(apply({{"x", I("a")}}, tp), TriplePattern(I("a"), I("p"), V("y")));
    EXPECT_EQ(apply({}, tp), tp);
    EXPECT_THROW(apply({{"x", L("lit")}}, TriplePattern(V("x"), I("p"), I("b"))), ldf::BindingError);
    EXPECT_THROW(apply({{"p", L("lit")}}, TriplePattern(I("a"), V("p"), I("b"))), ldf::BindingError);
}

TEST(Compatible, SpecExamples) {
    EXPECT_TRUE(compatible({{"x", I("a")}}, {{"y", I("b")}}));
    EXPECT_TRUE(compatible({{"x", I("a")}}, {{"x", I("a")}, {"y", I("b")}}));
    EXPECT_FALSE(compatible({{"x", I("a")}}, {{"x", I("b")}}));
    EXPECT_TRUE(compatible({}, {{"x", I("b")}}));
}

TEST(Merge, SpecExamples) {
    EXPECT_EQ(merge({{"x", I("a")}}, {{"y", I("b")}}), SolutionMapping({{"x", I("a")}, {"y", I("b")}}));
    EXPECT_EQ(merge({{"x", I("a")}}, {}), SolutionMapping({{"x", I("a")}}));
    EXPECT_EQ(merge({{"x", I("a")}}, {{"x", I("a")}}), SolutionMapping({{"x", I("a")}}));
    EXPECT_THROW(merge({{"x", I("a")}}, {{"x", I("b")}}), ldf::BindingError);
}

TEST(SolutionMapping, BindRejectsVariables) {
    SolutionMapping mu;
    EXPECT_THROW(mu.bind("x", V("y")), ldf::BindingError);
    mu.bind("y", I("b"));
    mu.bind("x", L("1"));
    EXPECT_EQ(mu.wire(), "x=\"1\",y=<http://ex.org/b>");
    EXPECT_EQ(mu.display(), "?x=\"1\" ?y=<http://ex.org/b>");
    EXPECT_EQ(mu.project({"y", "z"}), SolutionMapping({{"y", I("b")}}));
}

TEST(MappingSequence, WireRoundTripAndDistinctness) {
    MappingSequence omega{{{"x", I("a")}}, {{"x", I("c")}, {"y", L("1;2,3")}}};
    EXPECT_EQ(omega.size(), 2u);
    EXPECT_FALSE(omega.push_back({{"x", I("a")}}));
    EXPECT_EQ(MappingSequence::parse(omega.wire()), omega);
    EXPECT_EQ(MappingSequence::parse(""), MappingSequence{SolutionMapping{}});
    EXPECT_THROW(MappingSequence::parse("x=<http://ex.org/a>;x=<http://ex.org/a>"), ldf::ParseError);
    EXPECT_THROW(MappingSequence::parse("x=<http://ex.org/a>,x=<http://ex.org/b>"), ldf::ParseError);
    EXPECT_THROW(MappingSequence::parse("x=?y"), ldf::Error);
}

TEST(InducedMapping, CoversPatternVariables) {
    Triple t(I("a"), I("p"), L("1"));
    auto mu = induced_mapping(t, TriplePattern(V("s"), I("p"), V("o")));
    ASSERT_TRUE(mu);
    EXPECT_EQ(*mu, SolutionMapping({{"s", I("a")}, {"o", L("1")}}));
    EXPECT_FALSE(induced_mapping(t, TriplePattern(V("s"), I("q"), V("o"))));
}

// Property tests over generated mappings and patterns.

class AlgebraProperties : public ::testing::Test {
protected:
    testsupport::Rng rng{20240517};
    testsupport::Vocab vocab = testsupport::Vocab::make(6, 3, 3);

    SolutionMapping random_mapping() {
        SolutionMapping mu;
        for (const char* v : {"x", "y", "z"})
            if (rng.chance(0.5)) mu.bind(v, rng.chance(0.8) ? rng.pick(vocab.nodes) : rng.pick(vocab.literals));
        return mu;
    }
};

TEST_F(AlgebraProperties, CompatibleIsSymmetricAndReflexive) {
    for (int i = 0; i < 2000; ++i) {
        auto a = random_mapping(), b = random_mapping();
        EXPECT_EQ(compatible(a, b), compatible(b, a));
        EXPECT_TRUE(compatible(a, a));
    }
}

TEST_F(AlgebraProperties, MergeCommutativeAndAssociative) {
    for (int i = 0; i < 2000; ++i) {
        auto a = random_mapping(), b = random_mapping(), c = random_mapping();
        if (compatible(a, b)) EXPECT_EQ(merge(a, b), merge(b, a));
        if (compatible(a, b) && compatible(b, c) && compatible(a, c))
            EXPECT_EQ(merge(merge(a, b), c), merge(a, merge(b, c)));
    }
}

TEST_F(AlgebraProperties, FullApplicationMatches) {
    std::vector<Triple> data = testsupport::random_triples(rng, vocab, 30);
    for (int i = 0; i < 2000; ++i) {
        auto tp = testsupport::random_pattern(rng, vocab, data);
        SolutionMapping mu;
        for (const auto& v : tp.variables()) {
            bool in_sp = (tp.subject.is_variable() && tp.subject.lexical() == v) ||
                         (tp.predicate.is_variable() && tp.predicate.lexical() == v);
            bool in_p = tp.predicate.is_variable() && tp.predicate.lexical() == v;
            mu.bind(v, in_p ? rng.pick(vocab.predicates) : in_sp ? rng.pick(vocab.nodes) : vocab.any_object(rng));
        }
        auto ground = apply(mu, tp);
        ASSERT_TRUE(ground.is_ground());
        auto t = ground.as_triple();
        ASSERT_TRUE(t);
        EXPECT_TRUE(matches(*t, tp));
        EXPECT_EQ(matches(*t, tp), testsupport::brute_matches(*t, tp));
    }
}

TEST_F(AlgebraProperties, ApplyOfMergeComposes) {
    std::vector<Triple> data = testsupport::random_triples(rng, vocab, 30);
    for (int i = 0; i < 2000; ++i) {
        auto tp = testsupport::random_pattern(rng, vocab, data);
        SolutionMapping a, b;
        for (const char* v : {"x", "y", "z"}) {
            if (rng.chance(0.4)) a.bind(v, rng.pick(vocab.nodes));
            if (rng.chance(0.4)) b.bind(v, a.find(v) && rng.chance(0.7) ? *a.find(v) : rng.pick(vocab.nodes));
        }
        if (!compatible(a, b)) continue;
        TriplePattern lhs, rhs;
        bool lhs_ok = true, rhs_ok = true;
        try {
            lhs = apply(merge(a, b), tp);
        } catch (const ldf::BindingError&) {
            lhs_ok = false;
        }
        try {
            rhs = apply(a, apply(b, tp));
        } catch (const ldf::BindingError&) {
            rhs_ok = false;
        }
        ASSERT_EQ(lhs_ok, rhs_ok);
        if (lhs_ok) EXPECT_EQ(lhs, rhs);
    }
}

TEST_F(AlgebraProperties, MatchesAgreesWithBruteForce) {
    std::vector<Triple> data = testsupport::random_triples(rng, vocab, 60);
    for (int i = 0; i < 300; ++i) {
        auto tp = testsupport::random_pattern(rng, vocab, data);
        for (const auto& t : data) {
            ASSERT_EQ(matches(t, tp), testsupport::brute_matches(t, tp)) << t.wire() << " vs " << tp.wire();
            auto mu = induced_mapping(t, tp);
            ASSERT_EQ(mu.has_value(), matches(t, tp));
            if (mu) EXPECT_EQ(apply(*mu, tp).as_triple(), t);
        }
    }
}
