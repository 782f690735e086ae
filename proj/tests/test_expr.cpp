#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gauss/error.hpp"
#include "gauss/error_model.hpp"
#include "gauss/expr.hpp"
#include "oracles/random_expr.hpp"
#include "oracles/reference_evaluator.hpp"

using namespace gauss;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected gauss::Error");
    return ErrorKind::InvalidArgument;
}

NodePtr num(double v) { return ExprNode::make_number(v); }
NodePtr name(const char* n) { return ExprNode::make_name(n); }

}  // namespace

TEST_CASE("precedence") {
    const auto e = ModelExpression::parse("p + q*t");
    const auto expected = ExprNode::make_binary(NodeKind::Add, name("p"),
                                                ExprNode::make_binary(NodeKind::Mul, name("q"), name("t")));
    CHECK(trees_equal(e.root(), *expected));

    const auto neg = ModelExpression::parse("-(p)^2");
    CHECK(trees_equal(neg.root(), *ExprNode::make_unary(NodeKind::Neg, ExprNode::make_binary(NodeKind::Pow, name("p"), num(2)))));
    CHECK(evaluate(neg, {{"p", 3.0}}, {}) == -9.0);
    CHECK(evaluate(ModelExpression::parse("-p^2"), {{"p", 3.0}}, {}) == -9.0);
    CHECK(evaluate(ModelExpression::parse("2^3^2"), {}, {}) == 512.0);
    CHECK(evaluate(ModelExpression::parse("2^-1"), {}, {}) == 0.5);
    CHECK(evaluate(ModelExpression::parse("8/4/2"), {}, {}) == 1.0);
    CHECK(evaluate(ModelExpression::parse("8 - 4 - 2"), {}, {}) == 2.0);
    CHECK(evaluate(ModelExpression::parse("-2*3 + 1"), {}, {}) == -5.0);
    CHECK(evaluate(ModelExpression::parse("(1 + 2) * 3"), {}, {}) == 9.0);

    const double v = evaluate(ModelExpression::parse("p*sin(q*t + r)"), {{"p", 2}, {"q", 1}, {"r", 0}},
                              {{"t", std::numbers::pi / 2}});
    CHECK(v == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("evaluate") {
    CHECK(evaluate(ModelExpression::parse("p"), {{"p", 3.5}}, {}) == 3.5);
    CHECK(evaluate(ModelExpression::parse("p + q*t"), {{"p", 1}, {"q", 2}}, {{"t", 3}}) == 7.0);
    CHECK(evaluate(ModelExpression::parse("exp(-p*t)"), {{"p", 0.5}}, {{"t", 2}}) ==
          doctest::Approx(0.36787944117144232160).epsilon(1e-15));
    CHECK(evaluate(ModelExpression::parse("log(exp(2)) + cos(0)"), {}, {}) == doctest::Approx(3.0));
    CHECK(evaluate(ModelExpression::parse("1.5e2 + .5 + 2E-1"), {}, {}) == doctest::Approx(150.7));
}

TEST_CASE("evaluation errors") {
    CHECK(kind_of([] { evaluate(ModelExpression::parse("p + t"), {{"p", 1}}, {}); }) == ErrorKind::UnboundName);
    CHECK(kind_of([] { evaluate(ModelExpression::parse("p"), {{"p", 1}}, {{"p", 2}}); }) ==
          ErrorKind::AmbiguousBinding);
    CHECK(kind_of([] { evaluate(ModelExpression::parse("log(p - 3)"), {{"p", 1}}, {}); }) == ErrorKind::DomainError);
    CHECK(kind_of([] { evaluate(ModelExpression::parse("0/0"), {}, {}); }) == ErrorKind::DomainError);
    CHECK(kind_of([] { evaluate(ModelExpression::parse("log(0)"), {}, {}); }) == ErrorKind::DomainError);
    CHECK(kind_of([] { evaluate(ModelExpression::parse("(-8)^0.5"), {}, {}); }) == ErrorKind::DomainError);
    try {
        evaluate(ModelExpression::parse("p + log(p - 3)"), {{"p", 1}}, {});
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("log(p - 3)") != std::string::npos);
    }
    // Extra bindings are harmless.
    CHECK(evaluate(ModelExpression::parse("p"), {{"p", 1}, {"q", 2}}, {{"t", 3}}) == 1.0);
}

TEST_CASE("parse errors") {
    CHECK(kind_of([] { ModelExpression::parse(""); }) == ErrorKind::SyntaxError);
    CHECK(kind_of([] { ModelExpression::parse("   "); }) == ErrorKind::SyntaxError);
    CHECK(kind_of([] { ModelExpression::parse("tan(p)"); }) == ErrorKind::UnknownFunction);
    CHECK(kind_of([] { ModelExpression::parse("sin + 1"); }) == ErrorKind::SyntaxError);
    CHECK(kind_of([] { ModelExpression::parse("p $ q"); }) == ErrorKind::SyntaxError);

    try {
        ModelExpression::parse("p + * q");
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SyntaxError);
        CHECK(e.index() == std::optional<std::size_t>(4));
        const std::string msg = e.what();
        CHECK(msg.find("position 4") != std::string::npos);
        CHECK(msg.find("number") != std::string::npos);
        CHECK(msg.find("identifier") != std::string::npos);
    }
    try {
        ModelExpression::parse("(p + q");
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("')'") != std::string::npos);
    }
    CHECK(kind_of([] { ModelExpression::parse("p q"); }) == ErrorKind::SyntaxError);
}

TEST_CASE("names are case sensitive") {
    const auto e = ModelExpression::parse("P + p*T");
    CHECK(e.names() == std::set<std::string>{"P", "T", "p"});
}

TEST_CASE("print round trip") {
    for (const char* src : {"p + q*t", "-(p)^2", "(-p)^2", "2^3^2", "(2^3)^2", "a - (b - c)", "a/(b*c)", "a - -b",
                            "--a", "sin(x)^2", "exp(-p*t)", "1e-300*x", "0.1 + 1e+20", "2^-q^2", "-(a + b)*c"}) {
        const auto e = ModelExpression::parse(src);
        const auto again = ModelExpression::parse(e.print());
        CHECK_MESSAGE(e == again, src, " printed as ", e.print());
        CHECK(again.print() == e.print());
    }
    CHECK(ModelExpression::parse("((p)) + (q * (t))").print() == "p + q*t");
}

TEST_CASE("random corpus: round trip and reference agreement") {
    oracle::ExpressionGenerator gen(17);
    const std::map<std::string, double> params{{"p", 1.25}, {"q", -0.75}, {"r", 2.5}};
    const std::map<std::string, double> cov{{"t", 0.4}};
    std::map<std::string, double> all = params;
    all.insert(cov.begin(), cov.end());
    int finite = 0;
    for (int i = 0; i < 400; ++i) {
        const std::string src = gen();
        const auto e = ModelExpression::parse(src);
        CHECK(ModelExpression::parse(e.print()) == e);
        const auto ref = oracle::reference_evaluate(src, all);
        if (ref) {
            const double v = evaluate(e, params, cov);
            CHECK_MESSAGE(std::abs(v - *ref) <= 1e-12 * std::abs(*ref), src);
            ++finite;
        } else {
            CHECK_MESSAGE(kind_of([&] { evaluate(e, params, cov); }) == ErrorKind::DomainError, src);
        }
    }
    CHECK(finite > 200);
}

TEST_CASE("evaluation is deterministic") {
    const auto e = ModelExpression::parse("p*sin(q*t + r) + exp(-t/3)");
    const std::map<std::string, double> p{{"p", 1.1}, {"q", 2.3}, {"r", 0.4}};
    const double first = evaluate(e, p, {{"t", 1.7}});
    for (int i = 0; i < 10; ++i) CHECK(evaluate(e, p, {{"t", 1.7}}) == first);
}

TEST_CASE("predictions") {
    std::vector<ObservationRecord> recs;
    for (double t : {0.0, 1.0, 2.0}) recs.push_back({{{"t", t}}, 0.0, GaussianError(1.0)});
    const ObservationSet obs(recs);
    CHECK(predictions(ModelExpression::parse("p"), {{"p", 5}}, obs) == std::vector<double>{5, 5, 5});
    CHECK(predictions(ModelExpression::parse("p + q*t"), {{"p", 1}, {"q", 1}}, obs) == std::vector<double>{1, 2, 3});
    try {
        predictions(ModelExpression::parse("log(t)"), {}, obs);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DomainError);
        CHECK(e.index() == std::optional<std::size_t>(0));
    }
}

TEST_CASE("ParameterSpace") {
    const ParameterSpace s({{"p", 0.0, 1.0, 4}, {"q", -2.0, 2.0, 2}});
    CHECK(s.dimension() == 2);
    CHECK(s.node_count() == 8);
    CHECK(s.coordinate(0, 0) == 0.125);
    CHECK(s.coordinate(0, 3) == 0.875);
    CHECK(s.coordinate(1, 1) == 1.0);
    CHECK(s.cell_volume() == 0.5);
    CHECK(s.multi_index(5) == std::vector<std::size_t>{2, 1});
    CHECK(s.axis_index("q") == 1);
    CHECK_THROWS_AS(s.axis_index("z"), Error);
    CHECK_THROWS_AS(ParameterSpace({}), Error);
    CHECK_THROWS_AS(ParameterSpace({{"p", 1.0, 1.0, 4}}), Error);
    CHECK_THROWS_AS(ParameterSpace({{"p", 0.0, 1.0, 1}}), Error);
    CHECK_THROWS_AS(ParameterSpace({{"p", 0.0, 1.0, 4}, {"p", 0.0, 1.0, 4}}), Error);
}
