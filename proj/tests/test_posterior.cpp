#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gauss/error.hpp"
#include "gauss/posterior.hpp"
#include "oracles/numeric.hpp"

using namespace gauss;

namespace {

ObservationSet constant_obs(const std::vector<double>& values, const std::vector<double>& sigmas) {
    std::vector<ObservationRecord> recs;
    for (std::size_t i = 0; i < values.size(); ++i) recs.push_back({{}, values[i], GaussianError(sigmas[i])});
    return ObservationSet(recs);
}

ObservationSet line_obs(const std::vector<double>& t, const std::vector<double>& v, double sigma) {
    std::vector<ObservationRecord> recs;
    for (std::size_t i = 0; i < t.size(); ++i) recs.push_back({{{"t", t[i]}}, v[i], GaussianError(sigma)});
    return ObservationSet(recs);
}

double total_mass(const PosteriorGrid& g) {
    double s = 0;
    for (double m : g.masses(Execution::Serial)) s += m;
    return s;
}

}  // namespace

TEST_CASE("constant model, single datum") {
    const auto expr = ModelExpression::parse("p");
    const ParameterSpace space({{"p", 0.0, 6.0, 61}});
    const auto grid = evaluate_posterior(expr, constant_obs({3.0}, {1.0}), space);
    CHECK(map_estimate(grid).at("p") == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(total_mass(grid) - 1.0) < 1e-9);
    // Wide bounds: lambda approaches the Gaussian normalization of a single datum.
    const auto wide = evaluate_posterior(expr, constant_obs({3.0}, {1.0}), ParameterSpace({{"p", -20.0, 26.0, 4601}}));
    CHECK(std::abs(total_mass(wide) - 1.0) < 1e-9);
    CHECK(std::abs(normalization_lambda(wide)) < 1e-9);
}

TEST_CASE("constant model, two data: symmetric about the mean") {
    const auto grid =
        evaluate_posterior(ModelExpression::parse("p"), constant_obs({2.0, 4.0}, {1.0, 1.0}), ParameterSpace({{"p", 0.0, 6.0, 60}}));
    const auto mass = grid.masses(Execution::Serial);
    for (std::size_t i = 0; i < 30; ++i) CHECK(mass[i] == doctest::Approx(mass[59 - i]).epsilon(1e-12));
    // 3 lies between nodes 29 and 30; the tie breaks toward the lower index.
    CHECK(grid.map_node() == 29);
    CHECK(map_estimate(grid).at("p") == doctest::Approx(2.95));
}

TEST_CASE("normalization_lambda") {
    const PosteriorGrid unit(ParameterSpace({{"p", 0.0, 1.0, 10}}), std::vector<double>(10, 0.0));
    CHECK(normalization_lambda(unit) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(std::abs(normalization_lambda(unit)) < 1e-15);
    const PosteriorGrid two(ParameterSpace({{"p", 0.0, 2.0, 10}}), std::vector<double>(10, 0.0));
    CHECK(normalization_lambda(two) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    CHECK(normalization_lambda(two) == normalization_lambda(two));

    try {
        PosteriorGrid(ParameterSpace({{"p", 0.0, 1.0, 3}}), std::vector<double>(3, -INFINITY));
        FAIL("degenerate grid accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegeneratePosterior);
    }
    CHECK_THROWS_AS(PosteriorGrid(ParameterSpace({{"p", 0.0, 1.0, 3}}), {0.0, NAN, 0.0}), Error);
    CHECK_THROWS_AS(PosteriorGrid(ParameterSpace({{"p", 0.0, 1.0, 3}}), {0.0, 0.0}), Error);
}

TEST_CASE("map tie-break picks the lowest multi-index") {
    // Two equal peaks at nodes (1,3) and (3,1) of a 5x5 grid.
    std::vector<double> ld(25, -10.0);
    ld[1 * 5 + 3] = 0.0;
    ld[3 * 5 + 1] = 0.0;
    const PosteriorGrid g(ParameterSpace({{"a", 0.0, 5.0, 5}, {"b", 0.0, 5.0, 5}}), ld);
    CHECK(g.map_node() == 8);
    CHECK(map_estimate(g).at("a") == 1.5);
    CHECK(map_estimate(g).at("b") == 3.5);
    CHECK(PosteriorGrid(g.space(), ld, Execution::Serial).map_node() == 8);
}

TEST_CASE("boundary guard") {
    const auto grid = evaluate_posterior(ModelExpression::parse("p"), constant_obs({10.0}, {1.0}),
                                         ParameterSpace({{"p", -1.0, 1.0, 21}}));
    CHECK(map_boundary_axes(grid) == std::vector<std::string>{"p"});
    const auto inside = evaluate_posterior(ModelExpression::parse("p"), constant_obs({0.0}, {1.0}),
                                           ParameterSpace({{"p", -1.0, 1.0, 21}}));
    CHECK(map_boundary_axes(inside).empty());
}

TEST_CASE("marginal") {
    SUBCASE("one axis: the normalized grid itself") {
        const auto grid = evaluate_posterior(ModelExpression::parse("p"), constant_obs({1.0, 2.0}, {1.0, 0.5}),
                                             ParameterSpace({{"p", -3.0, 5.0, 81}}));
        const auto m = marginal(grid, "p");
        for (std::size_t i = 0; i < 81; ++i) CHECK(m.density[i] == doctest::Approx(grid.density(i)).epsilon(1e-12));
    }
    SUBCASE("separable density recovers each factor") {
        const ParameterSpace space({{"a", 0.0, 1.0, 7}, {"b", -1.0, 1.0, 5}});
        const std::vector<double> fa{0.1, 0.3, 0.9, 1.7, 0.4, 0.2, 0.05}, fb{2.0, 1.0, 0.5, 0.25, 0.125};
        std::vector<double> ld;
        for (double x : fa)
            for (double y : fb) ld.push_back(std::log(x * y));
        const PosteriorGrid g(space, ld);
        const auto ma = marginal(g, "a"), mb = marginal(g, "b");
        double za = 0, zb = 0;
        for (double x : fa) za += x * space.spacing(0);
        for (double y : fb) zb += y * space.spacing(1);
        for (std::size_t i = 0; i < fa.size(); ++i) CHECK(std::abs(ma.density[i] - fa[i] / za) < 1e-9);
        for (std::size_t i = 0; i < fb.size(); ++i) CHECK(std::abs(mb.density[i] - fb[i] / zb) < 1e-9);
        double s = 0;
        for (double d : ma.density) s += d * ma.spacing;
        CHECK(std::abs(s - 1.0) < 1e-9);
    }
    SUBCASE("linear model: marginal means match full-grid means") {
        const auto obs = line_obs({0, 1, 2, 3, 4}, {1.1, 2.9, 5.2, 6.8, 9.1}, 0.3);
        const auto g = evaluate_posterior(ModelExpression::parse("p + q*t"), obs,
                                          ParameterSpace({{"p", -1.0, 3.0, 121}, {"q", 1.0, 3.0, 101}}));
        const auto s = moments(g);
        for (const char* axis : {"p", "q"}) {
            const auto m = marginal(g, axis);
            double mean = 0;
            for (std::size_t i = 0; i < m.nodes.size(); ++i) mean += m.nodes[i] * m.density[i] * m.spacing;
            CHECK(std::abs(mean - s.mean.at(axis)) < 1e-9);
        }
    }
    CHECK_THROWS_AS(marginal(PosteriorGrid(ParameterSpace({{"p", 0.0, 1.0, 3}}), {0.0, 0.0, 0.0}), "q"), Error);
}

TEST_CASE("moments") {
    SUBCASE("uniform density: mean at the axis midpoint") {
        const PosteriorGrid g(ParameterSpace({{"p", 2.0, 5.0, 30}}), std::vector<double>(30, 0.0));
        CHECK(moments(g).mean.at("p") == doctest::Approx(3.5).epsilon(1e-13));
    }
    SUBCASE("symmetric peak: mean equals MAP") {
        const auto g = evaluate_posterior(ModelExpression::parse("p"), constant_obs({0.0}, {1.0}),
                                          ParameterSpace({{"p", -6.0, 6.0, 241}}));
        const auto s = moments(g);
        CHECK(std::abs(s.mean.at("p") - s.map_point.at("p")) < g.space().spacing(0));
    }
    SUBCASE("n equal-sigma observations: std close to sigma/sqrt(n)") {
        const std::vector<double> v{1.0, 1.4, 0.7, 1.2, 0.9, 1.1, 1.3, 0.8};
        const double sigma = 0.5;
        const double post_sigma = sigma / std::sqrt(8.0);
        const auto g = evaluate_posterior(ModelExpression::parse("p"), constant_obs(v, std::vector<double>(8, sigma)),
                                          ParameterSpace({{"p", 1.05 - 6 * post_sigma, 1.05 + 6 * post_sigma, 201}}));
        CHECK(std::abs(moments(g).std.at("p") / post_sigma - 1.0) < 0.05);
    }
}

TEST_CASE("weighted_mean") {
    const std::vector<double> v{1.0, 2.0, 6.0}, same{2.0, 2.0, 2.0};
    CHECK(weighted_mean(v, same).mean == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(weighted_mean(v, same).sigma == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-15));
    const std::vector<double> v2{0.0, 1.0}, s2{1.0, 1e6};
    CHECK(std::abs(weighted_mean(v2, s2).mean) < 1e-11);

    const std::vector<double> v3{1.0, 3.0}, s3{1.0, 2.0};
    const auto wm = weighted_mean(v3, s3);
    CHECK(wm.mean == doctest::Approx(1.4).epsilon(1e-15));
    CHECK(wm.sigma == doctest::Approx(1.0 / std::sqrt(1.25)).epsilon(1e-15));
    const double h = 12 * wm.sigma / 201;
    const auto g = evaluate_posterior(ModelExpression::parse("p"), constant_obs(v3, s3),
                                      ParameterSpace({{"p", 1.4 - 6 * wm.sigma, 1.4 + 6 * wm.sigma, 201}}));
    CHECK(std::abs(moments(g).mean.at("p") - 1.4) < 2 * h);

    CHECK_THROWS_AS(weighted_mean(std::vector<double>{}, std::vector<double>{}), Error);
    CHECK_THROWS_AS(weighted_mean(std::vector<double>{1.0}, std::vector<double>{0.0}), Error);
}

TEST_CASE("chi_squared") {
    const auto expr = ModelExpression::parse("p");
    CHECK(chi_squared(expr, constant_obs({3.0, 3.0}, {1.0, 2.0}), {{"p", 3.0}}) == 0.0);
    CHECK(chi_squared(expr, constant_obs({3.0}, {0.5}), {{"p", 4.0}}) == 4.0);
    CHECK_THROWS_AS(chi_squared(expr, constant_obs({3.0}, {0.5}), {}), Error);
}

TEST_CASE("node ranking by chi_squared reverses ranking by log density") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 0.2);
    std::vector<double> t, v;
    for (int i = 0; i < 6; ++i) t.push_back(i), v.push_back(0.5 + 1.5 * i + noise(rng));
    const auto obs = line_obs(t, v, 0.2);
    const auto expr = ModelExpression::parse("p + q*t");
    const auto g = evaluate_posterior(expr, obs, ParameterSpace({{"p", -1.0, 2.0, 17}, {"q", 1.0, 2.0, 13}}));
    std::vector<double> chi(g.size()), ld(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        chi[n] = chi_squared(expr, obs, g.node_point(n));
        ld[n] = g.log_density(n);
    }
    for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = 0; b < g.size(); ++b)
            if (chi[a] < chi[b]) CHECK(ld[a] >= ld[b]);
    const auto best = std::min_element(chi.begin(), chi.end()) - chi.begin();
    CHECK(static_cast<std::size_t>(best) == g.map_node());
}

TEST_CASE("proportionality: density ratios follow log Omega") {
    const auto obs = line_obs({0, 1, 2}, {0.2, 1.1, 1.9}, 0.5);
    const auto g = evaluate_posterior(ModelExpression::parse("p + q*t"), obs,
                                      ParameterSpace({{"p", -1.0, 1.0, 9}, {"q", 0.0, 2.0, 9}}));
    for (std::size_t a = 0; a < g.size(); a += 7)
        for (std::size_t b = 0; b < g.size(); b += 5)
            CHECK(g.density(a) / g.density(b) ==
                  doctest::Approx(std::exp(g.log_density(a) - g.log_density(b))).epsilon(1e-12));
}

TEST_CASE("linear model round trip against least squares") {
    std::vector<double> t, v;
    for (int i = 0; i <= 10; ++i) t.push_back(i * 0.5), v.push_back(1.5 - 0.7 * i * 0.5);
    const std::vector<double> sig(t.size(), 0.05);
    const auto obs = line_obs(t, v, 0.05);
    const auto [a, b] = oracle::line_fit(t, v, sig);
    const ParameterSpace space({{"p", 0.0, 3.0, 151}, {"q", -1.5, 0.0, 151}});
    const auto g = evaluate_posterior(ModelExpression::parse("p + q*t"), obs, space);
    const auto map = map_estimate(g);
    CHECK(std::abs(map.at("p") - a) <= space.spacing(0));
    CHECK(std::abs(map.at("q") - b) <= space.spacing(1));

    const auto expr = ModelExpression::parse("p + q*t");
    const auto [x, y] = oracle::coarse_to_fine_min(
        [&](double p, double q) { return chi_squared(expr, obs, {{"p", p}, {"q", q}}); }, 0.0, 3.0, -1.5, 0.0);
    CHECK(std::abs(map.at("p") - x) <= space.spacing(0));
    CHECK(std::abs(map.at("q") - y) <= space.spacing(1));
}

TEST_CASE("evaluate_posterior errors") {
    const auto obs = constant_obs({1.0}, {1.0});
    CHECK_THROWS_AS(evaluate_posterior(ModelExpression::parse("p"), obs, ParameterSpace({{"q", 0.0, 1.0, 3}})), Error);
    CHECK_THROWS_AS(evaluate_posterior(ModelExpression::parse("p + t"), obs, ParameterSpace({{"p", 0.0, 1.0, 3}})),
                    Error);
    try {
        evaluate_posterior(ModelExpression::parse("log(p)"), obs, ParameterSpace({{"p", -1.0, 1.0, 4}}));
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DomainError);
        CHECK(e.index() == std::optional<std::size_t>(0));
        CHECK(std::string(e.what()).find("p=-0.75") != std::string::npos);
    }
}

TEST_CASE("grid CSV dump") {
    const auto g = evaluate_posterior(ModelExpression::parse("p + q"), constant_obs({1.0}, {1.0}),
                                      ParameterSpace({{"p", 0.0, 1.0, 2}, {"q", 0.0, 1.0, 3}}));
    std::ostringstream out;
    write_grid_csv(g, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "p,q,log_density,density");
    int rows = 0;
    while (std::getline(in, line)) {
        std::vector<double> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(std::stod(cell));
        REQUIRE(f.size() == 4);
        CHECK(f[0] == g.node_point(rows).at("p"));
        CHECK(f[1] == g.node_point(rows).at("q"));
        CHECK(f[2] == g.log_density(rows));
        CHECK(f[3] == g.density(rows));
        ++rows;
    }
    CHECK(rows == 6);
}

TEST_CASE("summary JSON fields") {
    const auto g = evaluate_posterior(ModelExpression::parse("p"), constant_obs({1.0}, {1.0}),
                                      ParameterSpace({{"p", -5.0, 5.0, 101}}));
    const auto j = moments(g).to_json();
    for (const char* key : {"map", "mean", "std", "log_lambda"}) CHECK(j.contains(key));
    CHECK(std::abs(j["map"]["p"].get<double>() - 1.0) <= 0.5 * g.space().spacing(0));
}
