#include "doctest.h"
#include "fahs/real_data.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "fahs/errors.hpp"
#include "fahs/rng.hpp"
#include "oracles.hpp"

using namespace fahs;

namespace {

ExpressionMatrix toy_matrix() {
    // Two genes, four subjects split 2/2.
    ExpressionMatrix m;
    m.genes = 2;
    m.subjects = 4;
    m.group_split = 2;
    m.values = {1.0, 2.0, 4.0, 5.0,   // gene 1: clear shift
                3.0, 3.0, 3.0, 3.0};  // gene 2: constant
    return m;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& content)
        : path("/tmp/fahs_test_" + name) {
        std::ofstream f(path);
        f << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("pooled t on the toy matrix") {
    const TStatistics stats = t_statistics(toy_matrix());
    CHECK(stats.df == 2);

    // Hand computation: means 1.5 / 4.5, SS = 0.5 + 0.5, s^2 = (1/2+1/2)*1/2 = 0.5.
    const double expected_t = 3.0 / std::sqrt(0.5);
    CHECK(stats.t[0] == doctest::Approx(expected_t).epsilon(1e-12));

    // Constant gene forced to zero with a warning entry.
    CHECK(stats.t[1] == 0.0);
    REQUIRE(stats.constant_genes.size() == 1);
    CHECK(stats.constant_genes[0] == 1);
}

TEST_CASE("pooled t is permutation-equivariant within groups") {
    ExpressionMatrix m = toy_matrix();
    std::swap(m.values[0], m.values[1]);  // permute subjects inside group 1
    const TStatistics stats = t_statistics(m);
    CHECK(stats.t[0] == doctest::Approx(3.0 / std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("z transform basics") {
    CHECK(t_to_z(0.0, 100) == 0.0);
    CHECK_THROWS_AS(z_transform({1.0}, 0), domain_error);

    SUBCASE("agrees with the GSL oracle route") {
        for (double t : {-8.0, -2.0, -0.3, 0.7, 2.0, 6.0}) {
            const double via_oracle =
                t > 0.0 ? -oracle::normal_quantile(oracle::student_t_sf(t, 100))
                        : oracle::normal_quantile(oracle::student_t_cdf(t, 100));
            CHECK(t_to_z(t, 100) == doctest::Approx(via_oracle).epsilon(1e-8));
        }
    }
    SUBCASE("large df approaches the identity") {
        for (double t : {-2.0, -0.5, 1.0, 3.0}) {
            CHECK(t_to_z(t, 2000000) == doctest::Approx(t).epsilon(1e-3));
        }
    }
    SUBCASE("strictly monotone, so gene order is preserved") {
        double prev = -1e9;
        for (double t = -12.0; t <= 12.0; t += 0.25) {
            const double z = t_to_z(t, 100);
            CHECK(z > prev);
            prev = z;
        }
    }
    SUBCASE("extreme statistics stay finite and symmetric") {
        const double z_hi = t_to_z(25.0, 100);
        CHECK(std::isfinite(z_hi));
        CHECK(z_hi > 8.0);
        CHECK(t_to_z(-25.0, 100) == doctest::Approx(-z_hi));
    }
}

TEST_CASE("permuted-labels global null gives N(0,1) z-scores") {
    // Null matrix: every gene iid normal in both groups.
    Pcg32 rng(2024, 0);
    ExpressionMatrix m;
    m.genes = 3000;
    m.subjects = 40;
    m.group_split = 20;
    m.values.resize(m.genes * m.subjects);
    for (auto& v : m.values) v = 2.0 + 1.3 * normal_draw(rng);

    const TStatistics stats = t_statistics(m);
    const ObservationVector z = z_transform(stats.t, stats.df);

    // KS distance of Phi(z) against uniform below the 1% critical value.
    std::vector<double> u(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) u[j] = oracle::normal_cdf(z.values[j]);
    const double d = oracle::ks_statistic_uniform(u);
    const double critical_1pct = 1.628 / std::sqrt(static_cast<double>(z.size()));
    CHECK(d < critical_1pct);
}

TEST_CASE("rank_genes on a synthetic strong-signal vector") {
    // 30 signals in 600 hypotheses keep the BH-driven global scale around
    // 0.05, where the fixed-xi chain is stable.
    Pcg32 rng(9, 0);
    std::vector<double> zs(600);
    for (std::size_t j = 0; j < zs.size(); ++j) {
        zs[j] = normal_draw(rng);
        if (j < 30 && j > 2) zs[j] += (j % 2 == 0 ? 7.0 : -7.0);
    }
    zs[5] = 11.0;    // gene 6: strongest
    zs[17] = -10.5;  // gene 18
    zs[99] = 10.0;   // gene 100
    const ObservationVector z(zs);
    GibbsConfig config;
    config.burn_in = 300;
    config.samples = 1000;
    config.seed = 31;

    const GeneRanking ranking = rank_genes(
        z, {Procedure::bh, Procedure::qvalue, Procedure::mfahs}, 0.1, config);
    REQUIRE(ranking.per_procedure.size() == 3);
    for (const auto& pr : ranking.per_procedure) {
        REQUIRE(pr.entries.size() >= 3);
        // The three planted extremes dominate every ranking's top three.
        std::vector<std::size_t> top{pr.entries[0].gene, pr.entries[1].gene,
                                     pr.entries[2].gene};
        std::sort(top.begin(), top.end());
        CHECK(top == std::vector<std::size_t>{6, 18, 100});
        CHECK(pr.entries[0].gene == 6);  // |z| = 11 ranks first everywhere
    }

    SUBCASE("empty rejection set exits cleanly") {
        std::vector<double> nulls(500, 0.0);
        Pcg32 g(10, 0);
        for (auto& v : nulls) v = 0.3 * normal_draw(g);
        const GeneRanking empty =
            rank_genes(ObservationVector(nulls), {Procedure::bh}, 0.1, config);
        CHECK(empty.per_procedure[0].entries.empty());
    }
}

TEST_CASE("expression csv reader") {
    SUBCASE("plain matrix with group header") {
        const TempFile f("expr.csv",
                         "control,control,case,case\n"
                         "1,2,4,5\n"
                         "3,3,3,3\n");
        const ExpressionMatrix m = read_expression_csv(f.path);
        CHECK(m.genes == 2);
        CHECK(m.subjects == 4);
        CHECK(m.group_split == 2);
        CHECK(m.at(0, 2) == 4.0);
    }
    SUBCASE("matrix with row names") {
        const TempFile f("expr_names.csv",
                         "gene,control,control,case,case\n"
                         "g1,1,2,4,5\n"
                         "g2,3,3,3,3\n");
        const ExpressionMatrix m = read_expression_csv(f.path);
        CHECK(m.genes == 2);
        CHECK(m.group_split == 2);
    }
    SUBCASE("malformed cell reports its line") {
        const TempFile f("expr_bad.csv",
                         "control,control,case,case\n"
                         "1,2,4,5\n"
                         "3,oops,3,3\n");
        try {
            read_expression_csv(f.path);
            FAIL("expected io_error");
        } catch (const io_error& e) {
            CHECK(e.line == 3);
        }
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_expression_csv("/nonexistent/x.csv"), io_error);
    }
}

TEST_CASE("zscore csv reader") {
    const TempFile f("z.csv", "z\n0.5\n-1.25\n3\n");
    const ObservationVector z = read_zscore_csv(f.path);
    REQUIRE(z.size() == 3);
    CHECK(z.values[1] == -1.25);

    const TempFile bad("z_bad.csv", "0.5\nxyz\n");
    try {
        read_zscore_csv(bad.path);
        FAIL("expected io_error");
    } catch (const io_error& e) {
        CHECK(e.line == 2);
    }
}
