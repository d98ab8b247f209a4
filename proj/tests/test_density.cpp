#include <doctest.h>

#include <cmath>

#include "cylpack/density.hpp"

using namespace cylpack;
using doctest::Approx;

namespace
{
double zigzag_vf(double d)
{
    return 2 / (3 * d * d) / std::sqrt(1 - (d - 1) * (d - 1));
}

SweepGrid small_grid()
{
    SweepGrid g;
    g.dphi_steps = 33;
    g.dz_steps = 6;
    g.contact_oversample = 2;
    g.refine_rounds = 2;
    g.refine_span = 3;
    return g;
}
}  // namespace

TEST_CASE("volume fraction")
{
    CHECK(volume_fraction(DiameterRatio(1), 1) == Approx(2.0 / 3).epsilon(1e-15));
    CHECK(volume_fraction(DiameterRatio(2), 2 * std::sqrt(2.0)) == Approx(std::sqrt(2.0) / 3));
    CHECK_THROWS_AS(volume_fraction(DiameterRatio(2), 0), ParameterError);
}

TEST_CASE("density of simple columns")
{
    auto stack = run_deposition(DiameterRatio(1), {0, std::nullopt, 1}, {});
    auto e = fit_number_density(*stack);
    CHECK(e.slope == Approx(1).epsilon(1e-12));
    CHECK(std::abs(e.vf - 2.0 / 3) < 1e-12);

    auto zz = run_deposition(DiameterRatio(1.8), {kPi, std::nullopt, 1}, {});
    e = fit_number_density(*zz);
    CHECK(e.slope == Approx(1 / 0.6).epsilon(1e-12));
    CHECK(e.vf == Approx(0.34294).epsilon(1e-5));

    auto dbl = run_deposition(DiameterRatio(2), {kPi, std::nullopt, 1}, {});
    e = fit_number_density(*dbl);
    CHECK(e.slope == Approx(2 * std::sqrt(2.0)).epsilon(1e-9));
    CHECK(std::abs(e.vf * 3 * 4 / 2 - e.slope) < 1e-12);
    CHECK(e.vf < kBulkPackingFraction);
}

TEST_CASE("fit needs enough sites")
{
    auto col = run_deposition(DiameterRatio(1), {0, std::nullopt, 1}, {});
    col->sites.resize(8);
    CHECK_THROWS_AS(fit_number_density(*col), InsufficientData);
}

TEST_CASE("grid validation")
{
    SweepGrid g;
    CHECK_NOTHROW(g.validate());
    g.dphi_steps = 1;
    CHECK_THROWS_AS(g.validate(), ParameterError);
    g = {};
    g.contact_oversample = 0;
    CHECK_THROWS_AS(g.validate(), ParameterError);
}

TEST_CASE("diameter samples")
{
    CHECK(diameter_samples(2.0, 2.0, 0.01).empty());
    auto s = diameter_samples(1.75, kMaxDiameterRatio, 0.001);
    CHECK(s.size() == 953);
    CHECK(s.front() == 1.75);
    CHECK(s.back() == kMaxDiameterRatio);
    CHECK(diameter_samples(1.75, kMaxDiameterRatio, 0.005).size() == 192);
    CHECK_THROWS_AS(diameter_samples(2.0, 1.9, 0.01), ParameterError);
    CHECK_THROWS_AS(diameter_samples(1.0, 1.1, 0), ParameterError);
    CHECK_THROWS_AS(diameter_samples(0.9, 1.1, 0.01), ParameterError);
}

TEST_CASE("invalid templates are skipped")
{
    CHECK_FALSE(evaluate_template(DiameterRatio(2.4), {0, std::nullopt, 1}, {}).has_value());
    auto ok = evaluate_template(DiameterRatio(1.8), {kPi, std::nullopt, 1}, {});
    REQUIRE(ok);
    CHECK(ok->periodic);
}

TEST_CASE("template sweep finds the zigzag")
{
    for (double d : {1.2, 1.5})
    {
        auto rec = sweep_templates(DiameterRatio(d), small_grid(), {});
        CHECK(std::abs(rec.vf_max - zigzag_vf(d)) < 1e-6);
        CHECK(rec.label.kind == StructureKind::zigzag);
        for (std::size_t i = 1; i < rec.round_best.size(); ++i)
            CHECK(rec.round_best[i] >= rec.round_best[i - 1]);
        REQUIRE(rec.column);
        CHECK(rec.evaluated > 0);
    }
}

TEST_CASE("diameter sweep near single file")
{
    int finished = 0;
    std::vector<double> seen;
    auto recs = sweep_diameter(
        1.0, 1.1, 0.01, small_grid(), {}, [&](SweepRecord&) { ++finished; },
        [&](SweepRecord& r) { seen.push_back(r.ratio); }, [](double d) { return d == 1.05; });
    CHECK(recs.size() == 10);
    CHECK(finished == 10);
    CHECK(seen.size() == 10);
    double prev = 1;
    for (auto const& r : recs)
    {
        CAPTURE(r.ratio);
        REQUIRE_FALSE(r.failure);
        CHECK(r.vf_max < prev + 1e-15);
        prev = r.vf_max;
        CHECK(std::abs(r.vf_max - zigzag_vf(r.ratio)) < 1e-6);
        if (r.ratio > 1)
            CHECK(r.label.kind == StructureKind::zigzag);
        else
            CHECK(r.label.kind == StructureKind::single_file);
    }
    CHECK(recs.front().vf_max == Approx(2.0 / 3).epsilon(1e-12));
}
