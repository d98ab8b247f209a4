#include <doctest.h>

#include <cmath>
#include <random>

#include "cylpack/analysis.hpp"
#include "detail/lattice.hpp"

using namespace cylpack;
using doctest::Approx;

namespace
{
Column grow(double d, double dphi, std::optional<double> dz = std::nullopt, double length = 20)
{
    DepositionConfig cfg;
    cfg.target_length = length;
    auto col = run_deposition(DiameterRatio(d), {dphi, dz, 1}, cfg);
    REQUIRE(col);
    return *col;
}

//! Coordination of sites well away from both ends.
std::vector<std::size_t> interior_coordination(Column const& col, ContactGraph const& g)
{
    double top = -1e300;
    for (auto const& s : col.sites)
        top = std::max(top, s.axial);
    std::vector<std::size_t> out;
    for (std::size_t i = col.template_len + 10; i < col.sites.size(); ++i)
        if (col.sites[i].axial < top - 2)
            out.push_back(g.coordination(i));
    return out;
}
}  // namespace

TEST_CASE("contact graph")
{
    auto zz = grow(1.8, kPi);
    auto g = contact_graph(zz);
    for (auto c : interior_coordination(zz, g))
        CHECK(c == 2);

    auto dbl = grow(2.0, kPi);
    g = contact_graph(dbl);
    for (auto c : interior_coordination(dbl, g))
        CHECK(c == 5);
    for (std::size_t i = 0; i < g.adjacency.size(); ++i)
        for (auto j : g.adjacency[i])
            CHECK(std::binary_search(g.adjacency[j].begin(), g.adjacency[j].end(), i));

    Column one;
    one.sites = {{0, 0, 0}};
    g = contact_graph(one);
    CHECK(g.adjacency.size() == 1);
    CHECK(g.adjacency[0].empty());
}

TEST_CASE("coordination never exceeds six")
{
    struct Seed
    {
        double d, dphi;
        std::optional<double> dz;
    };
    for (auto [d, dphi, dz] : {Seed{2.155, 1.047198885206, {}}, Seed{2.2247448714, kPi, 0.0},
                               Seed{2.6, 1.2, {}}})
    {
        auto col = grow(d, dphi, dz);
        auto g = contact_graph(col);
        CHECK(g.histogram.size() <= 7);
    }
}

TEST_CASE("period of the uniform helix")
{
    double const a = 2.572902786440033, dz = 0.4312031081087284;
    auto col = grow(1.94, a);
    auto p = detect_periodicity(col, contact_graph(col));
    REQUIRE(p);
    CHECK(p->sites_per_period == 1);
    CHECK(p->dz_p == Approx(dz).epsilon(1e-9));
    CHECK(std::abs(wrap_angle(p->dphi_p - a)) < 1e-6);
    CHECK(p->residual < 1e-6);
}

TEST_CASE("random points have no period")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    Column col;
    col.ratio = DiameterRatio(2.3);
    col.template_len = 2;
    double z = 0;
    for (std::size_t i = 0; i < 200; ++i)
    {
        z += 0.2 + 0.3 * u(rng);
        col.sites.push_back({i, kTwoPi * u(rng), z});
    }
    CHECK_FALSE(detect_periodicity(col, contact_graph(col)).has_value());
    CHECK(classify_structure(col, contact_graph(col), std::nullopt).kind
          == StructureKind::unclassified);
}

TEST_CASE("too short for a period")
{
    auto col = grow(1.8, kPi, std::nullopt, 10);
    col.sites.resize(col.template_len + 15);
    CHECK_FALSE(detect_periodicity(col, contact_graph(col)).has_value());
}

TEST_CASE("screw map applied twice")
{
    auto col = grow(2.1, 0.612884706427, std::nullopt, 30);
    auto p = detect_periodicity(col, contact_graph(col));
    REQUIRE(p);
    double top = -1e300;
    for (auto const& s : col.sites)
        top = std::max(top, s.axial);
    detail::SiteIndex index(col.sites);
    std::size_t checked = 0;
    for (std::size_t i = p->transient_len; i < col.sites.size(); ++i)
    {
        auto const& s = col.sites[i];
        if (s.axial + 2 * p->dz_p > top - 1)
            continue;
        CHECK(index.find(s.angle + 2 * p->dphi_p, s.axial + 2 * p->dz_p, kPeriodTol));
        ++checked;
    }
    CHECK(checked > 10);
}

TEST_CASE("transient before the periodic tail")
{
    auto col = grow(2.35, 1.722877425431, 0.32989);
    auto p = detect_periodicity(col, contact_graph(col));
    REQUIRE(p);
    CHECK(p->transient_len > 0);
    CHECK(p->residual < 1e-6);
}

TEST_CASE("structure labels")
{
    struct Case
    {
        double d;
        double dphi;
        std::optional<double> dz;
        StructureLabel expect;
    };
    using K = StructureKind;
    Case const cases[] = {
        {1.5, kPi, {}, {K::zigzag}},
        {1.8, kPi, {}, {K::zigzag}},
        {1.94, 2.572902786440033, {}, {K::single_helix}},
        {1.992, 2.132481077026, {}, {K::double_helix}},
        {2.0, kPi, {}, {K::doublets, Phyllotaxis{2, 2, 0}}},
        {2.04, 1.396475953795, {}, {K::symmetric, Phyllotaxis{3, 2, 1}}},
        {2.1, 0.612884706427, {}, {K::line_slip, Phyllotaxis{3, 2, 1}, Phyllotaxis{3, 3, 0}, 2, 2}},
        {2.148, 3.011746827290, 0.69809,
         {K::line_slip, Phyllotaxis{3, 2, 1}, Phyllotaxis{3, 3, 0}, 3, 3}},
        {2.155, 1.047198885206, {}, {K::symmetric, Phyllotaxis{3, 3, 0}}},
    };
    for (auto const& c : cases)
    {
        CAPTURE(c.d);
        auto a = analyze(grow(c.d, c.dphi, c.dz));
        CHECK(describe(a.label) == describe(c.expect));
        CHECK(a.label == c.expect);
        if (a.label.kind == K::symmetric)
        {
            REQUIRE(a.period);
            CHECK(a.period->v_norm < 1e-6);
            CHECK(a.label.indices->l == a.label.indices->m + a.label.indices->n);
        }
    }
    Column flat;
    flat.ratio = DiameterRatio(1.0);
    flat.sites = {{0, 0, 0}, {1, 0, 1}};
    CHECK(classify_structure(flat, contact_graph(flat), std::nullopt).kind == K::single_file);
}

TEST_CASE("symmetric structures")
{
    // Offline oracle: three unit contacts b1, b2, b1 - b2 with V = n b1 + m b2.
    struct Ref
    {
        Phyllotaxis lmn;
        double d;
    };
    Ref const refs[] = {{{3, 2, 1}, 2.0392304845413265},
                        {{3, 3, 0}, 2.1547005383792515},
                        {{4, 2, 2}, 2.224744871391589},
                        {{4, 3, 1}, 2.290524002164129},
                        {{4, 4, 0}, 2.4142135623730954}};
    auto const& table = detail::symmetric_table();
    for (auto const& r : refs)
    {
        auto it = std::find_if(table.begin(), table.end(),
                               [&](auto const& e) { return e.lmn == r.lmn; });
        REQUIRE(it != table.end());
        CHECK(it->d == Approx(r.d).epsilon(1e-12));
    }
    for (std::size_t i = 1; i < table.size(); ++i)
        CHECK(table[i].d > table[i - 1].d);
    CHECK(table.front().lmn == Phyllotaxis{2, 2, 0});
    CHECK(table.front().d == Approx(2.0));
    CHECK(table.back().d == Approx(kMaxDiameterRatio));
    // rings follow (D - 1) sin(pi / m) = 1
    CHECK(*detail::symmetric_diameter(4, 0) == Approx(1 + std::sqrt(2.0)));
    CHECK_FALSE(detail::symmetric_diameter(1, 2));
}

TEST_CASE("line-slip lookup")
{
    CHECK(detail::line_slip_type({3, 2, 1}, {3, 3, 0}, 2) == 2);
    CHECK(detail::line_slip_type({3, 2, 1}, {3, 3, 0}, 3) == 3);
    CHECK(detail::line_slip_type({4, 3, 1}, {4, 4, 0}, 3) == 0);
}

TEST_CASE("label names")
{
    for (auto k : {StructureKind::single_file, StructureKind::zigzag, StructureKind::single_helix,
                   StructureKind::double_helix, StructureKind::doublets, StructureKind::symmetric,
                   StructureKind::line_slip, StructureKind::unclassified})
        CHECK(parse_structure_kind(to_string(k)) == k);
    CHECK_THROWS_AS(parse_structure_kind("spiral"), ParameterError);
    StructureLabel s{StructureKind::symmetric, Phyllotaxis{3, 2, 1}};
    CHECK(describe(s) == "symmetric 321");
    StructureLabel ls{StructureKind::line_slip, Phyllotaxis{3, 2, 1}, Phyllotaxis{3, 3, 0}, 2, 2};
    CHECK(describe(ls) == "line-slip type 2 (321|330)");
}

TEST_CASE("phyllotactic points")
{
    Column col;
    col.ratio = DiameterRatio(2);
    col.sites = {{0, kTwoPi, 0}, {1, kPi, 0.5}};
    auto pts = phyllotactic_points(col);
    CHECK(pts[0].s == Approx(0).scale(1));
    CHECK(pts[1].s == Approx(kPi / 2));

    auto zz = grow(1.8, kPi);
    pts = phyllotactic_points(zz);
    double const period = circumference(zz.ratio);
    for (auto const& p : pts)
    {
        CHECK(p.s >= 0);
        CHECK(p.s < period);
        bool on_column = std::abs(p.s) < 1e-9 || std::abs(p.s - 0.4 * kPi) < 1e-9;
        CHECK(on_column);
    }

    // rotating the column shifts s rigidly
    Column rot = zz;
    for (auto& s : rot.sites)
        s.angle += 0.77;
    auto shifted = phyllotactic_points(rot);
    double const shift = arc_length(zz.ratio, 0.77);
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        double diff = std::fmod(shifted[i].s - pts[i].s - shift + 3 * period, period);
        CHECK(std::min(diff, period - diff) < 1e-9);
    }
}

TEST_CASE("boundary curve")
{
    for (double d : {1.5, 2.0, 2.6})
    {
        auto c = boundary_curve(DiameterRatio(d), 40);
        CHECK(c.front() == c.back());
        for (auto [ds, dz] : c)
        {
            double lhs = 4 * dz * dz + 2 * (d - 1) * (d - 1) * (1 - std::cos(2 * ds / (d - 1)));
            CHECK(lhs == Approx(1).epsilon(1e-9));
        }
    }
    auto circle = detail::boundary_curve_unchecked(1e6, 64);
    for (auto [ds, dz] : circle)
        CHECK(std::abs(std::hypot(ds, dz) - 0.5) < 1e-9);
}
