#include "cylpack/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cylpack/kernels.hpp"
#include "detail/lattice.hpp"

namespace cylpack
{
//---------------------------------------------------------------------------//
// CONTACT GRAPH
//---------------------------------------------------------------------------//
ContactGraph contact_graph(Column const& col, double tol)
{
    auto const n = col.sites.size();
    ContactGraph g;
    g.tol = tol;
    g.adjacency.resize(n);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return col.sites[a].axial < col.sites[b].axial;
    });
    std::vector<double> c(n), s(n), z(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        auto const& site = col.sites[order[k]];
        c[k] = std::cos(site.angle);
        s[k] = std::sin(site.angle);
        z[k] = site.axial;
    }

    double const cs = col.ratio.chord_scale();
    double const kk = cs * cs / 2;
    double const lo = (1 - tol) * (1 - tol);
    double const hi = (1 + tol) * (1 + tol);
    std::vector<double> d2;
    for (std::size_t a = 0; a < n; ++a)
    {
        // Everything within one diameter above a in sorted order.
        std::size_t end = a + 1;
        while (end < n && z[end] - z[a] <= 1 + tol)
            ++end;
        std::size_t const count = end - a - 1;
        if (count == 0)
            continue;
        d2.resize(count);
        kernels::SiteBlock block{{c.data() + a + 1, count},
                                 {s.data() + a + 1, count},
                                 {z.data() + a + 1, count}};
        kernels::distance_sq(kk, c[a], s[a], z[a], block, d2);
        for (std::size_t k = 0; k < count; ++k)
        {
            if (d2[k] >= lo && d2[k] <= hi)
            {
                auto i = order[a], j = order[a + 1 + k];
                g.adjacency[i].push_back(j);
                g.adjacency[j].push_back(i);
            }
        }
    }
    for (auto& adj : g.adjacency)
    {
        std::sort(adj.begin(), adj.end());
        if (adj.size() >= g.histogram.size())
            g.histogram.resize(adj.size() + 1);
        ++g.histogram[adj.size()];
    }
    return g;
}

//---------------------------------------------------------------------------//
// PERIODICITY
//---------------------------------------------------------------------------//

namespace
{
//! Growth front: images above this may simply not have been deposited yet.
double growth_front(Column const& col)
{
    double top = -std::numeric_limits<double>::infinity();
    for (auto const& s : col.sites)
        top = std::max(top, s.axial);
    return top - 1;
}

struct Verdict
{
    bool ok{false};
    double residual{0};
    std::size_t checked{0};
};

//! Does (dphi, dz) carry sites[from..] onto the column?
Verdict verify(Column const& col,
               detail::SiteIndex const& index,
               std::size_t from,
               double dphi,
               double dz,
               double front)
{
    Verdict v;
    for (std::size_t i = from; i < col.sites.size(); ++i)
    {
        auto const& s = col.sites[i];
        if (s.axial + dz > front)
            continue;
        double err = 0;
        if (!index.find(s.angle + dphi, s.axial + dz, kPeriodTol, &err))
            return v;
        v.residual = std::max(v.residual, err);
        ++v.checked;
    }
    v.ok = true;
    return v;
}
}  // namespace

std::optional<HelicalPeriod> detect_periodicity(Column const& col, ContactGraph const& graph)
{
    auto const n = col.sites.size();
    if (n < col.template_len + 20)
        return std::nullopt;

    detail::SiteIndex const index(col.sites);
    double const front = growth_front(col);
    std::size_t const half = col.template_len + (n - col.template_len) / 2;
    auto const& ref = col.sites[half];

    std::vector<std::pair<double, double>> cands;
    for (std::size_t j = half; j < n; ++j)
    {
        double dz = col.sites[j].axial - ref.axial;
        // Leave room to check at least one more period above.
        if (dz > kPeriodTol && ref.axial + 2 * dz <= front)
            cands.emplace_back(dz, wrap_angle(col.sites[j].angle - ref.angle));
    }
    std::sort(cands.begin(), cands.end());

    for (auto const& [dz, dphi] : cands)
    {
        auto v = verify(col, index, half, dphi, dz, front);
        if (!v.ok || v.checked < 2)
            continue;

        HelicalPeriod p;
        p.dphi_p = dphi;
        p.dz_p = dz;

        // Walk down from the trailing half to find where the map stops holding.
        std::size_t first = half;
        while (first > 0)
        {
            auto const& s = col.sites[first - 1];
            if (s.axial + dz <= front
                && !index.find(s.angle + dphi, s.axial + dz, kPeriodTol))
                break;
            --first;
        }
        p.transient_len = first;
        auto tail = verify(col, index, first, dphi, dz, front);
        p.residual = tail.residual;

        double const z0 = ref.axial - 1e-7;
        for (std::size_t i = first; i < n; ++i)
        {
            double z = col.sites[i].axial;
            if (z >= z0 && z < z0 + dz)
                ++p.sites_per_period;
        }
        ContactGraph loose;
        auto const& shell = detail::lattice_shell(col, graph, loose);
        auto vec = detail::recover_period_vector(col, shell, p);
        p.v_norm = vec ? std::abs(std::hypot(vec->s, vec->z) - circumference(col.ratio))
                     : std::numeric_limits<double>::infinity();
        return p;
    }
    return std::nullopt;
}

//---------------------------------------------------------------------------//
// PHYLLOTACTIC DIAGRAM
//---------------------------------------------------------------------------//
std::vector<PhyllotacticPoint> phyllotactic_points(Column const& col)
{
    double const period = circumference(col.ratio);
    std::vector<PhyllotacticPoint> out;
    out.reserve(col.sites.size());
    for (auto const& site : col.sites)
    {
        double s = arc_length(col.ratio, wrap_positive(site.angle));
        if (period > 0)
        {
            s = std::fmod(s, period);
            if (s < 0)
                s += period;
            if (s >= period)
                s = 0;
        }
        else
        {
            s = 0;
        }
        out.push_back({s, site.axial, site.index});
    }
    return out;
}

namespace detail
{
ContactGraph const& lattice_shell(Column const& col, ContactGraph const& graph, ContactGraph& storage)
{
    if (graph.tol >= kLatticeTol)
        return graph;
    storage = contact_graph(col, kLatticeTol);
    return storage;
}

std::vector<std::pair<double, double>> boundary_curve_unchecked(double d, int samples)
{
    samples = std::max(samples, 4);
    double const cs = d - 1;
    std::vector<std::pair<double, double>> out;
    out.reserve(2 * samples + 1);
    if (!(cs > 0))
    {
        out = {{0.0, 0.5}, {0.0, -0.5}, {0.0, 0.5}};
        return out;
    }
    // dz^2 + (cs sin(ds / cs))^2 = 1/4
    double const reach = cs > 0.5 ? cs * std::asin(0.5 / cs) : cs * kPi / 2;
    auto dz_at = [&](double ds) {
        double chord = cs * std::sin(ds / cs);
        return std::sqrt(std::max(0.0, 0.25 - chord * chord));
    };
    for (int i = 0; i < samples; ++i)
    {
        double ds = reach * std::cos(kPi * i / samples);
        out.emplace_back(ds, dz_at(ds));
    }
    for (int i = 0; i < samples; ++i)
    {
        double ds = -reach * std::cos(kPi * i / samples);
        out.emplace_back(ds, -dz_at(ds));
    }
    out.push_back(out.front());
    return out;
}
}  // namespace detail

std::vector<std::pair<double, double>> boundary_curve(DiameterRatio d, int samples)
{
    return detail::boundary_curve_unchecked(d.value(), samples);
}

}  // namespace cylpack
