#include "detail/lattice.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace cylpack::detail
{
//---------------------------------------------------------------------------//
SiteIndex::SiteIndex(std::span<SurfaceSite const> sites)
{
    entries_.reserve(sites.size());
    for (auto const& s : sites)
        entries_.push_back({s.axial, wrap_angle(s.angle), s.index});
    std::sort(entries_.begin(), entries_.end(),
              [](auto const& a, auto const& b) { return a.z < b.z; });
}

std::optional<std::size_t> SiteIndex::find(double phi, double z, double tol, double* err) const
{
    auto it = std::lower_bound(entries_.begin(), entries_.end(), z - tol,
                               [](auto const& e, double v) { return e.z < v; });
    for (; it != entries_.end() && it->z <= z + tol; ++it)
    {
        double dphi = std::abs(wrap_angle(it->phi - phi));
        if (dphi <= tol)
        {
            if (err)
                *err = std::max(dphi, std::abs(it->z - z));
            return it->index;
        }
    }
    return std::nullopt;
}

//---------------------------------------------------------------------------//
namespace
{
constexpr double kFamilyTol = 0.05;

double cross(Planar a, Planar b)
{
    return a.s * b.z - a.z * b.s;
}

//! Shift a.s by a multiple of c so it lies nearest to ref.
double align_s(double s, double ref, double c)
{
    return s - c * std::round((s - ref) / c);
}

Planar displacement(Column const& col, std::size_t i, std::size_t j)
{
    double const half_cs = col.ratio.chord_scale() / 2;
    auto const& a = col.sites[i];
    auto const& b = col.sites[j];
    return {half_cs * wrap_angle(b.angle - a.angle), b.axial - a.axial};
}

bool points_up(Planar v)
{
    return v.z > 1e-9 || (std::abs(v.z) <= 1e-9 && v.s > 0);
}
}  // namespace

bool same_displacement(Planar a, Planar b, double circumference, double tol)
{
    if (std::abs(a.z - b.z) > tol)
        return false;
    if (!(circumference > 0))
        return std::abs(a.s - b.s) <= tol;
    return std::abs(align_s(a.s, b.s, circumference) - b.s) <= tol;
}

double planar_distance(DiameterRatio d, Planar v)
{
    double const cs = d.chord_scale();
    if (!(cs > 0))
        return std::abs(v.z);
    double chord = cs * std::sin(v.s / cs);
    return std::hypot(v.z, chord);
}

//---------------------------------------------------------------------------//
TailView tail_view(Column const& col, HelicalPeriod const& p)
{
    TailView view;
    view.circumference = circumference(col.ratio);
    view.density = static_cast<double>(p.sites_per_period) / p.dz_p;

    double top = -std::numeric_limits<double>::infinity();
    double bottom = std::numeric_limits<double>::infinity();
    for (auto const& s : col.sites)
        top = std::max(top, s.axial);
    for (std::size_t i = p.transient_len; i < col.sites.size(); ++i)
        bottom = std::min(bottom, col.sites[i].axial);
    for (std::size_t i = p.transient_len; i < col.sites.size(); ++i)
    {
        double z = col.sites[i].axial;
        if (z >= bottom + 1 && z <= top - 1.5)
            view.interior.push_back(i);
    }
    return view;
}

std::vector<Family>
contact_families(Column const& col, ContactGraph const& graph, TailView const& view)
{
    struct Acc
    {
        Planar first;
        double s_sum{0};
        double z_sum{0};
        std::size_t n{0};
    };
    std::vector<Acc> acc;
    for (auto i : view.interior)
    {
        for (auto j : graph.adjacency[i])
        {
            Planar v = displacement(col, i, j);
            if (!points_up(v))
                continue;
            auto it = std::find_if(acc.begin(), acc.end(), [&](Acc const& a) {
                return same_displacement(v, a.first, view.circumference, kFamilyTol);
            });
            if (it == acc.end())
            {
                acc.push_back({v, 0, 0, 0});
                it = acc.end() - 1;
            }
            it->s_sum += view.circumference > 0
                             ? align_s(v.s, it->first.s, view.circumference)
                             : v.s;
            it->z_sum += v.z;
            ++it->n;
        }
    }

    std::vector<Family> out;
    auto const sites = static_cast<double>(std::max<std::size_t>(view.interior.size(), 1));
    for (auto const& a : acc)
    {
        Family f;
        f.mean = {a.s_sum / a.n, a.z_sum / a.n};
        f.contacts = a.n;
        f.coverage = a.n / sites;
        f.count = view.density * std::abs(f.mean.z);
        out.push_back(f);
    }
    std::stable_sort(out.begin(), out.end(), [](auto const& a, auto const& b) {
        return a.contacts > b.contacts;
    });
    return out;
}

//---------------------------------------------------------------------------//
std::optional<Planar> close_loop(Column const& col,
                                 ContactGraph const& graph,
                                 TailView const& view,
                                 Planar b1,
                                 int c1,
                                 Planar b2,
                                 int c2)
{
    if (view.interior.empty())
        return std::nullopt;
    // Start in the middle of the interior so the walk stays clear of the ends.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto i : view.interior)
    {
        lo = std::min(lo, col.sites[i].axial);
        hi = std::max(hi, col.sites[i].axial);
    }
    double const mid = (lo + hi) / 2;
    std::size_t const start = *std::min_element(
        view.interior.begin(), view.interior.end(), [&](auto a, auto b) {
            return std::abs(col.sites[a].axial - mid) < std::abs(col.sites[b].axial - mid);
        });

    std::size_t at = start;
    Planar sum;
    int left1 = c1, left2 = c2;
    while (left1 != 0 || left2 != 0)
    {
        // Take whichever step keeps the walk nearest its starting height.
        Planar step1{b1.s * (left1 > 0 ? 1 : -1), b1.z * (left1 > 0 ? 1 : -1)};
        Planar step2{b2.s * (left2 > 0 ? 1 : -1), b2.z * (left2 > 0 ? 1 : -1)};
        bool use1 = left1 != 0
                    && (left2 == 0 || std::abs(sum.z + step1.z) <= std::abs(sum.z + step2.z));
        Planar const want = use1 ? step1 : step2;

        std::optional<std::size_t> next;
        Planar got;
        for (auto j : graph.adjacency[at])
        {
            Planar v = displacement(col, at, j);
            if (same_displacement(v, want, view.circumference, kFamilyTol))
            {
                next = j;
                got = {align_s(v.s, want.s, view.circumference), v.z};
                break;
            }
        }
        if (!next)
            return std::nullopt;
        at = *next;
        sum.s += got.s;
        sum.z += got.z;
        if (use1)
            left1 += left1 > 0 ? -1 : 1;
        else
            left2 += left2 > 0 ? -1 : 1;
    }
    if (at != start || std::abs(sum.z) > kPeriodTol)
        return std::nullopt;
    return sum;
}

std::optional<std::pair<int, int>> lattice_coefficients(Planar b1, Planar b2, double circumference)
{
    double const det = cross(b1, b2);
    if (std::abs(det) < 1e-9)
        return std::nullopt;
    Planar const v{circumference, 0};
    double const c1 = cross(v, b2) / det;
    double const c2 = cross(b1, v) / det;
    if (std::abs(c1 - std::round(c1)) > kFamilyTol || std::abs(c2 - std::round(c2)) > kFamilyTol)
        return std::nullopt;
    return std::pair{static_cast<int>(std::lround(c1)), static_cast<int>(std::lround(c2))};
}

std::optional<Planar>
recover_period_vector(Column const& col, ContactGraph const& graph, HelicalPeriod const& p)
{
    auto const view = tail_view(col, p);
    auto const fams = contact_families(col, graph, view);
    for (std::size_t a = 0; a < fams.size(); ++a)
    {
        for (std::size_t b = a + 1; b < fams.size(); ++b)
        {
            auto c = lattice_coefficients(fams[a].mean, fams[b].mean, view.circumference);
            if (!c)
                continue;
            if (auto v = close_loop(col, graph, view, fams[a].mean, c->first, fams[b].mean, c->second))
                return v;
        }
    }
    return std::nullopt;
}

//---------------------------------------------------------------------------//
// SYMMETRIC STRUCTURES
//---------------------------------------------------------------------------//
std::optional<double> symmetric_diameter(int m, int n)
{
    if (m < 1 || n < 0 || n > m)
        return std::nullopt;
    if (n == 0)
    {
        // Rings of m touching spheres: (D - 1) sin(pi / m) = 1.
        if (m < 2)
            return std::nullopt;
        return 1 + 1 / std::sin(kPi / m);
    }

    // Three unit contacts b1, b2, b1 - b2 with V = n b1 + m b2 = (C, 0).
    // Unknowns x = (D, s1, z1); b2 follows from V.
    auto residual = [&](std::array<double, 3> const& x) {
        double const d = x[0];
        double const cs = d - 1;
        double const c = cs * kPi;
        Planar const b1{x[1], x[2]};
        Planar const b2{(c - n * b1.s) / m, -n * b1.z / m};
        auto dist = [&](Planar v) {
            return std::hypot(v.z, cs * std::sin(v.s / cs));
        };
        return std::array<double, 3>{dist(b1) - 1, dist(b2) - 1,
                                     dist({b1.s - b2.s, b1.z - b2.z}) - 1};
    };
    auto norm = [](std::array<double, 3> const& r) {
        return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
    };

    // Flat triangular lattice as the starting point.
    double const alpha = std::atan2(m * std::sqrt(3.0) / 2, n + 0.5 * m);
    double const flat = std::sqrt(double(n * n + m * m + n * m));
    std::array<double, 3> x{1 + flat / kPi, std::cos(alpha), std::sin(alpha)};
    auto r = residual(x);
    for (int it = 0; it < 200 && norm(r) > 1e-15; ++it)
    {
        double jac[3][3];
        for (int k = 0; k < 3; ++k)
        {
            double const h = 1e-7 * std::max(1.0, std::abs(x[k]));
            auto xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            auto rp = residual(xp), rm = residual(xm);
            for (int i = 0; i < 3; ++i)
                jac[i][k] = (rp[i] - rm[i]) / (2 * h);
        }
        // Cramer's rule for the 3x3 step.
        auto det3 = [](double const a[3][3]) {
            return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                   - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                   + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        };
        double const det = det3(jac);
        if (std::abs(det) < 1e-300)
            return std::nullopt;
        std::array<double, 3> dx;
        for (int k = 0; k < 3; ++k)
        {
            double a[3][3];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    a[i][j] = j == k ? -r[i] : jac[i][j];
            dx[k] = det3(a) / det;
        }
        double lambda = 1;
        bool moved = false;
        for (int half = 0; half < 40; ++half, lambda /= 2)
        {
            std::array<double, 3> trial{x[0] + lambda * dx[0], x[1] + lambda * dx[1],
                                        x[2] + lambda * dx[2]};
            if (!(trial[0] > 1))
                continue;
            auto rt = residual(trial);
            if (norm(rt) < norm(r))
            {
                x = trial;
                r = rt;
                moved = true;
                break;
            }
        }
        if (!moved)
            break;
    }
    if (!(norm(r) < 1e-12))
        return std::nullopt;
    return x[0];
}

std::vector<SymmetricEntry> const& symmetric_table()
{
    static std::vector<SymmetricEntry> const table = [] {
        std::vector<SymmetricEntry> out;
        for (int l = 2; l <= 10; ++l)
        {
            for (int n = 0; 2 * n <= l; ++n)
            {
                int const m = l - n;
                auto d = symmetric_diameter(m, n);
                if (d && *d >= 2 - 1e-12 && *d <= kMaxDiameterRatio)
                    out.push_back({{l, m, n}, *d});
            }
        }
        std::sort(out.begin(), out.end(), [](auto const& a, auto const& b) { return a.d < b.d; });
        return out;
    }();
    return table;
}

//---------------------------------------------------------------------------//
// LINE-SLIP TYPES
//---------------------------------------------------------------------------//
namespace
{
char const kLineSlipCsv[] =
#include "line_slip_types.inc"
    ;

struct SlipRow
{
    Phyllotaxis lower;
    Phyllotaxis upper;
    int parastichy;
    int type;
};

Phyllotaxis parse_lmn(std::string const& text)
{
    if (text.size() != 3)
        throw std::logic_error("line-slip table: bad lmn '" + text + "'");
    return {text[0] - '0', text[1] - '0', text[2] - '0'};
}

std::vector<SlipRow> const& slip_rows()
{
    static std::vector<SlipRow> const rows = [] {
        std::vector<SlipRow> out;
        std::istringstream in(kLineSlipCsv);
        std::string line;
        while (std::getline(in, line))
        {
            if (line.empty() || line[0] == '#')
                continue;
            std::istringstream fields(line);
            std::string lo, up, par, type;
            std::getline(fields, lo, ',');
            std::getline(fields, up, ',');
            std::getline(fields, par, ',');
            std::getline(fields, type, ',');
            out.push_back({parse_lmn(lo), parse_lmn(up), std::stoi(par), std::stoi(type)});
        }
        return out;
    }();
    return rows;
}
}  // namespace

int line_slip_type(Phyllotaxis lower, Phyllotaxis upper, int slip_parastichy)
{
    for (auto const& row : slip_rows())
    {
        if (row.lower == lower && row.upper == upper && row.parastichy == slip_parastichy)
            return row.type;
    }
    return 0;
}

}  // namespace cylpack::detail
