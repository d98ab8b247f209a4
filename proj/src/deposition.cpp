#include "cylpack/deposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cylpack/kernels.hpp"
#include "detail/surface.hpp"

namespace cylpack
{
//---------------------------------------------------------------------------//
void DepositionConfig::validate() const
{
    auto fail = [](char const* what) { throw ParameterError(what); };
    if (!(target_length >= 10))
        fail("target_length must be >= 10 sphere diameters");
    if (scan_grid < 256)
        fail("scan_grid must be >= 256");
    if (group_size < 1 || group_size > 4)
        fail("group_size must be in {1, 2, 3, 4}");
    if (!(contact_tol > 0) || !(degeneracy_tol >= 0))
        fail("tolerances must be positive");
    if (max_template_sites < 1)
        fail("max_template_sites must be positive");
}

double Column::post_template_extent() const
{
    auto post = post_template();
    if (post.empty())
        return 0;
    auto [lo, hi] = std::minmax_element(
        post.begin(), post.end(), [](auto const& a, auto const& b) {
            return a.axial < b.axial;
        });
    return hi->axial - lo->axial;
}

//---------------------------------------------------------------------------//
bool covers_circle(std::span<double const> angles, double window)
{
    if (angles.empty())
        return false;
    if (window >= kPi - 1e-15)
        return true;
    constexpr double eps = 1e-12;

    std::vector<std::pair<double, double>> arcs;
    arcs.reserve(angles.size());
    for (double a : angles)
    {
        double start = wrap_positive(a - window);
        arcs.emplace_back(start, start + 2 * window);
    }
    std::sort(arcs.begin(), arcs.end());

    double const origin = arcs.front().first;
    double reach = origin;
    for (auto const& [start, end] : arcs)
    {
        if (start > reach + eps)
            return false;
        reach = std::max(reach, end);
    }
    return reach >= origin + kTwoPi - eps;
}

namespace
{
using detail::Branch;
using detail::Surface;

void validate_params(DiameterRatio d, TemplateParams const& p)
{
    if (!(p.dphi21 >= 0 && p.dphi21 <= kPi))
        throw ParameterError("dphi21 must lie in [0, pi]");
    if (p.direction != 1 && p.direction != -1)
        throw ParameterError("direction must be +1 or -1");
    bool const touching = contact_offset(d, p.dphi21).has_value();
    if (touching && p.dz21)
        throw ParameterError(
            "dz21 given but sphere 2 can touch sphere 1 at this dphi21; "
            "its offset follows from the contact equation");
    if (!touching && !p.dz21)
        throw ParameterError(
            "dz21 required: no contact is possible at this dphi21");
    if (p.dz21 && !(*p.dz21 >= 0 && *p.dz21 <= 1))
        throw ParameterError("dz21 must lie in [0, 1]");
}

//---------------------------------------------------------------------------//
/*!
 * Growth state in the scan frame psi = direction * phi, so that every run
 * scans towards increasing psi and mirrored runs are bit-identical mirrors.
 */
class Grower
{
  public:
    Grower(DiameterRatio d, int direction)
        : surface_(d.value()), direction_(direction)
    {
    }

    static Grower from_column(Column const& col)
    {
        Grower g(col.ratio, col.direction);
        for (auto const& s : col.sites)
            g.add(col.direction * s.angle, s.axial);
        return g;
    }

    Surface const& surface() const { return surface_; }
    std::span<Branch const> active() const { return active_; }
    double last_psi() const { return psi_.back(); }
    std::size_t size() const { return psi_.size(); }

    void add(double psi, double z)
    {
        psi_.push_back(psi);
        z_.push_back(z);
        active_.push_back({wrap_angle(psi), z});
        refresh_active();
    }

    //! Next greedy position in the scan frame: (unwrapped psi, z).
    std::pair<double, double> lowest(DepositionConfig const& cfg,
                                     DepositionStats* stats) const
    {
        double const prev = last_psi();
        auto pick = surface_.lowest(active_, wrap_angle(prev), cfg.degeneracy_tol);
        if (cfg.cross_check)
            pick = cross_check(active_, prev, pick, cfg, stats);
        if (stats)
        {
            ++stats->steps;
            stats->candidates += pick.candidates;
        }
        return {prev + pick.offset, pick.z};
    }

    //! Place a ring of u spheres; returns their scan-frame positions.
    std::vector<std::pair<double, double>>
    lowest_group(DepositionConfig const& cfg, DepositionStats* stats)
    {
        int const u = cfg.group_size;
        if (u == 1)
        {
            auto p = lowest(cfg, stats);
            add(p.first, p.second);
            return {p};
        }
        double const spacing = kTwoPi / u;
        // Ring objective max_k S(psi0 + k spacing) is itself a max of shifted
        // branches, so the single-sphere machinery applies unchanged.
        std::vector<Branch> ring;
        ring.reserve(active_.size() * u);
        for (auto const& b : active_)
            for (int k = 0; k < u; ++k)
                ring.push_back({wrap_angle(b.angle - k * spacing), b.z});

        double const prev = last_psi();
        auto pick = surface_.lowest(ring, wrap_angle(prev), cfg.degeneracy_tol);
        if (cfg.cross_check)
            pick = cross_check(ring, prev, pick, cfg, stats);
        if (stats)
        {
            ++stats->steps;
            stats->candidates += pick.candidates;
        }

        std::vector<std::pair<double, double>> placed;
        double const psi0 = prev + pick.offset;
        for (int k = 0; k < u; ++k)
        {
            double psi = psi0 + k * spacing;
            double z = surface_.envelope(active_, psi);
            if (!std::isfinite(z))
                throw InternalError("group member has no support");
            add(psi, z);
            placed.emplace_back(psi, z);
        }
        return placed;
    }

  private:
    Surface::Pick cross_check(std::span<Branch const> branches,
                              double prev,
                              Surface::Pick pick,
                              DepositionConfig const& cfg,
                              DepositionStats* stats) const
    {
        auto const grid = surface_.scan_minimum(branches, prev, cfg.scan_grid);
        double const exact = pick.z;
        if (grid.height < exact - cfg.degeneracy_tol)
        {
            if (stats)
                ++stats->cross_check_misses;
            pick.offset = grid.offset;
            pick.z = grid.height;
        }
        return pick;
    }

    void refresh_active()
    {
        // Find Z0 = the highest level whose sites alone cover the circle;
        // anything below Z0 - 1 can never reach the envelope again.
        std::vector<Branch> sorted(active_);
        std::sort(sorted.begin(), sorted.end(), [](auto const& a, auto const& b) {
            return a.z > b.z;
        });
        std::vector<double> angles;
        auto covered_by = [&](std::size_t count) {
            angles.clear();
            for (std::size_t i = 0; i < count; ++i)
                angles.push_back(sorted[i].angle);
            return covers_circle(angles, surface_.window());
        };
        if (!covered_by(sorted.size()))
            return;
        std::size_t lo = 1, hi = sorted.size();
        while (lo < hi)
        {
            std::size_t mid = (lo + hi) / 2;
            if (covered_by(mid))
                hi = mid;
            else
                lo = mid + 1;
        }
        double const floor = sorted[lo - 1].z - 1 - 1e-9;
        std::erase_if(active_, [floor](Branch const& b) { return b.z < floor; });
    }

    Surface surface_;
    int direction_;
    std::vector<double> psi_;
    std::vector<double> z_;
    std::vector<Branch> active_;
};

Column to_column(DiameterRatio d,
                 int direction,
                 std::vector<std::pair<double, double>> const& frame_sites,
                 std::size_t template_len)
{
    Column col;
    col.ratio = d;
    col.direction = direction;
    col.template_len = template_len;
    col.sites.reserve(frame_sites.size());
    for (std::size_t i = 0; i < frame_sites.size(); ++i)
        col.sites.push_back({i, direction * frame_sites[i].first, frame_sites[i].second});
    return col;
}

}  // namespace

//---------------------------------------------------------------------------//
std::optional<Column> build_template(DiameterRatio d,
                                     TemplateParams const& params,
                                     DepositionConfig const& cfg)
{
    validate_params(d, params);
    Surface const surface(d.value());
    double const window = surface.window();

    std::vector<Branch> placed{{0.0, 0.0}};
    std::vector<std::pair<double, double>> frame{{0.0, 0.0}};
    std::vector<double> angles{0.0};

    auto covered = [&] { return covers_circle(angles, window); };

    double const dz2 = contact_offset(d, params.dphi21).value_or(params.dz21.value_or(0));
    // Both seed spheres are always placed; more follow until covered.
    while (frame.size() < 2 || !covered())
    {
        if (static_cast<int>(frame.size()) >= cfg.max_template_sites)
            return std::nullopt;
        auto const n = static_cast<double>(frame.size());  // N - 1
        double const psi = n * params.dphi21;
        double z = 0;
        if (frame.size() == 1)
        {
            z = dz2;
        }
        else
        {
            double support = surface.height(placed, psi);
            z = std::isfinite(support) ? support : n * dz2;
        }
        for (auto const& b : placed)
        {
            if (surface.distance(b, {wrap_angle(psi), z}) < 1 - cfg.contact_tol)
                return std::nullopt;
        }
        placed.push_back({wrap_angle(psi), z});
        frame.emplace_back(psi, z);
        angles.push_back(wrap_angle(psi));
    }
    return to_column(d, params.direction, frame, frame.size());
}

std::optional<double> support_height(Column const& col, double phi)
{
    Surface const surface(col.ratio.value());
    std::vector<Branch> branches;
    branches.reserve(col.sites.size());
    for (auto const& s : col.sites)
        branches.push_back({wrap_angle(s.angle), s.axial});

    double z = surface.height(branches, phi);
    if (!std::isfinite(z))
        return std::nullopt;
    // The envelope lies above every site in reach; verify nothing overlaps.
    for (bool moved = true; moved;)
    {
        moved = false;
        for (auto const& b : branches)
        {
            if (surface.distance(b, {wrap_angle(phi), z}) < 1 - kContactTol)
            {
                z = b.z + std::sqrt(std::max(
                        0.0, detail::contact_offset_sq(col.ratio.chord_scale(),
                                                       phi - b.angle)));
                moved = true;
            }
        }
    }
    return z;
}

SurfaceSite deposit_next(Column const& col, DepositionConfig const& cfg)
{
    if (col.sites.empty())
        throw ParameterError("deposit_next needs a non-empty column");
    auto grower = Grower::from_column(col);
    auto [psi, z] = grower.lowest(cfg, nullptr);
    return {col.sites.size(), col.direction * psi, z};
}

std::vector<SurfaceSite> deposit_group(Column const& col, DepositionConfig const& cfg)
{
    if (col.sites.empty())
        throw ParameterError("deposit_group needs a non-empty column");
    cfg.validate();
    auto grower = Grower::from_column(col);
    std::vector<SurfaceSite> out;
    std::size_t index = col.sites.size();
    for (auto [psi, z] : grower.lowest_group(cfg, nullptr))
        out.push_back({index++, col.direction * psi, z});
    return out;
}

std::optional<Column> run_deposition(DiameterRatio d,
                                     TemplateParams const& params,
                                     DepositionConfig const& cfg,
                                     DepositionStats* stats)
{
    cfg.validate();
    auto col = build_template(d, params, cfg);
    if (!col)
        return std::nullopt;

    auto grower = Grower::from_column(*col);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    while (!(hi - lo >= cfg.target_length))
    {
        if (col->sites.size() >= cfg.max_sites)
        {
            std::ostringstream msg;
            msg << "column at D=" << d.value() << " did not reach length "
                << cfg.target_length << " within " << cfg.max_sites << " sites";
            throw DomainError(msg.str());
        }
        for (auto [psi, z] : grower.lowest_group(cfg, stats))
        {
            col->sites.push_back({col->sites.size(), params.direction * psi, z});
            lo = std::min(lo, z);
            hi = std::max(hi, z);
        }
    }
    return col;
}

}  // namespace cylpack
