#include "detail/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cylpack/geometry.hpp"
#include "cylpack/kernels.hpp"

namespace cylpack::detail
{
namespace
{
constexpr double kNone = -std::numeric_limits<double>::infinity();
// Branches with radicand at or below this are treated as outside the window;
// their chord is within 5e-13 of 1, so dropping them cannot create an overlap.
constexpr double kOpenEdge = 1e-12;

struct ProbeGrid
{
    int samples{0};
    std::vector<double> cos;
    std::vector<double> sin;
};

ProbeGrid const& probe_grid(int samples)
{
    thread_local ProbeGrid grid;
    if (grid.samples != samples)
    {
        grid.samples = samples;
        grid.cos.resize(samples);
        grid.sin.resize(samples);
        for (int g = 0; g < samples; ++g)
        {
            double t = kTwoPi * g / samples;
            grid.cos[g] = std::cos(t);
            grid.sin[g] = std::sin(t);
        }
    }
    return grid;
}
}  // namespace

Surface::Surface(double d)
    : cs_(d - 1), k_(cs_ * cs_ / 2), window_(detail::angular_window_unchecked(d))
{
}

double Surface::height(std::span<Branch const> branches, double psi) const
{
    double best = kNone;
    for (auto const& b : branches)
    {
        double rad = contact_offset_sq(cs_, psi - b.angle);
        if (rad >= 0)
            best = std::max(best, b.z + std::sqrt(rad));
    }
    return best;
}

double Surface::envelope(std::span<Branch const> branches, double psi) const
{
    double best = kNone;
    for (auto const& b : branches)
    {
        double rad = contact_offset_sq(cs_, psi - b.angle);
        if (rad > kOpenEdge)
            best = std::max(best, b.z + std::sqrt(rad));
    }
    return best;
}

double Surface::distance(Branch const& a, Branch const& b) const
{
    double chord = cs_ * std::sin((a.angle - b.angle) / 2);
    double dz = a.z - b.z;
    return std::sqrt(dz * dz + chord * chord);
}

//---------------------------------------------------------------------------//
void Surface::crossings(Branch const& a, Branch const& b, std::vector<double>& out) const
{
    out.clear();
    if (k_ <= 0)
        return;

    // Put the pair symmetric about m: a at m - delta, b at m + delta, and
    // write the new site as psi = m + theta. Subtracting the two contact
    // equations eliminates z, leaving a quadratic in x = cos(theta):
    //   c^2 x^2 + k cos(delta) x - (c^2 + dz^2/4 + k - 1) = 0,
    //   c = k sin(delta) / dz.
    double const delta = wrap_angle(b.angle - a.angle) / 2;
    double const mid = a.angle + delta;
    double const dz = b.z - a.z;
    double const sd = std::sin(delta);
    double const cd = std::cos(delta);

    double thetas[4];
    int count = 0;
    if (std::abs(dz) < 1e-12)
    {
        if (std::abs(sd) < 1e-14)
            return;
        thetas[count++] = 0;
        thetas[count++] = kPi;
    }
    else
    {
        double const c = k_ * sd / dz;
        double const qa = c * c;
        double const qb = k_ * cd;
        double const qe = qa + dz * dz / 4 + k_ - 1;
        double roots[2];
        int nroots = 0;
        if (qa < 1e-300)
        {
            if (qb == 0)
                return;
            roots[nroots++] = qe / qb;
        }
        else
        {
            double disc = qb * qb + 4 * qa * qe;
            if (disc < 0)
            {
                if (disc < -1e-12 * (qb * qb + std::abs(4 * qa * qe)))
                    return;
                disc = 0;
            }
            double const q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
            roots[nroots++] = q / qa;
            if (q != 0)
                roots[nroots++] = -qe / q;
        }
        for (int r = 0; r < nroots; ++r)
        {
            double x = roots[r];
            if (!(std::abs(x) <= 1 + 1e-9))
                continue;
            double th = std::acos(std::clamp(x, -1.0, 1.0));
            thetas[count++] = th;
            if (th != 0)
                thetas[count++] = -th;
        }
    }

    auto residual = [&](double psi, double& slope) {
        double xa = psi - a.angle;
        double xb = psi - b.angle;
        double ra = contact_offset_sq(cs_, xa);
        double rb = contact_offset_sq(cs_, xb);
        if (ra < 0 || rb < 0)
            return std::numeric_limits<double>::quiet_NaN();
        double ha = std::sqrt(ra);
        double hb = std::sqrt(rb);
        slope = (ha > 0 && hb > 0)
                    ? -k_ * std::sin(xa) / (2 * ha) + k_ * std::sin(xb) / (2 * hb)
                    : std::numeric_limits<double>::quiet_NaN();
        return (a.z + ha) - (b.z + hb);
    };

    for (int t = 0; t < count; ++t)
    {
        double psi = mid + thetas[t];
        double slope = 0;
        double f = residual(psi, slope);
        if (!(std::abs(f) < 1e-3))
            continue;
        for (int it = 0; it < 8 && std::abs(f) > 1e-15; ++it)
        {
            if (!std::isfinite(slope) || slope == 0)
                break;
            double next = psi - f / slope;
            double next_slope = 0;
            double g = residual(next, next_slope);
            if (!(std::abs(g) < std::abs(f)))
                break;
            psi = next;
            f = g;
            slope = next_slope;
        }
        if (std::abs(f) <= 1e-11)
            out.push_back(wrap_angle(psi));
    }
}

//---------------------------------------------------------------------------//
Surface::Pick
Surface::lowest(std::span<Branch const> branches, double start, double tie_tol) const
{
    struct Candidate
    {
        double offset;
        double z;
    };
    std::vector<Candidate> cands;
    cands.reserve(4 * branches.size() + 1);
    double best = std::numeric_limits<double>::infinity();

    auto consider = [&](double psi) {
        double z = envelope(branches, psi);
        if (!std::isfinite(z))
            return;
        double off = wrap_positive(psi - start);
        if (off > kTwoPi - 1e-12)
            off = 0;
        cands.push_back({off, z});
        best = std::min(best, z);
    };

    consider(start);
    bool const full_window = window_ >= kPi;
    for (auto const& b : branches)
    {
        if (full_window)
        {
            consider(b.angle + kPi);
        }
        else
        {
            consider(b.angle - window_);
            consider(b.angle + window_);
        }
    }

    std::vector<double> roots;
    for (std::size_t i = 0; i < branches.size(); ++i)
    {
        auto const& bi = branches[i];
        if (bi.z > best + tie_tol)
            continue;
        for (std::size_t j = i + 1; j < branches.size(); ++j)
        {
            auto const& bj = branches[j];
            if (bj.z > best + tie_tol || std::abs(bi.z - bj.z) > 1)
                continue;
            if (!full_window
                && std::abs(wrap_angle(bi.angle - bj.angle)) > 2 * window_ + 1e-12)
                continue;
            crossings(bi, bj, roots);
            for (double psi : roots)
            {
                double rad = contact_offset_sq(cs_, psi - bi.angle);
                if (rad < 0 || bi.z + std::sqrt(rad) > best + tie_tol)
                    continue;
                consider(psi);
            }
        }
    }

    if (cands.empty())
        throw std::logic_error("no deposition candidate: column does not cover the circle");

    Pick pick;
    pick.candidates = cands.size();
    pick.offset = std::numeric_limits<double>::infinity();
    for (auto const& c : cands)
    {
        if (c.z <= best + tie_tol && c.offset < pick.offset)
        {
            pick.offset = c.offset;
            pick.z = c.z;
        }
    }
    return pick;
}

//---------------------------------------------------------------------------//
Surface::GridPick
Surface::scan_minimum(std::span<Branch const> branches, double start, int samples) const
{
    auto const& grid = probe_grid(samples);
    std::vector<double> bc(branches.size()), bs(branches.size()), bz(branches.size());
    for (std::size_t j = 0; j < branches.size(); ++j)
    {
        double rel = branches[j].angle - start;
        bc[j] = std::cos(rel);
        bs[j] = std::sin(rel);
        bz[j] = branches[j].z;
    }
    std::vector<double> heights(samples);
    kernels::support_scan(k_, {bc, bs, bz}, grid.cos, grid.sin, heights);

    int best = 0;
    for (int g = 1; g < samples; ++g)
    {
        if (heights[g] < heights[best])
            best = g;
    }

    // Golden-section polish inside the neighbouring cells.
    double const cell = kTwoPi / samples;
    double lo = (best - 1) * cell;
    double hi = (best + 1) * cell;
    auto f = [&](double t) {
        double z = height(branches, start + t);
        return std::isfinite(z) ? z : std::numeric_limits<double>::infinity();
    };
    constexpr double ratio = 0.6180339887498949;
    double x1 = hi - ratio * (hi - lo);
    double x2 = lo + ratio * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it)
    {
        if (f1 <= f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    GridPick out{best * cell, heights[best]};
    double t = f1 <= f2 ? x1 : x2;
    double z = std::min(f1, f2);
    if (z < out.height)
        out = {wrap_positive(t), z};
    return out;
}

}  // namespace cylpack::detail
