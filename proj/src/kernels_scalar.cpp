#include "cylpack/kernels.hpp"

#include <cmath>
#include <limits>

namespace cylpack::kernels::detail
{
void support_scan_scalar(double k,
                         SiteBlock sites,
                         std::span<double const> probe_cos,
                         std::span<double const> probe_sin,
                         std::span<double> heights)
{
    double const none = -std::numeric_limits<double>::infinity();
    std::size_t const n = sites.size();
    for (std::size_t g = 0; g < heights.size(); ++g)
    {
        double const ct = probe_cos[g];
        double const st = probe_sin[g];
        double best = none;
        for (std::size_t j = 0; j < n; ++j)
        {
            double c = ct * sites.cos[j] + st * sites.sin[j];
            double rad = 1 - k * (1 - c);
            if (rad >= 0)
            {
                double h = sites.axial[j] + std::sqrt(rad);
                best = h > best ? h : best;
            }
        }
        heights[g] = best;
    }
}

void distance_sq_scalar(double k,
                        double cos_phi,
                        double sin_phi,
                        double axial,
                        SiteBlock sites,
                        std::span<double> out)
{
    for (std::size_t j = 0; j < sites.size(); ++j)
    {
        double c = cos_phi * sites.cos[j] + sin_phi * sites.sin[j];
        double dz = axial - sites.axial[j];
        out[j] = dz * dz + k * (1 - c);
    }
}
}  // namespace cylpack::kernels::detail
