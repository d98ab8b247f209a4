#pragma once

#include <span>
#include <string_view>

namespace cylpack::kernels
{
//---------------------------------------------------------------------------//
/*!
 * Data-parallel inner loops of the engine.
 *
 * Every kernel has a scalar reference implementation and an AVX2/FMA variant;
 * the variant is chosen once at runtime from CPUID. Site angles are passed as
 * precomputed (cos, sin) pairs so the loops are pure multiply-add-sqrt:
 *
 *   1 - cos(a - b) = 1 - (cos a cos b + sin a sin b)
 *
 * Setting CYLPACK_FORCE_SCALAR=1 in the environment pins the scalar path.
 */
enum class Isa
{
    scalar,
    avx2
};

//! Structure-of-arrays view over a set of wall sites.
struct SiteBlock
{
    std::span<double const> cos;
    std::span<double const> sin;
    std::span<double const> axial;

    std::size_t size() const noexcept { return axial.size(); }
};

//! ISA chosen for this process.
Isa active_isa();
//! Whether the running CPU can execute the given ISA.
bool isa_available(Isa isa);
std::string_view to_string(Isa isa);

/*!
 * Support height at each probe angle.
 *
 * heights[g] = max_j ( z_j + sqrt(1 - k (1 - cos(t_g - phi_j))) ) over sites
 * whose radicand is non-negative, or -infinity when no site is in reach.
 * \c k is (D - 1)^2 / 2.
 */
void support_scan(Isa isa,
                  double k,
                  SiteBlock sites,
                  std::span<double const> probe_cos,
                  std::span<double const> probe_sin,
                  std::span<double> heights);

/*!
 * Squared centre distance from one site to every site of a block:
 * out[j] = (z - z_j)^2 + k (1 - cos(phi - phi_j)), the left side of the
 * contact equation.
 */
void distance_sq(Isa isa,
                 double k,
                 double cos_phi,
                 double sin_phi,
                 double axial,
                 SiteBlock sites,
                 std::span<double> out);

//! Convenience overloads using active_isa().
inline void support_scan(double k,
                         SiteBlock sites,
                         std::span<double const> probe_cos,
                         std::span<double const> probe_sin,
                         std::span<double> heights)
{
    support_scan(active_isa(), k, sites, probe_cos, probe_sin, heights);
}

inline void distance_sq(double k,
                        double cos_phi,
                        double sin_phi,
                        double axial,
                        SiteBlock sites,
                        std::span<double> out)
{
    distance_sq(active_isa(), k, cos_phi, sin_phi, axial, sites, out);
}

namespace detail
{
void support_scan_scalar(double, SiteBlock, std::span<double const>,
                         std::span<double const>, std::span<double>);
void distance_sq_scalar(double, double, double, double, SiteBlock,
                        std::span<double>);
#if defined(CYLPACK_HAVE_AVX2)
void support_scan_avx2(double, SiteBlock, std::span<double const>,
                       std::span<double const>, std::span<double>);
void distance_sq_avx2(double, double, double, double, SiteBlock,
                      std::span<double>);
#endif
}  // namespace detail

}  // namespace cylpack::kernels
