#include "cylpack/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace cylpack::kernels
{
namespace
{
Isa detect_isa()
{
    if (char const* force = std::getenv("CYLPACK_FORCE_SCALAR");
        force && std::strcmp(force, "0") != 0 && *force != '\0')
    {
        return Isa::scalar;
    }
    return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}
}  // namespace

bool isa_available(Isa isa)
{
    switch (isa)
    {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(CYLPACK_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa()
{
    static Isa const isa = detect_isa();
    return isa;
}

std::string_view to_string(Isa isa)
{
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

void support_scan(Isa isa,
                  double k,
                  SiteBlock sites,
                  std::span<double const> probe_cos,
                  std::span<double const> probe_sin,
                  std::span<double> heights)
{
#if defined(CYLPACK_HAVE_AVX2)
    if (isa == Isa::avx2)
    {
        detail::support_scan_avx2(k, sites, probe_cos, probe_sin, heights);
        return;
    }
#endif
    (void)isa;
    detail::support_scan_scalar(k, sites, probe_cos, probe_sin, heights);
}

void distance_sq(Isa isa,
                 double k,
                 double cos_phi,
                 double sin_phi,
                 double axial,
                 SiteBlock sites,
                 std::span<double> out)
{
#if defined(CYLPACK_HAVE_AVX2)
    if (isa == Isa::avx2)
    {
        detail::distance_sq_avx2(k, cos_phi, sin_phi, axial, sites, out);
        return;
    }
#endif
    (void)isa;
    detail::distance_sq_scalar(k, cos_phi, sin_phi, axial, sites, out);
}
}  // namespace cylpack::kernels
