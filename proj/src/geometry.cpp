#include "cylpack/geometry.hpp"

#include <cmath>
#include <sstream>

namespace cylpack
{
namespace
{
// Radicands this close below zero are rounding noise at a window edge.
constexpr double kEdgeSlack = 1e-14;
// Accept user-rounded values of the upper bound.
constexpr double kRatioSlack = 1e-9;
}  // namespace

DiameterRatio::DiameterRatio(double value) : value_(value)
{
    if (!(value >= 1.0) || !(value <= kMaxDiameterRatio + kRatioSlack))
    {
        std::ostringstream msg;
        msg.precision(17);
        msg << "diameter ratio " << value << " outside [1, " << kMaxDiameterRatio
            << "]";
        throw DomainError(msg.str());
    }
    if (value_ > kMaxDiameterRatio)
        value_ = kMaxDiameterRatio;
}

double wrap_angle(double phi) noexcept
{
    double r = std::remainder(phi, kTwoPi);
    if (r <= -kPi)
        r += kTwoPi;
    return r;
}

double wrap_positive(double phi) noexcept
{
    double r = std::fmod(phi, kTwoPi);
    if (r < 0)
        r += kTwoPi;
    if (r >= kTwoPi)
        r = 0;
    return r;
}

namespace detail
{
double contact_offset_sq(double chord_scale, double dphi) noexcept
{
    double chord = chord_scale * std::sin(dphi / 2);
    double rad = 1 - chord * chord;
    if (rad < 0 && rad >= -kEdgeSlack)
        rad = 0;
    return rad;
}

std::optional<double> contact_offset_unchecked(double d, double dphi)
{
    double rad = contact_offset_sq(d - 1, dphi);
    if (rad < 0)
        return std::nullopt;
    return std::sqrt(rad);
}

double angular_window_unchecked(double d)
{
    if (d <= 2)
        return kPi;
    return 2 * std::asin(1 / (d - 1));
}
}  // namespace detail

std::optional<double> contact_offset(DiameterRatio d, double dphi)
{
    return detail::contact_offset_unchecked(d.value(), dphi);
}

double angular_window(DiameterRatio d)
{
    return detail::angular_window_unchecked(d.value());
}

double center_distance(DiameterRatio d, SurfaceSite const& a, SurfaceSite const& b)
{
    double chord = d.chord_scale() * std::sin(wrap_angle(a.angle - b.angle) / 2);
    double dz = a.axial - b.axial;
    return std::sqrt(dz * dz + chord * chord);
}

double arc_length(DiameterRatio d, double phi)
{
    return d.chord_scale() * phi / 2;
}

double circumference(DiameterRatio d)
{
    return d.chord_scale() * kPi;
}

}  // namespace cylpack
