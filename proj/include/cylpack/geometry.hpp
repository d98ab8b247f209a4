#pragma once

#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace cylpack
{
//---------------------------------------------------------------------------//
// Errors
//---------------------------------------------------------------------------//

//! Input outside the supported physical range (e.g. D > 1 + 1/sin(pi/5)).
class DomainError : public std::domain_error
{
  public:
    using std::domain_error::domain_error;
};

//! Malformed or inconsistent user parameters.
class ParameterError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//---------------------------------------------------------------------------//
// Constants
//---------------------------------------------------------------------------//

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2 * std::numbers::pi;

//! 1 + 1/sin(pi/5): above this the densest packings contain inner spheres.
inline constexpr double kMaxDiameterRatio = 2.7013016167040798;

//! Bulk FCC/HCP packing fraction; strict upper bound for any column.
inline constexpr double kBulkPackingFraction = 0.74048;

//! |d - 1| <= kContactTol counts as touching.
inline constexpr double kContactTol = 1e-9;

//---------------------------------------------------------------------------//
/*!
 * Cylinder diameter over sphere diameter.
 *
 * Construction validates 1 <= D <= 1 + 1/sin(pi/5) (a small slack absorbs
 * the rounding of user input such as "2.7013016167").
 */
class DiameterRatio
{
  public:
    explicit DiameterRatio(double value);

    double value() const noexcept { return value_; }
    //! Radius of the sphere-centre cylinder, (D - 1) / 2.
    double center_radius() const noexcept { return (value_ - 1) / 2; }
    //! Chord scale D - 1: chord = (D - 1) sin(dphi / 2).
    double chord_scale() const noexcept { return value_ - 1; }

    friend bool operator==(DiameterRatio, DiameterRatio) = default;

  private:
    double value_;
};

//---------------------------------------------------------------------------//
//! One deposited sphere on the cylinder wall.
struct SurfaceSite
{
    std::size_t index{0};
    double angle{0};  //!< unwrapped azimuth (radians)
    double axial{0};  //!< z in sphere diameters

    friend bool operator==(SurfaceSite const&, SurfaceSite const&) = default;
};

//---------------------------------------------------------------------------//
// Operations
//---------------------------------------------------------------------------//

//! Wrap an angle into (-pi, pi].
double wrap_angle(double phi) noexcept;

//! Wrap an angle into [0, 2pi).
double wrap_positive(double phi) noexcept;

/*!
 * Axial separation of two touching wall spheres at angular separation dphi.
 *
 * Solves dz^2 + ((D-1)^2 / 2)(1 - cos dphi) = 1 for the non-negative root.
 * Returns nullopt when no contact is possible at that separation.
 */
std::optional<double> contact_offset(DiameterRatio d, double dphi);

//! Largest contactable angular separation: pi for D <= 2.
double angular_window(DiameterRatio d);

//! Euclidean distance between two wall-sphere centres.
double center_distance(DiameterRatio d, SurfaceSite const& a, SurfaceSite const& b);

//! Unrolled arc length s = (D - 1) phi / 2.
double arc_length(DiameterRatio d, double phi);

//! Required periodicity along s, |V| = (D - 1) pi.
double circumference(DiameterRatio d);

namespace detail
{
//---------------------------------------------------------------------------//
// Unchecked variants: no range validation on D. Used by the engine's inner
// loops and by limit tests that intentionally exceed the API cap.
double contact_offset_sq(double chord_scale, double dphi) noexcept;
std::optional<double> contact_offset_unchecked(double d, double dphi);
double angular_window_unchecked(double d);
}  // namespace detail

}  // namespace cylpack
