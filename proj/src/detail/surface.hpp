#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cylpack::detail
{
//! One site seen as a branch z_j + h(psi - a_j) of the support envelope.
struct Branch
{
    double angle;  //!< wrapped into (-pi, pi]
    double z;
};

/*!
 * Support envelope S(psi) = max_j (z_j + h(psi - a_j)) over a set of branches,
 * with h(x) = sqrt(1 - ((D - 1) sin(x / 2))^2) restricted to |x| <= window.
 *
 * The minimum of a max of such branches lies either at a branch end (window
 * edge, or x = pi when the window is the whole circle) or where two branches
 * cross; both candidate families are enumerated exactly.
 */
class Surface
{
  public:
    explicit Surface(double d);

    double chord_scale() const { return cs_; }
    double k() const { return k_; }
    double window() const { return window_; }

    //! S(psi) over closed windows; -infinity when no branch reaches psi.
    double height(std::span<Branch const> branches, double psi) const;
    /*!
     * S(psi) over open windows. A sphere exactly at the edge of a window
     * (chord = 1) cannot overlap that site at any height, so the edge branch
     * drops out; this is the lower envelope the greedy step minimizes, and it
     * attains the infimum that the closed version only approaches.
     */
    double envelope(std::span<Branch const> branches, double psi) const;
    double distance(Branch const& a, Branch const& b) const;

    struct Pick
    {
        double offset{0};  //!< scan offset from the start angle, in [0, 2pi)
        double z{0};       //!< envelope height there
        std::size_t candidates{0};
    };
    //! Exact minimizer of S over [start, start + 2pi) with scan-order ties.
    Pick lowest(std::span<Branch const> branches, double start, double tie_tol) const;

    struct GridPick
    {
        double offset;
        double height;
    };
    //! Grid scan of S (SIMD kernel) plus golden-section polish of the best cell.
    GridPick scan_minimum(std::span<Branch const> branches,
                          double start,
                          int samples) const;

    //! Angles (wrapped) where the upper branches of a and b meet.
    void crossings(Branch const& a, Branch const& b, std::vector<double>& out) const;

  private:
    double cs_;
    double k_;
    double window_;
};
}  // namespace cylpack::detail
