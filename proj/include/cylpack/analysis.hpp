#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "deposition.hpp"
#include "label.hpp"

namespace cylpack
{
//---------------------------------------------------------------------------//
struct ContactGraph
{
    //! Sorted neighbour indices per site; symmetric.
    std::vector<std::vector<std::size_t>> adjacency;
    //! histogram[c] = number of sites with exactly c contacts.
    std::vector<std::size_t> histogram;
    double tol{kContactTol};

    std::size_t coordination(std::size_t i) const { return adjacency[i].size(); }
};

//! Sites i, j touch when |d_ij - 1| <= tol.
ContactGraph contact_graph(Column const& col, double tol = kContactTol);

//---------------------------------------------------------------------------//
struct HelicalPeriod
{
    double dphi_p{0};  //!< rotation per period, wrapped to (-pi, pi]
    double dz_p{0};    //!< axial translation per period, > 0
    std::size_t sites_per_period{0};
    //! | |V| - (D-1)pi | for the recovered periodicity vector, s-units.
    double v_norm{0};
    //! Leading sites (template included) the screw map does not carry.
    std::size_t transient_len{0};
    //! Worst screw-map mismatch over the periodic tail.
    double residual{0};
};

//! Screw-map tolerance in both phi and z.
inline constexpr double kPeriodTol = 1e-6;

/*!
 * Contact shell for lattice recovery. Deposited lattices carry gaps of order
 * 1e-6 where three supports should touch at once; a tighter graph drops them.
 */
inline constexpr double kLatticeTol = 1e-5;

/*!
 * Smallest-dz_p screw motion (phi + dphi_p, z + dz_p) carrying the tail of
 * the column onto itself.
 *
 * Candidates come from pairs (r, j) with r the first site of the trailing
 * half; each is verified against every trailing site whose image lies below
 * the growth front. Absent when nothing verifies or the column has fewer than
 * 20 post-template sites.
 */
std::optional<HelicalPeriod> detect_periodicity(Column const& col, ContactGraph const& graph);

/*!
 * Label the periodic tail. Transient sites are never classified; without a
 * period the result is Unclassified.
 */
StructureLabel classify_structure(Column const& col,
                                  ContactGraph const& graph,
                                  std::optional<HelicalPeriod> const& period);

//! Convenience: graph, period and label in one go.
struct Analysis
{
    ContactGraph graph;
    std::optional<HelicalPeriod> period;
    StructureLabel label;
};
Analysis analyze(Column const& col);

//---------------------------------------------------------------------------//
struct PhyllotacticPoint
{
    double s{0};  //!< arc length, wrapped into [0, (D-1)pi)
    double z{0};
    std::size_t index{0};
};

std::vector<PhyllotacticPoint> phyllotactic_points(Column const& col);

/*!
 * Closed curve (2 dz)^2 + 2 (D-1)^2 (1 - cos(2 ds / (D-1))) = 1 around a
 * point, as (ds, dz) offsets: the contact equation rewritten with both
 * surface coordinates doubled. Traced by ds over its full range, upper branch
 * then lower branch, closed (first point repeated last).
 */
std::vector<std::pair<double, double>> boundary_curve(DiameterRatio d, int samples = 64);

namespace detail
{
//! Same curve for any D > 1, bypassing the diameter-ratio cap.
std::vector<std::pair<double, double>> boundary_curve_unchecked(double d, int samples);
}  // namespace detail

}  // namespace cylpack
