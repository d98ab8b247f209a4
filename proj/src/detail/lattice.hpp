#pragma once

#include <optional>
#include <span>
#include <vector>

#include "cylpack/analysis.hpp"

namespace cylpack::detail
{
//! Sites sorted by z for tolerance lookups of (wrapped phi, z).
class SiteIndex
{
  public:
    explicit SiteIndex(std::span<SurfaceSite const> sites);

    //! Index of a site within tol of (phi, z) in both coordinates.
    std::optional<std::size_t>
    find(double phi, double z, double tol, double* err = nullptr) const;

  private:
    struct Entry
    {
        double z;
        double phi;
        std::size_t index;
    };
    std::vector<Entry> entries_;
};

//! graph itself if it is at least as loose as kLatticeTol, else storage rebuilt.
ContactGraph const& lattice_shell(Column const& col, ContactGraph const& graph, ContactGraph& storage);

//! A displacement in the unrolled (s, z) plane.
struct Planar
{
    double s{0};
    double z{0};
};

//! Sites of the periodic tail whose contact shells are complete.
struct TailView
{
    std::vector<std::size_t> interior;
    double density{0};        //!< sites per unit z in the tail, exact
    double circumference{0};  //!< (D-1) pi
};

TailView tail_view(Column const& col, HelicalPeriod const& p);

/*!
 * A family of parallel contacts. Vectors point up the cylinder (horizontal
 * ones towards +s); coverage is contacts per interior site and count the
 * number of parastichies along the family, density * |dz|.
 */
struct Family
{
    Planar mean;
    std::size_t contacts{0};
    double coverage{0};
    double count{0};
};

//! Contact families of the interior tail, most populated first.
std::vector<Family>
contact_families(Column const& col, ContactGraph const& graph, TailView const& view);

//! Separation of a displacement in sphere diameters.
double planar_distance(DiameterRatio d, Planar v);

//! Same displacement on the cylinder: equal z and s equal mod C.
bool same_displacement(Planar a, Planar b, double circumference, double tol);

/*!
 * Close a loop through the contact network: from an interior site take c1
 * steps along b1 and c2 steps along b2 (signed counts), always stepping to
 * the contact whose displacement matches. Returns the summed displacement
 * when the walk returns to its start, which for a lattice is V = (C, 0).
 */
std::optional<Planar> close_loop(Column const& col,
                                 ContactGraph const& graph,
                                 TailView const& view,
                                 Planar b1,
                                 int c1,
                                 Planar b2,
                                 int c2);

//! Integer coefficients of V = c1 b1 + c2 b2, if they are integers.
std::optional<std::pair<int, int>> lattice_coefficients(Planar b1, Planar b2, double circumference);

/*!
 * Periodicity vector of the tail recovered through the contact network: the
 * two most populated families whose V-coefficients are integers, walked as a
 * closed loop. Absent when no such pair closes.
 */
std::optional<Planar>
recover_period_vector(Column const& col, ContactGraph const& graph, HelicalPeriod const& p);

//---------------------------------------------------------------------------//
//! A defect-free structure and the diameter ratio at which it exists.
struct SymmetricEntry
{
    Phyllotaxis lmn;
    double d;
};

//! Symmetric structures with D in [2, 2.7013], increasing D.
std::vector<SymmetricEntry> const& symmetric_table();

//! Solve for the diameter ratio of a symmetric structure (m >= n >= 0).
std::optional<double> symmetric_diameter(int m, int n);

//! Line-slip type for a neighbour pair and slip parastichy; 0 if untabulated.
int line_slip_type(Phyllotaxis lower, Phyllotaxis upper, int slip_parastichy);

}  // namespace cylpack::detail
