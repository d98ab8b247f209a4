#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

namespace cylpack
{
//---------------------------------------------------------------------------//
//! Should-not-happen condition inside the engine.
class InternalError : public std::logic_error
{
  public:
    using std::logic_error::logic_error;
};

//---------------------------------------------------------------------------//
/*!
 * Seed of the template: offset of sphere 2 relative to sphere 1.
 *
 * \c dz21 is only meaningful when no contact exists at \c dphi21; otherwise
 * the axial offset follows from the contact equation and must be left empty.
 */
struct TemplateParams
{
    double dphi21{0};
    std::optional<double> dz21;
    int direction{1};  //!< +1: increasing phi, -1: decreasing phi

    friend bool operator==(TemplateParams const&, TemplateParams const&) = default;
};

//---------------------------------------------------------------------------//
struct DepositionConfig
{
    double target_length{20};      //!< axial extent of post-template sites
    int scan_grid{4096};           //!< cross-check samples per 2pi
    double contact_tol{kContactTol};
    double degeneracy_tol{1e-9};   //!< height ties for the scan-order rule
    int group_size{1};             //!< spheres per deposition step (u)
    int max_template_sites{64};
    bool cross_check{true};        //!< grid-scan verification of each step
    std::size_t max_sites{200000}; //!< hard stop for degenerate inputs

    //! Throws ParameterError when a field is out of range.
    void validate() const;
};

//---------------------------------------------------------------------------//
//! Ordered deposition record of one run.
struct Column
{
    DiameterRatio ratio{1.0};
    std::vector<SurfaceSite> sites;
    std::size_t template_len{0};
    int direction{1};

    //! max z - min z over sites deposited after the template.
    double post_template_extent() const;
    std::span<SurfaceSite const> post_template() const
    {
        return std::span<SurfaceSite const>(sites).subspan(template_len);
    }
};

//! Diagnostics accumulated over a run.
struct DepositionStats
{
    std::size_t steps{0};
    std::size_t candidates{0};
    //! Grid scan found a lower site than the exact candidate set.
    std::size_t cross_check_misses{0};
};

//---------------------------------------------------------------------------//
// Operations
//---------------------------------------------------------------------------//

//! Whether closed arcs [a_i - w, a_i + w] cover the whole circle.
bool covers_circle(std::span<double const> angles, double window);

/*!
 * Build the seed template.
 *
 * Returns nullopt (invalid verdict) when the angular windows of the first
 * \c max_template_sites spheres never cover the circle, or when a fallback
 * placement would overlap an earlier sphere.
 */
std::optional<Column> build_template(DiameterRatio d,
                                     TemplateParams const& params,
                                     DepositionConfig const& cfg);

/*!
 * Lowest z at which a sphere at angle \c phi touches the column without
 * overlapping it: max_j (z_j + contact_offset(phi - phi_j)) over sites in
 * reach. Empty when no site is within the angular window.
 */
std::optional<double> support_height(Column const& col, double phi);

/*!
 * Next greedy site: the minimum of support_height over one full turn starting
 * at the previous site and moving in the column's direction. Height ties
 * (within degeneracy_tol) go to the first angle met by the scan.
 *
 * The column is not modified.
 */
SurfaceSite deposit_next(Column const& col, DepositionConfig const& cfg);

/*!
 * Deposit \c cfg.group_size spheres at angles phi0 + 2 pi k / u.
 *
 * phi0 minimizes the highest of the u support heights (same scan and tie rule
 * as deposit_next); the members then settle one after another, each at its own
 * support height including the members already placed. For u = 1 this is
 * deposit_next.
 */
std::vector<SurfaceSite> deposit_group(Column const& col, DepositionConfig const& cfg);

/*!
 * Template plus greedy growth until the post-template extent reaches
 * cfg.target_length. Returns nullopt if the template is invalid.
 */
std::optional<Column> run_deposition(DiameterRatio d,
                                     TemplateParams const& params,
                                     DepositionConfig const& cfg,
                                     DepositionStats* stats = nullptr);

}  // namespace cylpack
