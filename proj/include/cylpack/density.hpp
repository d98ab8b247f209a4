#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "deposition.hpp"
#include "label.hpp"

namespace cylpack
{
//---------------------------------------------------------------------------//
//! Too few sites in the fit window.
class InsufficientData : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! A sweep where no template produced a column.
class SweepFailure : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//---------------------------------------------------------------------------//
struct DensityEstimate
{
    double slope{0};     //!< dN/dz, spheres per sphere diameter
    double vf{0};        //!< volume fraction
    double residual{0};  //!< max |N - fit|
    double z_lo{0};
    double z_hi{0};
    std::size_t samples{0};
    //! Set by evaluate_template: the column has a verified periodic tail.
    bool periodic{false};
};

//! Fraction of the post-template extent discarded as transient before fitting.
inline constexpr double kTransientFraction = 0.3;

/*!
 * Least-squares fit of rank N against z over post-template sites.
 *
 * The lowest 30% of the post-template extent is dropped as transient, and so
 * is the topmost level (it may hold an incomplete layer of equal-z sites).
 */
DensityEstimate fit_number_density(Column const& col);

//! V_F = 2 / (3 D^2) * dN/dz. Throws ParameterError unless slope > 0.
double volume_fraction(DiameterRatio d, double slope);

//---------------------------------------------------------------------------//
struct SweepGrid
{
    int dphi_steps{1571};  //!< samples of dphi21 over [0, pi]
    int dz_steps{101};     //!< samples of dz21 over [0, 1] where it is free
    int refine_rounds{3};  //!< local rounds, step shrinks 10x per round
    int refine_span{10};   //!< half-width of a local round, in steps
    //! Extra dphi21 samples per coarse step where dz21 is fixed by contact.
    //! Such samples cost one run each, and some phases (the three-ring
    //! structure near D = 2.155) occupy basins narrower than the coarse step.
    int contact_oversample{10};
    unsigned threads{0};   //!< 0: hardware concurrency

    void validate() const;
};

struct SweepRecord
{
    double ratio{0};
    TemplateParams best_params;
    double vf_max{0};
    DensityEstimate estimate;
    StructureLabel label;
    std::size_t transient_len{0};
    //! Screw period of the winning column, if it has one.
    std::optional<HelicalPeriod> period;
    double runtime{0};  //!< seconds
    std::size_t evaluated{0};
    //! vf_max after the coarse grid and after each refinement round.
    std::vector<double> round_best;
    //! Densest column, regenerated with the caller's configuration.
    std::optional<Column> column;
    //! Set when this D failed; the remaining fields are then unspecified.
    std::optional<std::string> failure;
};

/*!
 * Evaluate one template: deposit, fit, and test the column for a periodic
 * tail. Empty for invalid templates.
 */
std::optional<DensityEstimate> evaluate_template(DiameterRatio d,
                                                 TemplateParams const& params,
                                                 DepositionConfig const& cfg);

/*!
 * Grid search over (dphi21, dz21) followed by local refinement around the
 * incumbent. Columns with a periodic tail rank above those without; among
 * equals the larger vf wins, and ties in vf (within 1e-9) resolve to the
 * smallest dphi21, then the smallest dz21, then direction +1.
 *
 * Template evaluations skip the grid cross-check; the winning column is
 * regenerated with \c cfg as given.
 */
SweepRecord sweep_templates(DiameterRatio d, SweepGrid const& grid, DepositionConfig const& cfg);

//! D samples lo, lo + step, ... below hi, plus hi itself; empty if lo == hi.
std::vector<double> diameter_samples(double lo, double hi, double step);

using RecordSink = std::function<void(SweepRecord&)>;

/*!
 * One sweep_templates per D sample, in increasing D. Samples for which
 * \c skip returns true (already checkpointed) are not evaluated. Each record
 * goes through \c finish (e.g. classification) and then \c emit. Per-D errors
 * are stored in SweepRecord::failure rather than thrown.
 */
std::vector<SweepRecord> sweep_diameter(double lo,
                                        double hi,
                                        double step,
                                        SweepGrid const& grid,
                                        DepositionConfig const& cfg,
                                        RecordSink const& finish = {},
                                        RecordSink const& emit = {},
                                        std::function<bool(double)> const& skip = {});

}  // namespace cylpack
