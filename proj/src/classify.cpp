#include <algorithm>
#include <cmath>

#include "cylpack/analysis.hpp"
#include "detail/lattice.hpp"

namespace cylpack
{
namespace
{
using detail::Family;
using detail::Planar;

constexpr double kIntegerTol = 0.02;
//! Lattice directions of a symmetric structure must touch to within this.
constexpr double kNearContact = 1e-2;
constexpr double kAngleTol = 1e-3;

bool near_integer(double x)
{
    return std::abs(x - std::round(x)) <= kIntegerTol;
}

//! Family spanning the tail: (nearly) every interior site has one up-contact.
bool spans(Family const& f)
{
    return f.coverage >= 0.95;
}

double dphi_of(DiameterRatio d, Planar v)
{
    return 2 * v.s / d.chord_scale();
}

bool is_half_turn(DiameterRatio d, Planar v)
{
    return std::abs(std::abs(dphi_of(d, v)) - kPi) <= kAngleTol;
}

Phyllotaxis sorted_indices(int a, int b, int c)
{
    int v[3] = {std::abs(a), std::abs(b), std::abs(c)};
    std::sort(v, v + 3, std::greater<>());
    return {v[0], v[1], v[2]};
}

struct LatticeFit
{
    Phyllotaxis lmn;
    double worst_gap{0};  //!< max |distance - 1| over the three directions
    bool complete{false};  //!< every contact family is one of the three
};

/*!
 * Treat the two most populated spanning families as a lattice basis. The
 * third direction is whichever of b1 +- b2 is closer to contact.
 */
std::optional<LatticeFit> fit_lattice(DiameterRatio d,
                                      std::vector<Family> const& fams,
                                      double circumference,
                                      double density)
{
    std::vector<Family const*> basis;
    for (auto const& f : fams)
    {
        if (spans(f) && near_integer(f.count))
            basis.push_back(&f);
        if (basis.size() == 2)
            break;
    }
    if (basis.size() < 2)
        return std::nullopt;
    Planar const b1 = basis[0]->mean, b2 = basis[1]->mean;
    if (!detail::lattice_coefficients(b1, b2, circumference))
        return std::nullopt;

    Planar const sum{b1.s + b2.s, b1.z + b2.z};
    Planar const diff{b1.s - b2.s, b1.z - b2.z};
    double const gap_sum = std::abs(detail::planar_distance(d, sum) - 1);
    double const gap_diff = std::abs(detail::planar_distance(d, diff) - 1);
    Planar const b3 = gap_sum < gap_diff ? sum : diff;

    LatticeFit fit;
    double const c3 = density * std::abs(b3.z);
    if (!near_integer(c3))
        return std::nullopt;
    fit.lmn = sorted_indices(static_cast<int>(std::lround(basis[0]->count)),
                             static_cast<int>(std::lround(basis[1]->count)),
                             static_cast<int>(std::lround(c3)));
    fit.worst_gap = std::max({std::abs(detail::planar_distance(d, b1) - 1),
                              std::abs(detail::planar_distance(d, b2) - 1),
                              std::min(gap_sum, gap_diff)});
    fit.complete = std::all_of(fams.begin(), fams.end(), [&](Family const& f) {
        for (Planar b : {b1, b2, b3})
        {
            Planar neg{-b.s, -b.z};
            if (detail::same_displacement(f.mean, b, circumference, 0.05)
                || detail::same_displacement(f.mean, neg, circumference, 0.05))
                return true;
        }
        return false;
    });
    return fit;
}

//! Symmetric structures bracketing d: the last at or below and the first above.
std::pair<std::optional<detail::SymmetricEntry>, std::optional<detail::SymmetricEntry>>
neighbours(double d)
{
    std::optional<detail::SymmetricEntry> lo, hi;
    for (auto const& e : detail::symmetric_table())
    {
        if (e.d <= d + 1e-12)
            lo = e;
        else if (!hi)
            hi = e;
    }
    return {lo, hi};
}
}  // namespace

StructureLabel classify_structure(Column const& col,
                                  ContactGraph const& graph,
                                  std::optional<HelicalPeriod> const& period)
{
    StructureLabel label;
    DiameterRatio const d = col.ratio;
    if (d.chord_scale() < 1e-12)
    {
        label.kind = StructureKind::single_file;
        return label;
    }
    if (!period || period->sites_per_period == 0)
        return label;

    auto const view = detail::tail_view(col, *period);
    if (view.interior.empty())
        return label;
    ContactGraph loose;
    auto const fams = detail::contact_families(col, detail::lattice_shell(col, graph, loose), view);
    if (fams.empty())
        return label;
    auto const lattice = fit_lattice(d, fams, view.circumference, view.density);

    // Planar zigzag: every contact is a half turn.
    if (std::all_of(fams.begin(), fams.end(),
                    [&](Family const& f) { return is_half_turn(d, f.mean); }))
    {
        label.kind = StructureKind::zigzag;
        return label;
    }

    // Doublets: pairs facing each other across the axis at equal z.
    bool const paired = std::any_of(fams.begin(), fams.end(), [&](Family const& f) {
        return std::abs(f.mean.z) <= kPeriodTol && is_half_turn(d, f.mean);
    });
    if (paired && period->sites_per_period == 2)
    {
        label.kind = StructureKind::doublets;
        if (lattice)
            label.indices = lattice->lmn;
        return label;
    }

    if (lattice && lattice->complete && lattice->worst_gap <= kNearContact
        && d.value() >= 2 - 1e-12)
    {
        label.kind = StructureKind::symmetric;
        label.indices = lattice->lmn;
        return label;
    }

    if (d.value() <= 2)
    {
        auto spanning = [&](int count) {
            return std::any_of(fams.begin(), fams.end(), [&](Family const& f) {
                return spans(f) && near_integer(f.count) && std::lround(f.count) == count;
            });
        };
        if (spanning(1))
        {
            label.kind = StructureKind::single_helix;
            return label;
        }
        if (spanning(2) && period->sites_per_period == 2)
        {
            label.kind = StructureKind::double_helix;
            return label;
        }
        return label;
    }

    // Line slip: an intact parastichy family runs through a structure that
    // is not a lattice; name it after the symmetric neighbours in D.
    auto [lo, hi] = neighbours(d.value());
    if (!lo || !hi)
        return label;
    auto intact = std::find_if(fams.begin(), fams.end(), [](Family const& f) {
        return spans(f) && near_integer(f.count);
    });
    if (intact == fams.end())
        return label;
    label.kind = StructureKind::line_slip;
    label.indices = lo->lmn;
    label.upper = hi->lmn;
    label.slip_parastichy = static_cast<int>(std::lround(intact->count));
    label.slip_type = detail::line_slip_type(lo->lmn, hi->lmn, label.slip_parastichy);
    return label;
}

Analysis analyze(Column const& col)
{
    Analysis a;
    a.graph = contact_graph(col);
    a.period = detect_periodicity(col, a.graph);
    a.label = classify_structure(col, a.graph, a.period);
    return a;
}

}  // namespace cylpack
