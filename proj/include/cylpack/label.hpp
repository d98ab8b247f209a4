#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace cylpack
{
enum class StructureKind
{
    single_file,
    zigzag,
    single_helix,
    double_helix,
    doublets,
    symmetric,
    line_slip,
    unclassified
};

//! Phyllotactic indices (l, m, n) with l = m + n and m >= n >= 0.
struct Phyllotaxis
{
    int l{0};
    int m{0};
    int n{0};

    friend bool operator==(Phyllotaxis const&, Phyllotaxis const&) = default;
};

/*!
 * Classification of a column's periodic tail.
 *
 * For line slips, \c indices holds the symmetric neighbour below (in D) and
 * \c upper the one above; \c slip_type is the conventional type number from
 * the shipped lookup table (0 when the neighbour pair is not tabulated).
 */
struct StructureLabel
{
    StructureKind kind{StructureKind::unclassified};
    std::optional<Phyllotaxis> indices;
    std::optional<Phyllotaxis> upper;
    int slip_type{0};
    //! Parastichy count of the lattice direction that lost contacts.
    int slip_parastichy{0};

    friend bool operator==(StructureLabel const&, StructureLabel const&) = default;
};

std::string_view to_string(StructureKind kind);
//! Inverse of to_string(StructureKind); throws ParameterError on unknown names.
StructureKind parse_structure_kind(std::string_view name);
//! Human-readable summary, e.g. "symmetric 321" or "line-slip type 2 (321|330)".
std::string describe(StructureLabel const& label);

}  // namespace cylpack
