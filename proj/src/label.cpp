#include "cylpack/label.hpp"

#include <array>
#include <utility>

#include "cylpack/geometry.hpp"

namespace cylpack
{
namespace
{
constexpr std::array<std::pair<StructureKind, std::string_view>, 8> kNames{{
    {StructureKind::single_file, "single-file"},
    {StructureKind::zigzag, "zigzag"},
    {StructureKind::single_helix, "single-helix"},
    {StructureKind::double_helix, "double-helix"},
    {StructureKind::doublets, "doublets"},
    {StructureKind::symmetric, "symmetric"},
    {StructureKind::line_slip, "line-slip"},
    {StructureKind::unclassified, "unclassified"},
}};

std::string digits(Phyllotaxis p)
{
    return std::to_string(p.l) + std::to_string(p.m) + std::to_string(p.n);
}
}  // namespace

std::string_view to_string(StructureKind kind)
{
    for (auto const& [k, name] : kNames)
        if (k == kind)
            return name;
    return "unclassified";
}

StructureKind parse_structure_kind(std::string_view name)
{
    for (auto const& [k, n] : kNames)
        if (n == name)
            return k;
    throw ParameterError("unknown structure kind '" + std::string(name) + "'");
}

std::string describe(StructureLabel const& label)
{
    std::string out(to_string(label.kind));
    if (label.kind == StructureKind::line_slip)
    {
        if (label.slip_type > 0)
            out += " type " + std::to_string(label.slip_type);
        if (label.indices && label.upper)
            out += " (" + digits(*label.indices) + "|" + digits(*label.upper) + ")";
        return out;
    }
    if (label.indices)
        out += " " + digits(*label.indices);
    return out;
}

}  // namespace cylpack
