#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "density.hpp"

namespace cylpack
{
//---------------------------------------------------------------------------//
//! A file could not be opened, read or written.
class IoError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Malformed input; what() starts with "line N: ".
class ParseError : public IoError
{
  public:
    ParseError(std::size_t line, std::string const& msg);
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

//! compare on curves that share no D range.
class CompareError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr char kToolVersion[] = "0.3.0";

//! Shortest-exact text for a double, 17 significant digits.
std::string format_double(double x);

//---------------------------------------------------------------------------//
// Column files
//---------------------------------------------------------------------------//
void write_column(std::ostream& os, Column const& col);
Column read_column(std::istream& is);
void write_column(std::filesystem::path const& path, Column const& col);
Column read_column(std::filesystem::path const& path);

//---------------------------------------------------------------------------//
// Results CSV: d,vf_max,dphi21,dz21,direction,label,l,m,n,transient_len
//---------------------------------------------------------------------------//
struct ResultRow
{
    double d{0};
    double vf_max{0};
    TemplateParams params;
    StructureLabel label;
    std::size_t transient_len{0};
    //! Failed samples are written with empty numeric fields.
    bool failed{false};

    friend bool operator==(ResultRow const&, ResultRow const&) = default;
};

ResultRow to_row(SweepRecord const& rec);

inline constexpr char kResultsHeader[] = "d,vf_max,dphi21,dz21,direction,label,l,m,n,transient_len";

//! Label column token; line slips carry type, upper neighbour and slip count.
std::string label_token(StructureLabel const& label);
StructureLabel parse_label_token(std::string const& token,
                                 std::optional<Phyllotaxis> indices);

void write_results(std::ostream& os, std::vector<ResultRow> const& rows);
std::vector<ResultRow> read_results(std::istream& is);

//---------------------------------------------------------------------------//
// Checkpointed D sweeps
//---------------------------------------------------------------------------//
struct SweepSettings
{
    double d_lo{1.75};
    double d_hi{kMaxDiameterRatio};
    double step{0.001};
    SweepGrid grid;
    DepositionConfig deposition;
};

/*!
 * Results CSV at \c csv plus a JSON manifest next to it (<csv>.manifest.json)
 * holding tool version, the full configuration, timestamps and per-sample
 * runtimes. Every completed sample rewrites both files.
 */
class Checkpoint
{
  public:
    Checkpoint(std::filesystem::path csv, SweepSettings const& settings);

    //! Load previous results; throws ParameterError on a configuration mismatch.
    void resume();
    bool done(double d) const;
    void record(SweepRecord const& rec);
    std::vector<ResultRow> const& rows() const { return rows_; }

    static std::filesystem::path manifest_path(std::filesystem::path const& csv);

  private:
    void flush() const;

    std::filesystem::path csv_;
    SweepSettings settings_;
    std::vector<ResultRow> rows_;
    std::string created_;
    struct Timing
    {
        double d;
        double runtime;
        std::size_t evaluated;
        std::string failure;
    };
    std::vector<Timing> timings_;
};

//! Configuration block of the manifest, as JSON text.
std::string settings_json(SweepSettings const& settings);

//---------------------------------------------------------------------------//
// Diagrams
//---------------------------------------------------------------------------//
struct DiagramInput
{
    DiameterRatio ratio{1.0};
    std::vector<PhyllotacticPoint> points;
    std::optional<HelicalPeriod> period;
    int boundary_samples{32};
};

/*!
 * SVG 1.1 phyllotactic diagram: z against s over one period, every site's
 * boundary curve, and an arrow of length (D-1)pi along s. Without a period a
 * warning line is added; with a transient its z range is boxed.
 * Output depends only on the input.
 */
std::string render_diagram(DiagramInput const& in);

//! s,z,index rows.
void write_diagram_csv(std::ostream& os, std::vector<PhyllotacticPoint> const& points);

//---------------------------------------------------------------------------//
// Reference comparison
//---------------------------------------------------------------------------//
struct CurvePoint
{
    double d{0};
    double vf{0};
    std::string label;  //!< empty when the file has no label column
};

/*!
 * Read a (d, vf_max) curve from CSV with a header naming "d" and "vf_max"
 * (or "vf"). D must increase strictly and vf lie in (0, 0.74048).
 */
std::vector<CurvePoint> read_curve(std::istream& is);

struct CompareRow
{
    double d{0};
    double ours{0};
    double reference{0};
    double delta{0};  //!< |ours - reference|
    bool above{false};
    //! Our label changes at this D or a neighbouring one.
    bool transition{false};
};

struct CompareReport
{
    std::vector<CompareRow> rows;
    double max_delta{0};
    double mean_delta{0};
    std::size_t above{0};
    double tolerance{1e-3};
};

/*!
 * Evaluate the reference at each of our D inside its range (exact match, else
 * linear interpolation). Throws CompareError if no D of ours falls inside.
 */
CompareReport
compare_reference(std::vector<CurvePoint> const& ours, std::vector<CurvePoint> const& reference, double tol);

void print_report(std::ostream& os, CompareReport const& report);

}  // namespace cylpack
