#include "cylpack/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace cylpack
{
namespace
{
using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;)
    {
        auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view s, std::size_t line, char const* what)
{
    double x = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || !std::isfinite(x))
        throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
    return x;
}

long parse_int(std::string_view s, std::size_t line, char const* what)
{
    long x = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
    return x;
}

std::ifstream open_in(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

//! Write via a temporary and rename, so a killed run leaves the old file.
void write_atomic(std::filesystem::path const& path, std::string const& text)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open " + tmp.string() + " for writing");
        out << text;
        if (!out.flush())
            throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError("cannot replace " + path.string() + ": " + ec.message());
}

std::string utc_now()
{
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string lmn_digits(Phyllotaxis p)
{
    return std::to_string(p.l) + "-" + std::to_string(p.m) + "-" + std::to_string(p.n);
}

std::optional<Phyllotaxis> parse_lmn(std::string_view s)
{
    auto parts = std::vector<std::string_view>{};
    std::size_t start = 0;
    for (;;)
    {
        auto pos = s.find('-', start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    if (parts.size() != 3)
        return std::nullopt;
    Phyllotaxis p;
    int* dst[3] = {&p.l, &p.m, &p.n};
    for (int i = 0; i < 3; ++i)
    {
        auto [ptr, ec] = std::from_chars(parts[i].data(), parts[i].data() + parts[i].size(), *dst[i]);
        if (ec != std::errc{} || ptr != parts[i].data() + parts[i].size())
            return std::nullopt;
    }
    return p;
}
}  // namespace

ParseError::ParseError(std::size_t line, std::string const& msg)
    : IoError("line " + std::to_string(line) + ": " + msg), line_(line)
{
}

std::string format_double(double x)
{
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    (void)ec;
    return std::string(buf, ptr);
}

//---------------------------------------------------------------------------//
// COLUMN FILES
//---------------------------------------------------------------------------//
void write_column(std::ostream& os, Column const& col)
{
    os << "# d=" << format_double(col.ratio.value()) << '\n'
       << "# direction=" << col.direction << '\n'
       << "# template_len=" << col.template_len << '\n'
       << "# index,phi_unwrapped,z\n";
    for (auto const& s : col.sites)
        os << s.index << ',' << format_double(s.angle) << ',' << format_double(s.axial) << '\n';
}

Column read_column(std::istream& is)
{
    std::optional<double> d;
    std::size_t d_line = 0;
    std::optional<int> direction;
    std::optional<std::size_t> template_len;
    std::vector<SurfaceSite> sites;

    std::string raw;
    std::size_t line = 0;
    while (std::getline(is, raw))
    {
        ++line;
        auto text = trim(raw);
        if (text.empty())
            continue;
        if (text.front() == '#')
        {
            auto body = trim(text.substr(1));
            auto eq = body.find('=');
            if (eq == std::string_view::npos)
                continue;  // plain comment
            if (!sites.empty())
                throw ParseError(line, "header after site rows");
            auto key = trim(body.substr(0, eq));
            auto value = trim(body.substr(eq + 1));
            if (key == "d")
            {
                d = parse_double(value, line, "d");
                d_line = line;
            }
            else if (key == "direction")
            {
                long v = parse_int(value, line, "direction");
                if (v != 1 && v != -1)
                    throw ParseError(line, "direction must be +1 or -1");
                direction = static_cast<int>(v);
            }
            else if (key == "template_len")
            {
                long v = parse_int(value, line, "template_len");
                if (v < 0)
                    throw ParseError(line, "template_len must be non-negative");
                template_len = static_cast<std::size_t>(v);
            }
            else
            {
                throw ParseError(line, "unknown header '" + std::string(key) + "'");
            }
            continue;
        }
        auto f = split(text);
        if (f.size() != 3)
            throw ParseError(line, "expected index,phi_unwrapped,z");
        long idx = parse_int(f[0], line, "index");
        if (idx != static_cast<long>(sites.size()))
        {
            if (!sites.empty() && idx <= static_cast<long>(sites.back().index))
                throw ParseError(line, "index " + std::to_string(idx) + " does not increase");
            throw ParseError(line, "index " + std::to_string(idx) + " out of sequence, expected "
                                       + std::to_string(sites.size()));
        }
        sites.push_back({static_cast<std::size_t>(idx), parse_double(f[1], line, "phi"),
                         parse_double(f[2], line, "z")});
    }
    if (!d)
        throw ParseError(line, "missing '# d=' header");
    if (!direction)
        throw ParseError(line, "missing '# direction=' header");
    if (!template_len)
        throw ParseError(line, "missing '# template_len=' header (required)");
    if (*template_len > sites.size())
        throw ParseError(line, "template_len exceeds the number of sites");

    Column col;
    try
    {
        col.ratio = DiameterRatio(*d);
    }
    catch (std::exception const& e)
    {
        throw ParseError(d_line, e.what());
    }
    col.direction = *direction;
    col.template_len = *template_len;
    col.sites = std::move(sites);
    return col;
}

void write_column(std::filesystem::path const& path, Column const& col)
{
    std::ostringstream os;
    write_column(os, col);
    write_atomic(path, os.str());
}

Column read_column(std::filesystem::path const& path)
{
    auto in = open_in(path);
    return read_column(in);
}

//---------------------------------------------------------------------------//
// RESULTS CSV
//---------------------------------------------------------------------------//
ResultRow to_row(SweepRecord const& rec)
{
    ResultRow row;
    row.d = rec.ratio;
    if (rec.failure)
    {
        row.failed = true;
        return row;
    }
    row.vf_max = rec.vf_max;
    row.params = rec.best_params;
    row.label = rec.label;
    row.transient_len = rec.transient_len;
    return row;
}

std::string label_token(StructureLabel const& label)
{
    std::string out(to_string(label.kind));
    if (label.kind == StructureKind::line_slip)
    {
        out += ":" + std::to_string(label.slip_type);
        out += ":" + (label.upper ? lmn_digits(*label.upper) : std::string("-"));
        out += ":" + std::to_string(label.slip_parastichy);
    }
    return out;
}

StructureLabel parse_label_token(std::string const& token, std::optional<Phyllotaxis> indices)
{
    StructureLabel label;
    std::string_view t = token;
    auto colon = t.find(':');
    label.kind = parse_structure_kind(t.substr(0, colon));
    label.indices = indices;
    if (label.kind != StructureKind::line_slip)
    {
        if (colon != std::string_view::npos)
            throw ParameterError("unexpected suffix in label '" + token + "'");
        return label;
    }
    if (colon == std::string_view::npos)
        return label;
    auto rest = t.substr(colon + 1);
    auto c2 = rest.find(':');
    auto c3 = c2 == std::string_view::npos ? c2 : rest.find(':', c2 + 1);
    if (c3 == std::string_view::npos)
        throw ParameterError("malformed line-slip label '" + token + "'");
    auto type = rest.substr(0, c2);
    auto upper = rest.substr(c2 + 1, c3 - c2 - 1);
    auto slip = rest.substr(c3 + 1);
    if (std::from_chars(type.data(), type.data() + type.size(), label.slip_type).ec != std::errc{}
        || std::from_chars(slip.data(), slip.data() + slip.size(), label.slip_parastichy).ec
               != std::errc{})
        throw ParameterError("malformed line-slip label '" + token + "'");
    if (upper != "-")
    {
        label.upper = parse_lmn(upper);
        if (!label.upper)
            throw ParameterError("malformed line-slip label '" + token + "'");
    }
    return label;
}

void write_results(std::ostream& os, std::vector<ResultRow> const& rows)
{
    os << kResultsHeader << '\n';
    for (auto const& r : rows)
    {
        os << format_double(r.d) << ',';
        if (r.failed)
        {
            os << ",,,,failed,,,,\n";
            continue;
        }
        os << format_double(r.vf_max) << ',' << format_double(r.params.dphi21) << ',';
        if (r.params.dz21)
            os << format_double(*r.params.dz21);
        os << ',' << r.params.direction << ',' << label_token(r.label) << ',';
        if (r.label.indices)
            os << r.label.indices->l << ',' << r.label.indices->m << ',' << r.label.indices->n;
        else
            os << ",,";
        os << ',' << r.transient_len << '\n';
    }
}

std::vector<ResultRow> read_results(std::istream& is)
{
    std::vector<ResultRow> rows;
    std::string raw;
    std::size_t line = 0;
    bool header = false;
    while (std::getline(is, raw))
    {
        ++line;
        auto text = trim(raw);
        if (text.empty() || text.front() == '#')
            continue;
        if (!header)
        {
            if (text != kResultsHeader)
                throw ParseError(line, "expected header '" + std::string(kResultsHeader) + "'");
            header = true;
            continue;
        }
        auto f = split(text);
        if (f.size() != 10)
            throw ParseError(line, "expected 10 fields, got " + std::to_string(f.size()));
        ResultRow r;
        r.d = parse_double(f[0], line, "d");
        if (f[5] == "failed")
        {
            r.failed = true;
            rows.push_back(r);
            continue;
        }
        r.vf_max = parse_double(f[1], line, "vf_max");
        r.params.dphi21 = parse_double(f[2], line, "dphi21");
        if (!f[3].empty())
            r.params.dz21 = parse_double(f[3], line, "dz21");
        r.params.direction = static_cast<int>(parse_int(f[4], line, "direction"));
        std::optional<Phyllotaxis> lmn;
        if (!f[6].empty() || !f[7].empty() || !f[8].empty())
        {
            lmn = Phyllotaxis{static_cast<int>(parse_int(f[6], line, "l")),
                              static_cast<int>(parse_int(f[7], line, "m")),
                              static_cast<int>(parse_int(f[8], line, "n"))};
        }
        try
        {
            r.label = parse_label_token(std::string(f[5]), lmn);
        }
        catch (ParameterError const& e)
        {
            throw ParseError(line, e.what());
        }
        long tl = parse_int(f[9], line, "transient_len");
        if (tl < 0)
            throw ParseError(line, "negative transient_len");
        r.transient_len = static_cast<std::size_t>(tl);
        rows.push_back(r);
    }
    if (!header)
        throw ParseError(line, "missing results header");
    return rows;
}

//---------------------------------------------------------------------------//
// CHECKPOINT
//---------------------------------------------------------------------------//
namespace
{
json settings_object(SweepSettings const& s)
{
    json j;
    j["d_lo"] = s.d_lo;
    j["d_hi"] = s.d_hi;
    j["step"] = s.step;
    j["grid"] = {{"dphi_steps", s.grid.dphi_steps},
                 {"dz_steps", s.grid.dz_steps},
                 {"refine_rounds", s.grid.refine_rounds},
                 {"refine_span", s.grid.refine_span},
                 {"contact_oversample", s.grid.contact_oversample}};
    auto const& c = s.deposition;
    j["deposition"] = {{"target_length", c.target_length},
                       {"scan_grid", c.scan_grid},
                       {"group_size", c.group_size},
                       {"max_template_sites", c.max_template_sites},
                       {"cross_check", c.cross_check},
                       {"max_sites", c.max_sites}};
    j["tolerances"] = {{"contact", c.contact_tol},
                       {"degeneracy", c.degeneracy_tol},
                       {"period", kPeriodTol},
                       {"lattice", kLatticeTol}};
    // Deterministic: no random seeds anywhere; ties resolve by this order.
    j["tie_break"] = "periodic tail, then vf (1e-9), then smallest dphi21, "
                     "smallest dz21, direction +1";
    return j;
}
}  // namespace

std::string settings_json(SweepSettings const& settings)
{
    return settings_object(settings).dump(2);
}

Checkpoint::Checkpoint(std::filesystem::path csv, SweepSettings const& settings)
    : csv_(std::move(csv)), settings_(settings), created_(utc_now())
{
}

std::filesystem::path Checkpoint::manifest_path(std::filesystem::path const& csv)
{
    auto p = csv;
    p += ".manifest.json";
    return p;
}

void Checkpoint::resume()
{
    auto const mpath = manifest_path(csv_);
    bool const have_csv = std::filesystem::exists(csv_);
    bool const have_manifest = std::filesystem::exists(mpath);
    if (!have_csv && !have_manifest)
        return;
    if (have_csv != have_manifest)
        throw IoError("checkpoint is incomplete: need both " + csv_.string() + " and "
                      + mpath.string());

    json manifest;
    {
        auto in = open_in(mpath);
        try
        {
            manifest = json::parse(in);
        }
        catch (json::exception const& e)
        {
            throw IoError("bad manifest " + mpath.string() + ": " + e.what());
        }
    }
    if (!manifest.contains("config") || manifest["config"] != settings_object(settings_))
        throw ParameterError("checkpoint " + mpath.string()
                             + " was written with a different configuration");
    created_ = manifest.value("created", created_);
    timings_.clear();
    for (auto const& r : manifest.value("records", json::array()))
    {
        timings_.push_back({r.at("d").get<double>(), r.at("runtime").get<double>(),
                            r.at("evaluated").get<std::size_t>(), r.value("failure", "")});
    }
    auto in = open_in(csv_);
    rows_ = read_results(in);
}

bool Checkpoint::done(double d) const
{
    return std::any_of(rows_.begin(), rows_.end(),
                       [&](ResultRow const& r) { return std::abs(r.d - d) <= 1e-9; });
}

void Checkpoint::record(SweepRecord const& rec)
{
    auto row = to_row(rec);
    auto at = std::lower_bound(rows_.begin(), rows_.end(), row.d,
                               [](ResultRow const& r, double d) { return r.d < d; });
    rows_.insert(at, row);
    timings_.push_back({rec.ratio, rec.runtime, rec.evaluated, rec.failure.value_or("")});
    std::sort(timings_.begin(), timings_.end(),
              [](Timing const& a, Timing const& b) { return a.d < b.d; });
    flush();
}

void Checkpoint::flush() const
{
    std::ostringstream csv;
    write_results(csv, rows_);
    write_atomic(csv_, csv.str());

    json m;
    m["tool"] = "cylpack";
    m["version"] = kToolVersion;
    m["created"] = created_;
    m["updated"] = utc_now();
    m["config"] = settings_object(settings_);
    json recs = json::array();
    for (auto const& t : timings_)
    {
        json r = {{"d", t.d}, {"runtime", t.runtime}, {"evaluated", t.evaluated}};
        if (!t.failure.empty())
            r["failure"] = t.failure;
        recs.push_back(r);
    }
    m["records"] = recs;
    write_atomic(manifest_path(csv_), m.dump(2) + "\n");
}

//---------------------------------------------------------------------------//
// DIAGRAMS
//---------------------------------------------------------------------------//
namespace
{
//! Fixed-point text, with negative zero printed as zero.
std::string fx(double x, int digits = 2)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    std::string s(buf);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
        s.erase(0, 1);
    return s;
}
}  // namespace

std::string render_diagram(DiagramInput const& in)
{
    constexpr double scale = 60;  // px per sphere diameter
    constexpr double margin = 50;
    double const period = circumference(in.ratio);
    double zlo = 0, zhi = 0;
    if (!in.points.empty())
    {
        auto [lo, hi] = std::minmax_element(in.points.begin(), in.points.end(),
                                            [](auto const& a, auto const& b) { return a.z < b.z; });
        zlo = lo->z;
        zhi = hi->z;
    }
    zlo -= 0.6;
    zhi += 0.6;
    double const plot_w = std::max(period, 0.5) * scale;
    double const plot_h = (zhi - zlo) * scale;
    double const width = plot_w + 2 * margin;
    double const height = plot_h + 2 * margin + 40;
    auto X = [&](double s) { return margin + s * scale; };
    auto Y = [&](double z) { return margin + (zhi - z) * scale; };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fx(width)
      << "\" height=\"" << fx(height) << "\" viewBox=\"0 0 " << fx(width) << ' ' << fx(height)
      << "\">\n"
      << "<defs>\n"
      << "<clipPath id=\"period\"><rect x=\"" << fx(X(0)) << "\" y=\"" << fx(margin)
      << "\" width=\"" << fx(plot_w) << "\" height=\"" << fx(plot_h) << "\"/></clipPath>\n"
      << "<marker id=\"arrow\" markerWidth=\"10\" markerHeight=\"10\" refX=\"9\" refY=\"5\" "
         "orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"black\"/></marker>\n"
      << "</defs>\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << fx(width) << "\" height=\"" << fx(height)
      << "\" fill=\"white\"/>\n"
      << "<text x=\"" << fx(margin) << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">D = "
      << format_double(in.ratio.value()) << "</text>\n";

    if (!in.period)
    {
        o << "<text x=\"" << fx(margin) << "\" y=\"38\" font-family=\"sans-serif\" "
             "font-size=\"12\" fill=\"#b00000\">warning: no periodic tail detected</text>\n";
    }
    else if (in.period->transient_len > 0)
    {
        double tlo = 0, thi = 0;
        bool any = false;
        for (auto const& p : in.points)
        {
            if (p.index >= in.period->transient_len)
                continue;
            tlo = any ? std::min(tlo, p.z) : p.z;
            thi = any ? std::max(thi, p.z) : p.z;
            any = true;
        }
        if (any)
        {
            o << "<rect x=\"" << fx(X(0)) << "\" y=\"" << fx(Y(thi + 0.5)) << "\" width=\""
              << fx(plot_w) << "\" height=\"" << fx((thi - tlo + 1) * scale)
              << "\" fill=\"none\" stroke=\"#b00000\" stroke-dasharray=\"6,4\"/>\n";
        }
    }

    o << "<rect x=\"" << fx(X(0)) << "\" y=\"" << fx(margin) << "\" width=\"" << fx(plot_w)
      << "\" height=\"" << fx(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";

    // Boundary curves, with images across the seam when they reach over it.
    auto const curve = detail::boundary_curve_unchecked(in.ratio.value(), in.boundary_samples);
    double reach = 0;
    for (auto const& [ds, dz] : curve)
        reach = std::max(reach, std::abs(ds));
    o << "<g clip-path=\"url(#period)\" fill=\"none\" stroke=\"#3a6ea5\" stroke-width=\"1\">\n";
    for (auto const& p : in.points)
    {
        std::vector<double> shifts{0};
        if (period > 0 && p.s - reach < 0)
            shifts.push_back(period);
        if (period > 0 && p.s + reach > period)
            shifts.push_back(-period);
        for (double shift : shifts)
        {
            o << "<path d=\"";
            for (std::size_t k = 0; k < curve.size(); ++k)
            {
                o << (k == 0 ? "M" : " L") << fx(X(p.s + shift + curve[k].first)) << ','
                  << fx(Y(p.z + curve[k].second));
            }
            o << "\"/>\n";
        }
    }
    o << "</g>\n<g fill=\"black\">\n";
    for (auto const& p : in.points)
        o << "<circle cx=\"" << fx(X(p.s)) << "\" cy=\"" << fx(Y(p.z)) << "\" r=\"2.5\"/>\n";
    o << "</g>\n";

    // Period arrow below the plot.
    double const ay = margin + plot_h + 22;
    o << "<line x1=\"" << fx(X(0)) << "\" y1=\"" << fx(ay) << "\" x2=\"" << fx(X(period))
      << "\" y2=\"" << fx(ay) << "\" stroke=\"black\" stroke-width=\"1.5\" "
         "marker-end=\"url(#arrow)\"/>\n"
      << "<text x=\"" << fx(X(period / 2)) << "\" y=\"" << fx(ay + 18)
      << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">|V| = (D-1)pi = "
      << fx(period, 6) << "</text>\n"
      << "<text x=\"" << fx(X(0) + plot_w + 8) << "\" y=\"" << fx(margin + plot_h)
      << "\" font-family=\"sans-serif\" font-size=\"12\">s</text>\n"
      << "<text x=\"" << fx(margin - 16) << "\" y=\"" << fx(margin + 4)
      << "\" font-family=\"sans-serif\" font-size=\"12\">z</text>\n"
      << "</svg>\n";
    return o.str();
}

void write_diagram_csv(std::ostream& os, std::vector<PhyllotacticPoint> const& points)
{
    os << "s,z,index\n";
    for (auto const& p : points)
        os << format_double(p.s) << ',' << format_double(p.z) << ',' << p.index << '\n';
}

//---------------------------------------------------------------------------//
// REFERENCE COMPARISON
//---------------------------------------------------------------------------//
std::vector<CurvePoint> read_curve(std::istream& is)
{
    std::vector<CurvePoint> out;
    std::string raw;
    std::size_t line = 0;
    std::optional<std::size_t> col_d, col_vf, col_label;
    std::size_t fields = 0;
    while (std::getline(is, raw))
    {
        ++line;
        auto text = trim(raw);
        if (text.empty() || text.front() == '#')
            continue;
        auto f = split(text);
        if (!col_d)
        {
            for (std::size_t i = 0; i < f.size(); ++i)
            {
                if (f[i] == "d" || f[i] == "D")
                    col_d = i;
                else if (f[i] == "vf_max" || f[i] == "vf")
                    col_vf = i;
                else if (f[i] == "label")
                    col_label = i;
            }
            if (!col_d || !col_vf)
                throw ParseError(line, "header must name columns 'd' and 'vf_max'");
            fields = f.size();
            continue;
        }
        if (f.size() != fields)
            throw ParseError(line, "expected " + std::to_string(fields) + " fields");
        if (col_label && f[*col_label] == "failed")
            continue;
        CurvePoint p;
        p.d = parse_double(f[*col_d], line, "d");
        p.vf = parse_double(f[*col_vf], line, "vf_max");
        if (col_label)
            p.label = std::string(f[*col_label]);
        if (!(p.vf > 0 && p.vf < kBulkPackingFraction))
            throw ParseError(line, "vf_max outside (0, 0.74048)");
        if (!out.empty() && !(p.d > out.back().d))
            throw ParseError(line, "d must increase strictly");
        out.push_back(std::move(p));
    }
    if (!col_d)
        throw ParseError(line, "empty curve file");
    return out;
}

CompareReport
compare_reference(std::vector<CurvePoint> const& ours, std::vector<CurvePoint> const& reference, double tol)
{
    if (!(tol >= 0))
        throw ParameterError("tolerance must be non-negative");
    CompareReport rep;
    rep.tolerance = tol;
    if (ours.empty() || reference.empty())
        throw CompareError("nothing to compare: empty curve");

    constexpr double kMatch = 1e-9;
    double const lo = reference.front().d - kMatch;
    double const hi = reference.back().d + kMatch;
    for (std::size_t i = 0; i < ours.size(); ++i)
    {
        double d = ours[i].d;
        if (d < lo || d > hi)
            continue;
        auto it = std::lower_bound(reference.begin(), reference.end(), d - kMatch,
                                   [](CurvePoint const& p, double x) { return p.d < x; });
        double ref = 0;
        if (it != reference.end() && std::abs(it->d - d) <= kMatch)
        {
            ref = it->vf;
        }
        else
        {
            auto const& b = *it;
            auto const& a = *(it - 1);
            ref = a.vf + (b.vf - a.vf) * (d - a.d) / (b.d - a.d);
        }
        CompareRow row;
        row.d = d;
        row.ours = ours[i].vf;
        row.reference = ref;
        row.delta = std::abs(row.ours - ref);
        row.above = row.delta > tol;
        auto differs = [&](std::size_t j) {
            return !ours[j].label.empty() && ours[j].label != ours[i].label;
        };
        row.transition = (i > 0 && differs(i - 1)) || (i + 1 < ours.size() && differs(i + 1));
        rep.rows.push_back(row);
    }
    if (rep.rows.empty())
        throw CompareError("D ranges do not overlap");
    double sum = 0;
    for (auto const& r : rep.rows)
    {
        rep.max_delta = std::max(rep.max_delta, r.delta);
        sum += r.delta;
        rep.above += r.above;
    }
    rep.mean_delta = sum / rep.rows.size();
    return rep;
}

void print_report(std::ostream& os, CompareReport const& rep)
{
    os << "d,ours,reference,abs_delta,flags\n";
    std::size_t transitions = 0;
    for (auto const& r : rep.rows)
    {
        os << format_double(r.d) << ',' << format_double(r.ours) << ','
           << format_double(r.reference) << ',' << format_double(r.delta) << ',';
        if (r.above)
            os << "above_tol";
        if (r.above && r.transition)
            os << ';';
        if (r.transition)
            os << "transition";
        os << '\n';
        transitions += r.transition;
    }
    os << "# compared " << rep.rows.size() << " D values\n"
       << "# max |dvf| = " << format_double(rep.max_delta) << '\n'
       << "# mean |dvf| = " << format_double(rep.mean_delta) << '\n'
       << "# above tolerance " << format_double(rep.tolerance) << ": " << rep.above << '\n'
       << "# near structural transitions: " << transitions << '\n';
}

}  // namespace cylpack
