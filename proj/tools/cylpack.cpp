// cylpack: greedy columnar packings of spheres on a cylinder wall.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cylpack/analysis.hpp"
#include "cylpack/density.hpp"
#include "cylpack/io.hpp"

using namespace cylpack;

namespace
{
constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;

struct GridFlags
{
    SweepGrid grid;
    double length{20};
    int group{1};

    void add(CLI::App* app)
    {
        app->add_option("--dphi-steps", grid.dphi_steps, "dphi21 samples over [0, pi]")
            ->capture_default_str();
        app->add_option("--dz-steps", grid.dz_steps, "dz21 samples over [0, 1]")
            ->capture_default_str();
        app->add_option("--refine-rounds", grid.refine_rounds)->capture_default_str();
        app->add_option("--refine-span", grid.refine_span)->capture_default_str();
        app->add_option("--oversample", grid.contact_oversample,
                        "extra dphi21 samples per step where contact fixes dz21")
            ->capture_default_str();
        app->add_option("--threads", grid.threads, "0: all cores")->capture_default_str();
        app->add_option("--length", length, "axial extent grown per run")->capture_default_str();
        app->add_option("--group", group, "spheres per deposition step (u)")->capture_default_str();
    }

    DepositionConfig config() const
    {
        DepositionConfig cfg;
        cfg.target_length = length;
        cfg.group_size = group;
        return cfg;
    }
};

void write_text(std::string const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush())
        throw IoError("cannot write " + path);
}

void print_analysis(std::ostream& os, Column const& col)
{
    auto a = analyze(col);
    os << "d=" << format_double(col.ratio.value()) << " sites=" << col.sites.size()
       << " template_len=" << col.template_len << '\n';
    os << "label: " << describe(a.label) << '\n';
    if (a.period)
    {
        os << "period: dphi=" << format_double(a.period->dphi_p)
           << " dz=" << format_double(a.period->dz_p)
           << " sites_per_period=" << a.period->sites_per_period
           << " transient_len=" << a.period->transient_len
           << " residual=" << a.period->residual << " v_norm=" << a.period->v_norm << '\n';
    }
    else
    {
        os << "period: none\n";
    }
    os << "coordination:";
    for (std::size_t c = 0; c < a.graph.histogram.size(); ++c)
        if (a.graph.histogram[c])
            os << ' ' << c << 'x' << a.graph.histogram[c];
    os << '\n';
    try
    {
        auto est = fit_number_density(col);
        os << "vf=" << format_double(est.vf) << " dN/dz=" << format_double(est.slope) << '\n';
    }
    catch (InsufficientData const&)
    {
        os << "vf: too few sites to fit\n";
    }
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Densest columnar packings of spheres on the inner wall of a cylinder"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    // deposit
    auto* dep = app.add_subcommand("deposit", "grow one column from a template");
    double dep_d = 0, dep_dphi = 0, dep_length = 20;
    std::optional<double> dep_dz;
    int dep_direction = 1, dep_group = 1;
    std::string dep_out;
    dep->add_option("--d", dep_d, "diameter ratio D")->required();
    dep->add_option("--dphi21", dep_dphi, "angular offset of sphere 2")->required();
    dep->add_option("--dz21", dep_dz, "axial offset of sphere 2 (only without contact)");
    dep->add_option("--direction", dep_direction, "+1 or -1")->capture_default_str();
    dep->add_option("--length", dep_length)->capture_default_str();
    dep->add_option("--group", dep_group, "spheres per step (u)")->capture_default_str();
    dep->add_option("--out", dep_out, "column file (stdout if omitted)");

    // sweep-templates
    auto* st = app.add_subcommand("sweep-templates", "densest template at one D");
    double st_d = 0;
    std::string st_out;
    GridFlags st_grid;
    st->add_option("--d", st_d)->required();
    st->add_option("--out", st_out, "write the densest column here");
    st_grid.add(st);

    // sweep-d
    auto* sd = app.add_subcommand("sweep-d", "densest packing over a range of D");
    SweepSettings sd_set;
    GridFlags sd_grid;
    std::string sd_checkpoint;
    bool sd_resume = false;
    sd->add_option("--d-lo", sd_set.d_lo)->capture_default_str();
    sd->add_option("--d-hi", sd_set.d_hi)->capture_default_str();
    sd->add_option("--step", sd_set.step)->capture_default_str();
    sd->add_option("--checkpoint", sd_checkpoint, "results CSV, rewritten after every D");
    sd->add_flag("--resume", sd_resume, "continue from --checkpoint");
    sd_grid.add(sd);

    // classify
    auto* cl = app.add_subcommand("classify", "label a column file");
    std::string cl_in;
    cl->add_option("--in", cl_in)->required();

    // diagram
    auto* dg = app.add_subcommand("diagram", "phyllotactic diagram of a column file");
    std::string dg_in, dg_svg, dg_csv;
    dg->add_option("--in", dg_in)->required();
    dg->add_option("--svg", dg_svg);
    dg->add_option("--csv", dg_csv);

    // compare
    auto* cmp = app.add_subcommand("compare", "compare a vf_max curve with a reference");
    std::string cmp_ours, cmp_ref;
    double cmp_tol = 1e-3;
    cmp->add_option("--ours", cmp_ours)->required();
    cmp->add_option("--reference", cmp_ref)->required();
    cmp->add_option("--tolerance", cmp_tol)->capture_default_str();

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::CallForHelp const&)
    {
        std::cout << app.help();
        return kExitOk;
    }
    catch (CLI::CallForVersion const&)
    {
        std::cout << kToolVersion << '\n';
        return kExitOk;
    }
    catch (CLI::ParseError const& e)
    {
        std::cerr << "error: " << e.what() << "\n\n";
        auto const* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        std::cerr << sub->help();
        return kExitDomain;
    }

    try
    {
        if (*dep)
        {
            DiameterRatio d(dep_d);
            DepositionConfig cfg;
            cfg.target_length = dep_length;
            cfg.group_size = dep_group;
            auto col = run_deposition(d, {dep_dphi, dep_dz, dep_direction}, cfg);
            if (!col)
                throw ParameterError("template never covers the circle");
            if (dep_out.empty())
            {
                write_column(std::cout, *col);
            }
            else
            {
                write_column(std::filesystem::path(dep_out), *col);
                std::cout << "wrote " << col->sites.size() << " sites to " << dep_out << '\n';
            }
        }
        else if (*st)
        {
            auto rec = sweep_templates(DiameterRatio(st_d), st_grid.grid, st_grid.config());
            write_results(std::cout, {to_row(rec)});
            std::cerr << describe(rec.label) << ", " << rec.evaluated << " templates, "
                      << rec.runtime << " s\n";
            if (!st_out.empty())
                write_column(std::filesystem::path(st_out), *rec.column);
        }
        else if (*sd)
        {
            sd_set.grid = sd_grid.grid;
            sd_set.deposition = sd_grid.config();
            if (sd_resume && sd_checkpoint.empty())
                throw ParameterError("--resume needs --checkpoint");
            diameter_samples(sd_set.d_lo, sd_set.d_hi, sd_set.step);  // validate early
            std::optional<Checkpoint> ckpt;
            if (!sd_checkpoint.empty())
            {
                ckpt.emplace(sd_checkpoint, sd_set);
                if (sd_resume)
                    ckpt->resume();
                else if (std::filesystem::exists(sd_checkpoint))
                    throw ParameterError(sd_checkpoint + " exists; pass --resume to continue it");
            }
            std::vector<ResultRow> rows;
            auto emit = [&](SweepRecord& rec) {
                std::cerr << "D=" << format_double(rec.ratio) << "  "
                          << (rec.failure ? "failed: " + *rec.failure
                                          : "vf_max=" + format_double(rec.vf_max) + "  "
                                                + describe(rec.label))
                          << '\n';
                rec.column.reset();
                if (ckpt)
                    ckpt->record(rec);
                else
                    rows.push_back(to_row(rec));
            };
            auto skip = [&](double d) { return ckpt && ckpt->done(d); };
            sweep_diameter(sd_set.d_lo, sd_set.d_hi, sd_set.step, sd_set.grid, sd_set.deposition,
                           {}, emit, skip);
            if (ckpt)
                std::cout << "checkpoint " << sd_checkpoint << ": " << ckpt->rows().size()
                          << " rows\n";
            else
                write_results(std::cout, rows);
        }
        else if (*cl)
        {
            print_analysis(std::cout, read_column(std::filesystem::path(cl_in)));
        }
        else if (*dg)
        {
            if (dg_svg.empty() && dg_csv.empty())
                throw ParameterError("diagram needs --svg and/or --csv");
            auto col = read_column(std::filesystem::path(dg_in));
            auto points = phyllotactic_points(col);
            if (!dg_svg.empty())
            {
                DiagramInput in;
                in.ratio = col.ratio;
                in.points = points;
                in.period = detect_periodicity(col, contact_graph(col));
                write_text(dg_svg, render_diagram(in));
            }
            if (!dg_csv.empty())
            {
                std::ostringstream os;
                write_diagram_csv(os, points);
                write_text(dg_csv, os.str());
            }
        }
        else if (*cmp)
        {
            std::ifstream a(cmp_ours), b(cmp_ref);
            if (!a)
                throw IoError("cannot open " + cmp_ours);
            if (!b)
                throw IoError("cannot open " + cmp_ref);
            auto report = compare_reference(read_curve(a), read_curve(b), cmp_tol);
            print_report(std::cout, report);
        }
    }
    catch (IoError const& e)
    {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    }
    catch (std::exception const& e)
    {
        // Domain, parameter and comparison errors.
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitOk;
}
