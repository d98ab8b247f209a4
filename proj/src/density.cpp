#include "cylpack/density.hpp"

#include "cylpack/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>
#include <thread>

namespace cylpack
{
//---------------------------------------------------------------------------//
namespace
{
struct LineFit
{
    double slope;
    double residual;
};

/*!
 * Least-squares slope of rank against z. With block > 1, consecutive blocks of
 * that many sites are first replaced by their centroids: for a column whose
 * deposition steps repeat with that period the centroids are exactly
 * collinear, removing the in-period ripple that biases a point-wise fit.
 */
LineFit fit_line(std::vector<double> const& z, std::size_t block)
{
    std::vector<double> xs, ys;
    for (std::size_t b = 0; b + block <= z.size(); b += block)
    {
        double zs = 0, ns = 0;
        for (std::size_t i = b; i < b + block; ++i)
        {
            zs += z[i];
            ns += static_cast<double>(i);
        }
        xs.push_back(zs / block);
        ys.push_back(ns / block);
    }
    auto const n = static_cast<double>(xs.size());
    double const x_mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double const y_mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
        sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
    }
    if (!(sxx > 0))
        throw InsufficientData("fit window has no axial spread");
    LineFit fit{sxy / sxx, 0};
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        double pred = y_mean + fit.slope * (xs[i] - x_mean);
        fit.residual = std::max(fit.residual, std::abs(ys[i] - pred));
    }
    return fit;
}

//! Smallest p such that the (dphi, dz) step sequence repeats with period p.
std::size_t step_period(std::vector<SurfaceSite> const& sites)
{
    constexpr double tol = 1e-7;
    constexpr std::size_t max_period = 32;
    std::vector<std::pair<double, double>> steps;
    for (std::size_t i = 1; i < sites.size(); ++i)
    {
        steps.emplace_back(wrap_angle(sites[i].angle - sites[i - 1].angle),
                           sites[i].axial - sites[i - 1].axial);
    }
    for (std::size_t p = 1; p <= max_period && 3 * p <= steps.size(); ++p)
    {
        bool periodic = true;
        for (std::size_t i = 0; i + p < steps.size() && periodic; ++i)
        {
            periodic = std::abs(wrap_angle(steps[i].first - steps[i + p].first)) < tol
                       && std::abs(steps[i].second - steps[i + p].second) < tol;
        }
        if (periodic)
            return p;
    }
    return 0;
}
}  // namespace

DensityEstimate fit_number_density(Column const& col)
{
    auto post = col.post_template();
    if (post.empty())
        throw InsufficientData("column has no post-template sites");

    std::vector<SurfaceSite> sites(post.begin(), post.end());
    std::stable_sort(sites.begin(), sites.end(), [](auto const& a, auto const& b) {
        return a.axial < b.axial;
    });
    double const z_min = sites.front().axial;
    double const z_max = sites.back().axial;
    double const z_lo = z_min + kTransientFraction * (z_max - z_min);
    double const z_hi = z_max - 1e-9;

    std::vector<SurfaceSite> window;
    std::vector<double> z;
    for (auto const& s : sites)
    {
        if (s.axial >= z_lo && s.axial < z_hi)
        {
            window.push_back(s);
            z.push_back(s.axial);
        }
    }
    if (z.size() < 10)
    {
        std::ostringstream msg;
        msg << "fit window [" << z_lo << ", " << z_hi << ") holds " << z.size()
            << " sites; need at least 10";
        throw InsufficientData(msg.str());
    }

    DensityEstimate est;
    auto const plain = fit_line(z, 1);
    est.residual = plain.residual;
    std::size_t const period = step_period(window);
    if (period > 0 && window.size() >= 3 * period)
        est.slope = fit_line(z, period).slope;
    else
        est.slope = plain.slope;
    est.vf = volume_fraction(col.ratio, est.slope);
    est.z_lo = z_lo;
    est.z_hi = z_hi;
    est.samples = z.size();
    return est;
}

double volume_fraction(DiameterRatio d, double slope)
{
    if (!(slope > 0))
        throw ParameterError("number density must be positive");
    return 2.0 / (3.0 * d.value() * d.value()) * slope;
}

//---------------------------------------------------------------------------//
void SweepGrid::validate() const
{
    if (dphi_steps < 2 || dz_steps < 2)
        throw ParameterError("sweep grids need at least 2 samples per axis");
    if (contact_oversample < 1)
        throw ParameterError("contact oversampling must be >= 1");
    if (refine_rounds < 0 || refine_span < 1)
        throw ParameterError("refinement rounds must be >= 0 with span >= 1");
}

std::optional<DensityEstimate> evaluate_template(DiameterRatio d,
                                                 TemplateParams const& params,
                                                 DepositionConfig const& cfg)
{
    auto col = run_deposition(d, params, cfg);
    if (!col)
        return std::nullopt;
    try
    {
        auto est = fit_number_density(*col);
        est.periodic = detect_periodicity(*col, contact_graph(*col)).has_value();
        return est;
    }
    catch (InsufficientData const&)
    {
        return std::nullopt;
    }
}

namespace
{
constexpr double kVfTie = 1e-9;

struct Trial
{
    TemplateParams params;
    std::optional<DensityEstimate> estimate;
};

//! Strict "a beats b" with the deterministic tie rule.
bool better(Trial const& a, Trial const& b)
{
    if (!a.estimate)
        return false;
    if (!b.estimate)
        return true;
    // A column still drifting at the end of the run has not reached the
    // density the fit is meant to measure.
    if (a.estimate->periodic != b.estimate->periodic)
        return a.estimate->periodic;
    double const va = a.estimate->vf, vb = b.estimate->vf;
    if (va > vb + kVfTie)
        return true;
    if (va < vb - kVfTie)
        return false;
    if (a.params.dphi21 != b.params.dphi21)
        return a.params.dphi21 < b.params.dphi21;
    double const za = a.params.dz21.value_or(-1), zb = b.params.dz21.value_or(-1);
    if (za != zb)
        return za < zb;
    return a.params.direction > b.params.direction;
}

unsigned worker_count(SweepGrid const& grid)
{
    unsigned n = grid.threads ? grid.threads : std::thread::hardware_concurrency();
    return std::max(1u, n);
}

//! Evaluate trials concurrently; results land at their own index.
void evaluate_all(DiameterRatio d,
                  std::vector<Trial>& trials,
                  DepositionConfig const& cfg,
                  unsigned workers)
{
    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            trials[i].estimate = evaluate_template(d, trials[i].params, cfg);
    };
    if (workers <= 1 || trials.size() < 2 * workers)
    {
        run_range(0, trials.size());
        return;
    }
    std::vector<std::future<void>> jobs;
    std::size_t const chunk = (trials.size() + workers - 1) / workers;
    for (std::size_t begin = 0; begin < trials.size(); begin += chunk)
    {
        jobs.push_back(std::async(std::launch::async, run_range, begin,
                                  std::min(trials.size(), begin + chunk)));
    }
    for (auto& j : jobs)
        j.get();
}

void add_trials(DiameterRatio d,
                double dphi,
                std::vector<double> const& dz_values,
                std::vector<Trial>& out)
{
    dphi = std::clamp(dphi, 0.0, kPi);
    if (contact_offset(d, dphi))
    {
        out.push_back({{dphi, std::nullopt, 1}, std::nullopt});
        return;
    }
    for (double dz : dz_values)
        out.push_back({{dphi, std::clamp(dz, 0.0, 1.0), 1}, std::nullopt});
}

std::vector<double> linspace(double lo, double hi, int count)
{
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i)
        v[i] = lo + (hi - lo) * i / (count - 1);
    return v;
}
}  // namespace

SweepRecord sweep_templates(DiameterRatio d, SweepGrid const& grid, DepositionConfig const& cfg)
{
    grid.validate();
    cfg.validate();
    auto const start = std::chrono::steady_clock::now();

    DepositionConfig trial_cfg = cfg;
    trial_cfg.cross_check = false;
    unsigned const workers = worker_count(grid);

    SweepRecord rec;
    rec.ratio = d.value();

    // Coarse grid.
    std::vector<double> const coarse_dz = linspace(0, 1, grid.dz_steps);
    std::vector<Trial> trials;
    int const over = grid.contact_oversample;
    auto const fine = linspace(0, kPi, (grid.dphi_steps - 1) * over + 1);
    for (std::size_t i = 0; i < fine.size(); ++i)
    {
        if (i % over == 0)
            add_trials(d, fine[i], coarse_dz, trials);
        else if (contact_offset(d, fine[i]))
            trials.push_back({{fine[i], std::nullopt, 1}, std::nullopt});
    }
    evaluate_all(d, trials, trial_cfg, workers);
    rec.evaluated += trials.size();

    Trial best{{}, std::nullopt};
    for (auto const& t : trials)
    {
        if (better(t, best))
            best = t;
    }
    if (!best.estimate)
    {
        std::ostringstream msg;
        msg << "no valid template at D=" << d.value();
        throw SweepFailure(msg.str());
    }
    rec.round_best.push_back(best.estimate->vf);

    // Local refinement around the incumbent.
    double dphi_step = kPi / (grid.dphi_steps - 1);
    double dz_step = 1.0 / (grid.dz_steps - 1);
    for (int round = 0; round < grid.refine_rounds; ++round)
    {
        dphi_step /= 10;
        dz_step /= 10;
        std::vector<double> local_dz;
        if (best.params.dz21)
        {
            for (int j = -grid.refine_span; j <= grid.refine_span; ++j)
                local_dz.push_back(*best.params.dz21 + j * dz_step);
        }
        else
        {
            local_dz = linspace(0, 1, std::min(grid.dz_steps, 11));
        }
        std::sort(local_dz.begin(), local_dz.end());
        local_dz.erase(std::unique(local_dz.begin(), local_dz.end()), local_dz.end());

        std::vector<Trial> local;
        for (int i = -grid.refine_span; i <= grid.refine_span; ++i)
            add_trials(d, best.params.dphi21 + i * dphi_step, local_dz, local);
        evaluate_all(d, local, trial_cfg, workers);
        rec.evaluated += local.size();
        for (auto const& t : local)
        {
            if (better(t, best))
                best = t;
        }
        rec.round_best.push_back(best.estimate->vf);
    }

    rec.best_params = best.params;
    rec.column = run_deposition(d, best.params, cfg);
    if (!rec.column)
        throw InternalError("best template became invalid on regeneration");
    rec.estimate = fit_number_density(*rec.column);
    rec.vf_max = rec.estimate.vf;
    auto const analysis = analyze(*rec.column);
    rec.label = analysis.label;
    rec.period = analysis.period;
    if (analysis.period)
        rec.transient_len = analysis.period->transient_len;
    rec.runtime
        = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

//---------------------------------------------------------------------------//
std::vector<double> diameter_samples(double lo, double hi, double step)
{
    if (!(lo >= 1) || !(hi <= kMaxDiameterRatio + 1e-9) || !(lo <= hi))
        throw ParameterError("D range must satisfy 1 <= lo <= hi <= 2.7013");
    if (!(step > 0))
        throw ParameterError("D step must be positive");
    std::vector<double> out;
    if (lo == hi)
        return out;
    for (long i = 0;; ++i)
    {
        double d = std::round((lo + i * step) * 1e12) / 1e12;
        if (d >= hi - 1e-9)
            break;
        out.push_back(d);
    }
    out.push_back(hi);
    return out;
}

std::vector<SweepRecord> sweep_diameter(double lo,
                                        double hi,
                                        double step,
                                        SweepGrid const& grid,
                                        DepositionConfig const& cfg,
                                        RecordSink const& finish,
                                        RecordSink const& emit,
                                        std::function<bool(double)> const& skip)
{
    std::vector<SweepRecord> out;
    for (double d : diameter_samples(lo, hi, step))
    {
        if (skip && skip(d))
            continue;
        SweepRecord rec;
        try
        {
            rec = sweep_templates(DiameterRatio(d), grid, cfg);
            if (finish)
                finish(rec);
        }
        catch (std::exception const& e)
        {
            rec = SweepRecord{};
            rec.failure = e.what();
        }
        rec.ratio = d;
        if (emit)
            emit(rec);
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace cylpack
