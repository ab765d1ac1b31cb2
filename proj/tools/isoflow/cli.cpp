#include "cli.hpp"

#include "isoperiodic/bell.hpp"
#include "isoperiodic/boussinesq.hpp"
#include "isoperiodic/errors.hpp"
#include "isoperiodic/flow.hpp"
#include "isoperiodic/theta.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

namespace isoflow
{

using nlohmann::json;
using namespace isoperiodic;

namespace
{

const std::set<std::string> commands = {"periods", "verify", "flow", "boussinesq", "rauch-check"};

// ---------------------------------------------------------------------------
// JSON helpers

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

void check_keys(const json &j, const std::string &path, const std::set<std::string> &allowed)
{
    if (!j.is_object()) {
        throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
    }
    for (const auto &item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError(path.empty() ? item.key() : path + "." + item.key(), "unknown field");
        }
    }
}

double read_number(const json &j, const std::string &path)
{
    if (!j.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    return j.get<double>();
}

int read_int(const json &j, const std::string &path)
{
    if (!j.is_number_integer()) {
        throw ConfigError(path, "expected an integer");
    }
    return j.get<int>();
}

std::string read_string(const json &j, const std::string &path)
{
    if (!j.is_string()) {
        throw ConfigError(path, "expected a string");
    }
    return j.get<std::string>();
}

// A bare number is read as a real value.
Complex read_complex(const json &j, const std::string &path)
{
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    check_keys(j, path, {"re", "im"});
    if (!j.contains("re") || !j.contains("im")) {
        throw ConfigError(path, "expected {\"re\": ..., \"im\": ...}");
    }
    return {read_number(j.at("re"), path + ".re"), read_number(j.at("im"), path + ".im")};
}

template <class F> void if_present(const json &j, const char *key, F &&apply)
{
    if (j.contains(key)) {
        apply(j.at(key));
    }
}

json path_json(const PathSpec &p)
{
    json v = json::array();
    for (const Complex &z : p.vertices) {
        v.push_back(complex_json(z));
    }
    return v;
}

json provenance(const RunConfig &c, const CycleBasis *cycles)
{
    json p;
    p["version"] = version;
    p["config"] = config_to_json(c);
    if (cycles != nullptr) {
        p["loops"] = {{"a_loop", path_json(cycles->a_loop)},
                      {"b_loop", path_json(cycles->b_loop)},
                      {"clearance", cycles->clearance},
                      {"b_reversed", cycles->b_reversed}};
    } else {
        p["loops"] = nullptr;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Table output: a provenance comment line, a header, %.17g rows.

std::string fmt(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<json>> rows; // numbers, booleans or strings

    void write_csv(std::ostream &out, const json &prov) const
    {
        out << "# " << prov.dump() << "\n";
        for (std::size_t i = 0; i < header.size(); ++i) {
            out << (i ? "," : "") << header[i];
        }
        out << "\n";
        for (const auto &row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "");
                const json &cell = row[i];
                if (cell.is_number()) {
                    out << fmt(cell.get<double>());
                } else if (cell.is_boolean()) {
                    out << (cell.get<bool>() ? "true" : "false");
                } else {
                    out << cell.get<std::string>();
                }
            }
            out << "\n";
        }
    }

    json rows_json() const
    {
        json arr = json::array();
        for (const auto &row : rows) {
            json obj;
            for (std::size_t i = 0; i < row.size(); ++i) {
                obj[header[i]] = row[i];
            }
            arr.push_back(obj);
        }
        return arr;
    }
};

void emit(const RunConfig &c, std::ostream &out, const json &prov, const Table &table,
          const json &summary)
{
    if (c.format == "json") {
        json doc{{"provenance", prov}, {"rows", table.rows_json()}, {"summary", summary}};
        out << doc.dump(2) << "\n";
        return;
    }
    table.write_csv(out, prov);
    if (!summary.is_null()) {
        if (c.out.empty()) {
            out << "# summary " << summary.dump() << "\n";
        } else {
            std::ofstream side(c.out + ".summary.json");
            if (!side) {
                throw ConfigError("output.path", "cannot open " + c.out + ".summary.json");
            }
            side << json{{"provenance", prov}, {"summary", summary}}.dump(2) << "\n";
        }
    }
}

// ---------------------------------------------------------------------------

double point_segment_distance(Complex p, Complex a, Complex b)
{
    const Complex d = b - a;
    const double len2 = std::norm(d);
    double t = len2 > 0.0 ? std::real(std::conj(d) * (p - a)) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * d));
}

QuadratureSpec quad_spec(const RunConfig &c) { return {c.quad_rel, c.quad_abs, 4000}; }

IVPSpec ivp_spec(const RunConfig &c)
{
    IVPSpec s;
    s.rel_tol = c.ivp_rel;
    s.abs_tol = c.ivp_abs;
    return s;
}

// Uniform sample in the disk of radius 0.9 r around a uniform point of the
// region's core segment.
Complex random_point(const Region &region, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Complex core = region.start + unit(rng) * (region.end - region.start);
    const double r = 0.9 * region.radius * std::sqrt(unit(rng));
    return core + std::polar(r, 2.0 * pi * unit(rng));
}

struct SuiteResult {
    std::string name;
    bool passed = false;
    double residual = 0.0;
    double threshold = 0.0;
};

double zero_identity_residual(const CurveFamilyPoint &point, const PeriodData &periods)
{
    const DifferentialEvaluations e = eval_omega(point, periods, SheetedPoint{point.x + 2.0, 1});
    const Complex a = e.omega_P0 * e.omega_P0;
    const Complex b = e.omega_P1 * e.omega_P1;
    const Complex d = e.omega_Px * e.omega_Px;
    return std::abs(a + b + d) / std::max({std::abs(a), std::abs(b), std::abs(d)});
}

SuiteResult suite_zero_identity(const RunConfig &c, const CycleBasis &cycles)
{
    std::mt19937_64 rng(c.seed);
    SuiteResult r{"zero_identity", false, 0.0, 1e-12};
    PeriodOptions opt;
    opt.with_b_period = false;
    for (int k = 0; k < 20; ++k) {
        const CurveFamilyPoint point(random_point(cycles.region, rng), cycles.region);
        const PeriodData periods = compute_periods(point, cycles, quad_spec(c), opt);
        r.residual = std::max(r.residual, zero_identity_residual(point, periods));
    }
    r.passed = r.residual < r.threshold;
    return r;
}

SuiteResult suite_relations(const RunConfig &c, const CycleBasis &cycles)
{
    std::mt19937_64 rng(c.seed + 1);
    SuiteResult r{"normalization_relations", false, 0.0, 1e-10};
    for (int k = 0; k < 10; ++k) {
        const CurveFamilyPoint point(random_point(cycles.region, rng), cycles.region);
        const PeriodData periods = compute_periods(point, cycles, quad_spec(c));
        const SecondKindConstants k3 = compute_Ix(point, cycles, periods, quad_spec(c));
        r.residual = std::max(r.residual, check_normalization_relations(point, periods, k3).max());
    }
    r.passed = r.residual < r.threshold;
    return r;
}

SuiteResult suite_bell(const RunConfig &c)
{
    std::mt19937_64 rng(c.seed + 2);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    SuiteResult r{"bell_equivalence", false, 0.0, 1e-12};
    constexpr int order = 8;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Complex> values(order);
        for (auto &v : values) {
            v = {dist(rng), dist(rng)};
        }
        const SigmaVector sigma = sigma_from_values(values);
        const BellTable table = bell_table_recursive(sigma, order);
        for (int l = 0; l <= order; ++l) {
            const Complex e = bell_explicit(l, sigma);
            const double rel = std::abs(table[l] - e) / std::max(1.0, std::abs(e));
            r.residual = std::max(r.residual, rel);
        }
    }
    r.passed = r.residual < r.threshold;
    return r;
}

bool rauch_passed(const RauchReport &report)
{
    return std::all_of(report.entries.begin(), report.entries.end(), [](const RauchResidual &e) {
        return e.relative < 1e-6 && std::abs(e.ratio - 4.0) <= 0.5;
    });
}

double rauch_worst(const RauchReport &report)
{
    double worst = 0.0;
    for (const auto &e : report.entries) {
        worst = std::max(worst, e.relative);
    }
    return worst;
}

SuiteResult suite_rauch(const RunConfig &c, const CycleBasis &cycles)
{
    const CurveFamilyPoint point(c.x, cycles.region);
    const RauchReport report = rauch_check(point, cycles, SheetedPoint{c.y0, c.sheet}, c.h);
    return {"rauch_residuals", rauch_passed(report), rauch_worst(report), 1e-6};
}

// ---------------------------------------------------------------------------
// Commands

int run_periods(const RunConfig &c, std::ostream &out)
{
    const Region region = region_for(c);
    const CycleBasis cycles = make_cycle_basis(region, quad_spec(c));
    const CurveFamilyPoint point(c.x, region);
    const PeriodData periods = compute_periods(point, cycles, quad_spec(c));
    const SecondKindConstants k3 = compute_Ix(point, cycles, periods, quad_spec(c));
    const NormalizationRelations rel = check_normalization_relations(point, periods, k3);
    const SheetedPoint q0{c.y0, c.sheet};
    q0.validate(c.x);
    const DifferentialEvaluations e = eval_omega(point, periods, q0);
    const double zero = zero_identity_residual(point, periods);

    Table t{{"quantity", "re", "im"}, {}};
    auto add = [&](const char *name, Complex z) { t.rows.push_back({name, z.real(), z.imag()}); };
    add("I0", periods.I0);
    add("tau", periods.tau);
    add("Ix", k3.at_x);
    add("I0_const", k3.at_0);
    add("I1_const", k3.at_1);
    add("omega_P0", e.omega_P0);
    add("omega_P1", e.omega_P1);
    add("omega_Px", e.omega_Px);
    add("omega_Q0", e.omega_Q0);
    add("v_Q0", e.v_Q0);

    const bool passed = zero < 1e-12 && rel.max() < 1e-10;
    json summary{{"zero_identity_residual", zero},
                 {"relation_residual", rel.max()},
                 {"normalization_error", periods.normalization_error},
                 {"passed", passed}};
    emit(c, out, provenance(c, &cycles), t, summary);
    return passed ? exit_ok : exit_verification_failed;
}

int run_verify(const RunConfig &c, std::ostream &out)
{
    const Region region = region_for(c);
    const CycleBasis cycles = make_cycle_basis(region, quad_spec(c));

    // Independent suites run concurrently; results are collected and written
    // from this thread only.
    std::vector<std::future<SuiteResult>> jobs;
    jobs.push_back(std::async(std::launch::async, suite_zero_identity, std::cref(c), std::cref(cycles)));
    jobs.push_back(std::async(std::launch::async, suite_relations, std::cref(c), std::cref(cycles)));
    jobs.push_back(std::async(std::launch::async, suite_bell, std::cref(c)));
    jobs.push_back(std::async(std::launch::async, suite_rauch, std::cref(c), std::cref(cycles)));

    Table t{{"suite", "passed", "residual", "threshold"}, {}};
    bool all = true;
    for (auto &job : jobs) {
        const SuiteResult r = job.get();
        all = all && r.passed;
        t.rows.push_back({r.name, r.passed, r.residual, r.threshold});
    }
    emit(c, out, provenance(c, &cycles), t, json{{"passed", all}});
    return all ? exit_ok : exit_verification_failed;
}

int run_flow(const RunConfig &c, std::ostream &out)
{
    if (!c.x_end) {
        throw ConfigError("curve.x_end", "the flow command needs an end point");
    }
    const Region region = region_for(c);
    const CycleBasis cycles = make_cycle_basis(region, quad_spec(c));
    FlowConfig fc;
    fc.n = c.n;
    fc.A = c.A;
    fc.x0 = c.x;
    fc.x1 = *c.x_end;
    fc.q0 = SheetedPoint{c.y0, c.sheet};
    fc.ivp = ivp_spec(c);
    fc.mode = flow_mode_from_string(c.mode);
    fc.samples = c.samples;
    fc.quad = quad_spec(c);
    const FlowResult res = integrate_flow(fc, cycles);

    const bool both = fc.mode == FlowMode::both;
    Table t{{"x_re", "x_im", "y0_re", "y0_im", "y0p_re", "y0p_im", "B_re", "B_im", "abs_B_drift"}, {}};
    if (both) {
        t.header.insert(t.header.end(), {"y0_second_re", "y0_second_im"});
    }
    for (std::size_t k = 0; k < res.samples.size(); ++k) {
        const FlowState &s = res.samples[k];
        const Complex B = res.B_values[k];
        std::vector<json> row{s.x.real(),   s.x.imag(), s.y0.real(), s.y0.imag(),
                              s.y0p.real(), s.y0p.imag(), B.real(),  B.imag(),
                              std::abs(B - res.B0)};
        if (both) {
            row.push_back(res.second_order_samples[k].y0.real());
            row.push_back(res.second_order_samples[k].y0.imag());
        }
        t.rows.push_back(std::move(row));
    }
    const double relative_drift = res.max_B_drift / std::abs(res.B0);
    bool passed = relative_drift < c.verify_tol;
    json summary{{"B0", complex_json(res.B0)},
                 {"max_relative_B_drift", relative_drift},
                 {"accepted_steps", res.diagnostics.accepted_steps},
                 {"rejected_steps", res.diagnostics.rejected_steps}};
    if (both) {
        summary["mode_gap"] = res.mode_gap;
        passed = passed && res.mode_gap < c.gap_tol;
    }
    summary["passed"] = passed;
    emit(c, out, provenance(c, &cycles), t, summary);
    return passed ? exit_ok : exit_verification_failed;
}

int run_boussinesq(const RunConfig &c, std::ostream &out)
{
    const Region region = region_for(c);
    const CycleBasis cycles = make_cycle_basis(region, quad_spec(c));
    const CurveFamilyPoint point(c.x, region);
    const PeriodData periods = compute_periods(point, cycles, quad_spec(c));
    const SheetedPoint q0{c.y0, c.sheet};
    q0.validate(c.x);
    WaveData wave = compute_wave_data(point, q0, periods, c.z0);
    const ThetaParams params = ThetaParams::for_tau(periods.tau);
    const GridSpec grid = GridSpec::one_period(wave, c.grid_nx, c.grid_ny);
    const CFit fit = solve_c(wave, params, grid);
    wave.c = fit.c;
    const ResidualReport rep = boussinesq_residual(wave, params, grid);

    Table t{{"X", "Y", "u_re", "u_im", "residual"}, {}};
    for (std::size_t p = 0; p < rep.samples.size(); ++p) {
        const GridSample &s = rep.samples[p];
        if (s.near_divisor) {
            t.rows.push_back({s.X, s.Y, "nan", "nan", "nan"});
        } else {
            t.rows.push_back({s.X, s.Y, s.u.real(), s.u.imag(), rep.relative[p]});
        }
    }
    const bool passed = rep.max_relative < c.verify_tol && fit.spread < c.verify_tol;
    json summary{{"U", complex_json(wave.U)},
                 {"V", complex_json(wave.V)},
                 {"c", complex_json(fit.c)},
                 {"tau", complex_json(periods.tau)},
                 {"max_residual", rep.max_relative},
                 {"c_spread", fit.spread},
                 {"excluded_points", rep.excluded_points},
                 {"theta_kernel", active_theta_kernel() == ThetaKernel::avx2 ? "avx2" : "scalar"},
                 {"passed", passed}};
    emit(c, out, provenance(c, &cycles), t, summary);
    return passed ? exit_ok : exit_verification_failed;
}

int run_rauch(const RunConfig &c, std::ostream &out)
{
    const Region region = region_for(c);
    const CycleBasis cycles = make_cycle_basis(region, quad_spec(c));
    const CurveFamilyPoint point(c.x, region);
    const RauchReport report = rauch_check(point, cycles, SheetedPoint{c.y0, c.sheet}, c.h);

    Table t{{"quantity", "predicted_re", "predicted_im", "residual_h", "residual_half", "relative",
             "ratio"},
            {}};
    for (const RauchResidual &e : report.entries) {
        t.rows.push_back({e.name, e.predicted.real(), e.predicted.imag(), e.residual_h,
                          e.residual_half, e.relative, e.ratio});
    }
    const bool passed = rauch_passed(report);
    emit(c, out, provenance(c, &cycles), t, json{{"h", report.h}, {"passed", passed}});
    return passed ? exit_ok : exit_verification_failed;
}

} // namespace

// ---------------------------------------------------------------------------

void RunConfig::validate() const
{
    if (!commands.count(command)) {
        throw ConfigError("command", "unknown command '" + command + "'");
    }
    auto finite = [](Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    if (!finite(x)) {
        throw ConfigError("curve.x", "must be finite");
    }
    if (x_end && !finite(*x_end)) {
        throw ConfigError("curve.x_end", "must be finite");
    }
    if (region_radius && !(*region_radius > 0.0)) {
        throw ConfigError("curve.region_radius", "must be positive");
    }
    if (!finite(y0)) {
        throw ConfigError("pole.y0", "must be finite");
    }
    if (sheet != 1 && sheet != -1) {
        throw ConfigError("pole.sheet", "must be +1 or -1");
    }
    if (n < 0 || n > max_pole_parameter) {
        throw ConfigError("flow.n", "must lie in [0, 8]");
    }
    try {
        flow_mode_from_string(mode);
    } catch (const Error &) {
        throw ConfigError("flow.mode", "must be first_order, second_order or both");
    }
    if (samples < 2) {
        throw ConfigError("flow.samples", "at least two samples");
    }
    const std::pair<const char *, double> positive[] = {
        {"tolerances.quad_rel", quad_rel}, {"tolerances.quad_abs", quad_abs},
        {"tolerances.ivp_rel", ivp_rel},   {"tolerances.ivp_abs", ivp_abs},
        {"tolerances.verify", verify_tol}, {"tolerances.mode_gap", gap_tol},
        {"rauch.h", h}};
    for (const auto &[name, value] : positive) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw ConfigError(name, "must be positive");
        }
    }
    if (grid_nx < 8 || grid_ny < 8) {
        throw ConfigError("boussinesq.grid", "at least 8 points per direction");
    }
    if (format != "csv" && format != "json") {
        throw ConfigError("output.format", "must be csv or json");
    }
}

RunConfig config_from_json(const json &j)
{
    RunConfig c;
    check_keys(j, "", {"command", "curve", "pole", "flow", "tolerances", "boussinesq", "rauch",
                       "verify", "output"});
    if_present(j, "command", [&](const json &v) { c.command = read_string(v, "command"); });
    if_present(j, "curve", [&](const json &v) {
        check_keys(v, "curve", {"x", "x_end", "region_radius"});
        if_present(v, "x", [&](const json &w) { c.x = read_complex(w, "curve.x"); });
        if_present(v, "x_end", [&](const json &w) {
            if (!w.is_null()) {
                c.x_end = read_complex(w, "curve.x_end");
            }
        });
        if_present(v, "region_radius", [&](const json &w) {
            if (!w.is_null()) {
                c.region_radius = read_number(w, "curve.region_radius");
            }
        });
    });
    if_present(j, "pole", [&](const json &v) {
        check_keys(v, "pole", {"y0", "sheet"});
        if_present(v, "y0", [&](const json &w) { c.y0 = read_complex(w, "pole.y0"); });
        if_present(v, "sheet", [&](const json &w) { c.sheet = read_int(w, "pole.sheet"); });
    });
    if_present(j, "flow", [&](const json &v) {
        check_keys(v, "flow", {"n", "A", "mode", "samples"});
        if_present(v, "n", [&](const json &w) { c.n = read_int(w, "flow.n"); });
        if_present(v, "A", [&](const json &w) { c.A = read_complex(w, "flow.A"); });
        if_present(v, "mode", [&](const json &w) { c.mode = read_string(w, "flow.mode"); });
        if_present(v, "samples", [&](const json &w) { c.samples = read_int(w, "flow.samples"); });
    });
    if_present(j, "tolerances", [&](const json &v) {
        check_keys(v, "tolerances", {"quad_rel", "quad_abs", "ivp_rel", "ivp_abs", "verify", "mode_gap"});
        if_present(v, "quad_rel", [&](const json &w) { c.quad_rel = read_number(w, "tolerances.quad_rel"); });
        if_present(v, "quad_abs", [&](const json &w) { c.quad_abs = read_number(w, "tolerances.quad_abs"); });
        if_present(v, "ivp_rel", [&](const json &w) { c.ivp_rel = read_number(w, "tolerances.ivp_rel"); });
        if_present(v, "ivp_abs", [&](const json &w) { c.ivp_abs = read_number(w, "tolerances.ivp_abs"); });
        if_present(v, "verify", [&](const json &w) { c.verify_tol = read_number(w, "tolerances.verify"); });
        if_present(v, "mode_gap", [&](const json &w) { c.gap_tol = read_number(w, "tolerances.mode_gap"); });
    });
    if_present(j, "boussinesq", [&](const json &v) {
        check_keys(v, "boussinesq", {"grid", "z0"});
        if_present(v, "grid", [&](const json &w) {
            if (!w.is_array() || w.size() != 2) {
                throw ConfigError("boussinesq.grid", "expected [nx, ny]");
            }
            c.grid_nx = read_int(w[0], "boussinesq.grid[0]");
            c.grid_ny = read_int(w[1], "boussinesq.grid[1]");
        });
        if_present(v, "z0", [&](const json &w) { c.z0 = read_complex(w, "boussinesq.z0"); });
    });
    if_present(j, "rauch", [&](const json &v) {
        check_keys(v, "rauch", {"h"});
        if_present(v, "h", [&](const json &w) { c.h = read_number(w, "rauch.h"); });
    });
    if_present(j, "verify", [&](const json &v) {
        check_keys(v, "verify", {"seed"});
        if_present(v, "seed", [&](const json &w) {
            if (!w.is_number_unsigned()) {
                throw ConfigError("verify.seed", "expected a non-negative integer");
            }
            c.seed = w.get<unsigned>();
        });
    });
    if_present(j, "output", [&](const json &v) {
        check_keys(v, "output", {"format", "path"});
        if_present(v, "format", [&](const json &w) { c.format = read_string(w, "output.format"); });
        if_present(v, "path", [&](const json &w) { c.out = read_string(w, "output.path"); });
    });
    c.validate();
    return c;
}

json config_to_json(const RunConfig &c)
{
    return json{
        {"command", c.command},
        {"curve",
         {{"x", complex_json(c.x)},
          {"x_end", c.x_end ? complex_json(*c.x_end) : json(nullptr)},
          {"region_radius", c.region_radius ? json(*c.region_radius) : json(nullptr)}}},
        {"pole", {{"y0", complex_json(c.y0)}, {"sheet", c.sheet}}},
        {"flow", {{"n", c.n}, {"A", complex_json(c.A)}, {"mode", c.mode}, {"samples", c.samples}}},
        {"tolerances",
         {{"quad_rel", c.quad_rel},
          {"quad_abs", c.quad_abs},
          {"ivp_rel", c.ivp_rel},
          {"ivp_abs", c.ivp_abs},
          {"verify", c.verify_tol},
          {"mode_gap", c.gap_tol}}},
        {"boussinesq", {{"grid", {c.grid_nx, c.grid_ny}}, {"z0", complex_json(c.z0)}}},
        {"rauch", {{"h", c.h}}},
        {"verify", {{"seed", c.seed}}},
        {"output", {{"format", c.format}, {"path", c.out}}},
    };
}

Region region_for(const RunConfig &c)
{
    const Complex end = c.x_end.value_or(c.x);
    double radius = 0.0;
    if (c.region_radius) {
        radius = *c.region_radius;
    } else {
        const double dist = std::min(point_segment_distance(0.0, c.x, end),
                                     point_segment_distance(1.0, c.x, end));
        if (!(dist > 0.0)) {
            throw ConfigError("curve.x", "the x path touches a degenerate value (0 or 1)");
        }
        radius = 0.25 * dist;
    }
    return Region::segment(c.x, end, radius);
}

int run(const RunConfig &config, std::ostream &out)
{
    config.validate();
    if (config.command == "periods") {
        return run_periods(config, out);
    }
    if (config.command == "verify") {
        return run_verify(config, out);
    }
    if (config.command == "flow") {
        return run_flow(config, out);
    }
    if (config.command == "boussinesq") {
        return run_boussinesq(config, out);
    }
    return run_rauch(config, out);
}

int main_with_args(int argc, char **argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Isoperiodic deformations on the Legendre elliptic family"};
    app.set_version_flag("--version", std::string(version));

    std::string command;
    std::string config_path;
    std::optional<double> x, x_im, x_end, x_end_im, y0, y0_im, A_re, A_im, tol, h, radius;
    std::optional<int> sheet, n, samples;
    std::optional<std::string> mode, out_path, format;
    std::vector<int> grid;

    app.add_option("command", command, "periods | verify | flow | boussinesq | rauch-check");
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--x", x, "real part of x (flow start)");
    app.add_option("--x-im", x_im, "imaginary part of x");
    app.add_option("--x-end", x_end, "real part of the flow end point");
    app.add_option("--x-end-im", x_end_im, "imaginary part of the flow end point");
    app.add_option("--radius", radius, "region thickness around the x path");
    app.add_option("--y0", y0, "real part of the pole position");
    app.add_option("--y0-im", y0_im, "imaginary part of the pole position");
    app.add_option("--sheet", sheet, "sheet of the pole (+1 or -1)");
    app.add_option("--n", n, "pole parameter, order n + 2");
    app.add_option("--A-re", A_re, "real part of the prescribed a-period");
    app.add_option("--A-im", A_im, "imaginary part of the prescribed a-period");
    app.add_option("--mode", mode, "first_order | second_order | both");
    app.add_option("--samples", samples, "flow output samples");
    app.add_option("--tol", tol, "relative solver tolerance (quadrature and IVP)");
    app.add_option("--grid", grid, "Boussinesq grid size: nx ny")->expected(2);
    app.add_option("--step", h, "Rauch finite-difference step");
    app.add_option("--out", out_path, "output path (default: standard output)");
    app.add_option("--format", format, "csv | json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion &e) {
        out << version << "\n";
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }

    try {
        RunConfig c;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw ConfigError("--config", "cannot open " + config_path);
            }
            json j;
            try {
                j = json::parse(in);
            } catch (const json::parse_error &e) {
                throw ConfigError("--config", e.what());
            }
            c = config_from_json(j);
        }
        if (!command.empty()) {
            c.command = command;
        }
        if (x || x_im) {
            c.x = {x.value_or(c.x.real()), x_im.value_or(x ? 0.0 : c.x.imag())};
        }
        if (x_end || x_end_im) {
            const Complex old = c.x_end.value_or(Complex{});
            c.x_end = Complex{x_end.value_or(old.real()), x_end_im.value_or(x_end ? 0.0 : old.imag())};
        }
        if (radius) {
            c.region_radius = *radius;
        }
        if (y0 || y0_im) {
            c.y0 = {y0.value_or(c.y0.real()), y0_im.value_or(y0 ? 0.0 : c.y0.imag())};
        }
        if (sheet) {
            c.sheet = *sheet;
        }
        if (n) {
            c.n = *n;
        }
        if (A_re) {
            c.A.real(*A_re);
        }
        if (A_im) {
            c.A.imag(*A_im);
        }
        if (mode) {
            c.mode = *mode;
        }
        if (samples) {
            c.samples = *samples;
        }
        if (tol) {
            c.quad_rel = c.ivp_rel = *tol;
            c.quad_abs = c.ivp_abs = *tol * 1e-2;
        }
        if (grid.size() == 2) {
            c.grid_nx = grid[0];
            c.grid_ny = grid[1];
        }
        if (h) {
            c.h = *h;
        }
        if (out_path) {
            c.out = *out_path;
        }
        if (format) {
            c.format = *format;
        }
        c.validate();

        if (c.out.empty()) {
            return run(c, out);
        }
        // Render fully before touching the file so a failed run leaves no
        // partial artifact.
        std::ostringstream buffer;
        const int code = run(c, buffer);
        std::ofstream file(c.out);
        if (!file) {
            throw ConfigError("output.path", "cannot open " + c.out);
        }
        file << buffer.str();
        return code;
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return exit_error;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }
}

} // namespace isoflow
